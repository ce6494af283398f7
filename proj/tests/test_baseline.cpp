// Copyright 2026 The objdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "objdyn/baseline.hpp"
#include "objdyn/error.hpp"
#include "objdyn/simulate.hpp"
#include "support.hpp"

using namespace objdyn;

namespace {

Trajectory simulated(double duration, double amplitude = 1.0) {
  SimConfig c;
  c.duration = duration;
  c.profile.amplitude_scale = amplitude;
  return run_sim(objdyn::test::gt_model(), c);
}

}  // namespace

TEST(Baseline, ExactKinematicsRecoverGroundTruth) {
  BaselineOptions o;
  o.kinematics = KinematicsSource::kExact;
  const BaselineResult r = baseline_least_squares(simulated(5.0), o);
  const Vec10 gt = vectorize(objdyn::test::gt_params()).values;
  EXPECT_EQ(r.rank, 10);
  EXPECT_FALSE(r.rank_deficient);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(r.params.values[i], gt[i], 1e-6 * std::max(1.0, std::abs(gt[i])));
}

TEST(Baseline, FiniteDifferencesMisestimateMass) {
  const BaselineResult r = baseline_least_squares(simulated(10.0));
  EXPECT_GT(std::abs(r.params.mass() - 1.3) / 1.3, 0.5);
}

TEST(Baseline, SmoothingRunsOnLongSignals) {
  BaselineOptions o;
  o.smoothing = true;
  const Trajectory t = simulated(2.0);
  const BaselineResult r = baseline_least_squares(t, o);
  EXPECT_TRUE(r.params.values.allFinite());
  EXPECT_EQ(r.windows, t.size() - 2);
  EXPECT_THROW(baseline_least_squares(simulated(0.3), o), Error);
}

TEST(Baseline, StaticHoldIsRankDeficientWithMinimumNormSolution) {
  BaselineOptions o;
  o.kinematics = KinematicsSource::kExact;
  const BaselineResult r = baseline_least_squares(simulated(1.0, 0.0), o);
  EXPECT_TRUE(r.rank_deficient);
  EXPECT_LT(r.rank, 10);
  EXPECT_FALSE(r.warning.empty());
  EXPECT_TRUE(r.params.values.allFinite());
  // Gravity alone fixes the mass.
  EXPECT_NEAR(r.params.mass(), 1.3, 1e-9);
}

TEST(Baseline, SystemDimensions) {
  const Trajectory t = simulated(0.5);
  const LinearSystem s = baseline_system(t);
  EXPECT_EQ(s.regressor.rows(), static_cast<Eigen::Index>(6 * (t.size() - 2)));
  EXPECT_EQ(s.regressor.cols(), 10);
  EXPECT_EQ(s.wrench.size(), s.regressor.rows());
}

TEST(Baseline, StaticMassEstimate) {
  EXPECT_NEAR(static_mass_estimate(simulated(1.0, 0.0)), 1.3, 1e-9);
  EXPECT_NEAR(static_mass_estimate(simulated(10.0)), 1.3, 0.05);
}
