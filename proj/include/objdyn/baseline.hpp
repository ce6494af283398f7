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

#pragma once

#include <string>

#include "objdyn/inertial.hpp"
#include "objdyn/trajectory.hpp"

namespace objdyn {

enum class KinematicsSource {
  kFiniteDifference,  ///< window_kinematics on the measured poses
  kExact,             ///< simulator-recorded kinematics (sim data only)
};

struct BaselineOptions {
  bool smoothing = false;
  int smoothing_window = 51;
  int smoothing_order = 3;
  KinematicsSource kinematics = KinematicsSource::kFiniteDifference;
  VelocityLog velocity_log = VelocityLog::kJoint;
};

struct BaselineResult {
  VectorParams params;
  int rank = 0;
  bool rank_deficient = false;
  std::string warning;
  std::size_t windows = 0;
};

/// Stacks Y(window) · θ = net contact wrench over every window (t−2, t−1, t)
/// and solves for θ by minimum-norm linear least squares.
BaselineResult baseline_least_squares(const Trajectory& traj, const BaselineOptions& options = {});

/// The stacked system itself, for rank analysis.
struct LinearSystem {
  Eigen::MatrixXd regressor;
  Eigen::VectorXd wrench;
};
LinearSystem baseline_system(const Trajectory& traj, const BaselineOptions& options = {});

/// Mass implied by the time-averaged world-frame net contact force balancing
/// gravity. Biased by the mean acceleration over the record, so only useful
/// as a plausibility check. Throws kDataError on an empty trajectory.
double static_mass_estimate(const Trajectory& traj);

}  // namespace objdyn
