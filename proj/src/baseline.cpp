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

#include "objdyn/baseline.hpp"

#include <array>

#include <Eigen/QR>

#include "objdyn/error.hpp"
#include "objdyn/savgol.hpp"

namespace objdyn {

LinearSystem baseline_system(const Trajectory& traj, const BaselineOptions& options) {
  if (traj.size() < 3) throw Error(ErrorKind::kDataError, "baseline: at least 3 timesteps required");
  traj.validate();
  const std::size_t n = traj.size() - 2;

  std::array<std::vector<double>, 6> wrench;
  for (auto& c : wrench) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec6 w = net_contact_wrench(traj.samples[i].contacts).vector();
    for (int a = 0; a < 6; ++a) wrench[a][i] = w[a];
  }
  if (options.smoothing) {
    if (static_cast<int>(n) < options.smoothing_window) {
      throw Error(ErrorKind::kDataError, "baseline: dataset shorter than the smoothing window");
    }
    for (auto& c : wrench) c = savitzky_golay(c, options.smoothing_window, options.smoothing_order);
  }

  LinearSystem sys;
  sys.regressor.resize(6 * static_cast<Eigen::Index>(n), 10);
  sys.wrench.resize(6 * static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const KinematicWindow k = options.kinematics == KinematicsSource::kExact
                                  ? exact_window_at(traj, i)
                                  : window_at(traj, i, options.velocity_log);
    const auto row = 6 * static_cast<Eigen::Index>(i);
    sys.regressor.middleRows<6>(row) = newton_euler_regressor(k, gravity_in_frame(traj.metadata.gravity, k.frame_pose));
    for (int a = 0; a < 6; ++a) sys.wrench[row + a] = wrench[a][i];
  }
  return sys;
}

BaselineResult baseline_least_squares(const Trajectory& traj, const BaselineOptions& options) {
  const LinearSystem sys = baseline_system(traj, options);
  // Unit-norm columns; roundoff-only columns are dropped.
  const Eigen::VectorXd norms = sys.regressor.colwise().norm().transpose();
  const double floor = 1e-12 * norms.maxCoeff();
  Eigen::VectorXd scale(10);
  for (int j = 0; j < 10; ++j) scale[j] = norms[j] > floor ? 1.0 / norms[j] : 0.0;
  const Eigen::MatrixXd scaled = sys.regressor * scale.asDiagonal();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(scaled);
  cod.setThreshold(1e-10);
  BaselineResult out;
  out.params.values = scale.asDiagonal() * cod.solve(sys.wrench);
  out.rank = static_cast<int>(cod.rank());
  out.rank_deficient = out.rank < 10;
  out.windows = static_cast<std::size_t>(sys.wrench.size() / 6);
  if (out.rank_deficient) {
    out.warning = "rank-deficient regressor (rank " + std::to_string(out.rank) + " of 10); minimum-norm solution";
  }
  return out;
}

double static_mass_estimate(const Trajectory& traj) {
  if (traj.samples.empty()) throw Error(ErrorKind::kDataError, "static_mass_estimate: empty trajectory");
  const Vec3& g = traj.metadata.gravity;
  if (g.norm() == 0.0) throw Error(ErrorKind::kDataError, "static_mass_estimate: zero gravity");
  Vec3 sum = Vec3::Zero();
  for (const auto& s : traj.samples) {
    for (const auto& c : s.contacts) sum += s.pose.pose.rotation.rotate(c.force);
  }
  const Vec3 mean = sum / static_cast<double>(traj.samples.size());
  return -mean.dot(g) / g.squaredNorm();
}

}  // namespace objdyn
