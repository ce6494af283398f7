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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "objdyn/hull.hpp"
#include "objdyn/inertial.hpp"
#include "objdyn/trajectory.hpp"

namespace objdyn {

/// Ground-truth object: inertia, geometry and where the fingertips push.
struct RigidBodyModel {
  InertialParams params;
  ConvexHull hull;
  std::vector<Vec3> attachments;  // body frame

  /// Throws kInvalidArgument unless params are physically consistent and the
  /// attachments lie inside the hull (1e-6 m).
  void validate() const;
};

/// The object motion the grasp is commanded to follow. Translation and ZYX
/// Euler angles each follow amp·(1 − cos 2πft) on distinct low frequencies,
/// plus an optional small high-frequency vibration term.
struct ExcitationProfile {
  double amplitude_scale = 1.0;  // 0 gives a static hold
  Vec3 translation_amplitude{0.08, 0.06, 0.05};     // m
  Vec3 translation_frequency{0.7, 1.1, 1.3};        // Hz
  Vec3 rotation_amplitude{0.25, 0.2, 0.3};          // rad (yaw, pitch, roll)
  Vec3 rotation_frequency{1.1, 1.3, 0.7};           // Hz
  Vec3 vibration_translation{2.0e-4, 2.0e-4, 3.0e-4};  // m
  Vec3 vibration_rotation{0.0, 0.0, 0.0};              // rad
  double vibration_frequency = 41.3;                // Hz
  double squeeze_force = 2.0;                       // N, internal grasp force
};

struct SimConfig {
  double dt = 1e-4;
  double sample_period = 0.01;
  double duration = 10.0;
  Vec3 gravity{0.0, 0.0, -9.81};
  ExcitationProfile profile;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimState {
  Pose pose;
  Vec3 omega = Vec3::Zero();     // body frame
  Vec3 velocity = Vec3::Zero();  // world-frame velocity of the body origin
};

/// Reference motion of the profile at time t: pose plus body-frame kinematics.
struct ReferenceMotion {
  Pose pose;
  TrueKinematics kinematics;
};
ReferenceMotion reference_motion(const ExcitationProfile& profile, double t);

/// Solves the Newton–Euler equations for body-frame origin acceleration and
/// angular acceleration. The spatial inertia is factored once.
class ForwardDynamics {
 public:
  /// Throws kSingularInertia when the spatial inertia is not invertible.
  explicit ForwardDynamics(const InertialParams& params);

  /// Returns (linear_accel, angular_accel).
  std::pair<Vec3, Vec3> solve(const Vec3& omega, const Wrench& applied, const Vec3& g_body) const;

 private:
  MassMoments mm_;
  Eigen::Matrix<double, 6, 6> spatial_;
  Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt_;
};

/// One RK4 step with the body-frame contact forces held over the step.
SimState step(const SimState& state, const RigidBodyModel& model, std::span<const Vec3> forces, double dt,
              const Vec3& world_gravity);

/// Contact forces whose net wrench equals `wrench` exactly: the minimum-norm
/// distribution plus squeezing forces projected onto the grasp null space.
std::vector<Vec3> distribute_wrench(std::span<const Vec3> attachments, const Wrench& wrench, double squeeze);

/// Body-frame forces that make the model follow the profile's reference
/// motion (inverse dynamics of the reference, gravity included).
std::vector<Vec3> synthesize_grasp_forces(const RigidBodyModel& model, double t, const ExcitationProfile& profile,
                                          const Vec3& world_gravity);

/// Deterministic simulation sampled every sample_period; contact forces are
/// the exact applied forces with force_sigma 1e-6 N.
Trajectory run_sim(const RigidBodyModel& model, const SimConfig& config);

/// Adds i.i.d. N(0, sigma2) noise to every force axis; force_sigma becomes √sigma2.
Trajectory add_force_noise(const Trajectory& traj, double sigma2, std::uint64_t seed);

/// Right-perturbs every pose by exp of Gaussian (rotation, translation) noise.
Trajectory add_pose_noise(const Trajectory& traj, double rot_sigma, double trans_sigma, std::uint64_t seed);

/// Re-expresses a trajectory as if measured by a wrist force/torque sensor:
/// the net force at the body origin plus a unit-force couple carrying the torque.
Trajectory to_wrist_ft_style(const Trajectory& traj);

}  // namespace objdyn
