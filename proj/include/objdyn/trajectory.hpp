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
#include <optional>
#include <string>
#include <vector>

#include "objdyn/dynamics.hpp"
#include "objdyn/se3.hpp"

namespace objdyn {

/// Instantaneous body-frame kinematics, known only for simulated data.
struct TrueKinematics {
  Vec3 omega = Vec3::Zero();
  Vec3 angular_accel = Vec3::Zero();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 linear_accel = Vec3::Zero();  // acceleration of the body origin
};

struct TrajectorySample {
  TimedPose pose;
  std::vector<ContactObservation> contacts;
  std::optional<TrueKinematics> truth;
};

struct TrajectoryMetadata {
  std::uint64_t seed = 0;
  double noise_sigma2 = 0.0;
  std::string source = "sim";  // sim | wrist-ft-style | in-hand-style
  Vec3 gravity{0.0, 0.0, -9.81};
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectoryMetadata metadata;

  std::size_t size() const { return samples.size(); }
  std::vector<TimedPose> timed_poses() const;
  /// Throws kDataError unless stamps strictly increase.
  void validate() const;
};

/// Finite-difference kinematics for the window (i, i+1, i+2).
KinematicWindow window_at(const Trajectory& traj, std::size_t i, VelocityLog mode = VelocityLog::kJoint);

/// Exact kinematics at sample i; throws kDataError if the sample has none.
KinematicWindow exact_window_at(const Trajectory& traj, std::size_t i);

}  // namespace objdyn
