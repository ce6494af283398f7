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

#include "objdyn/trajectory.hpp"

#include <string>

#include "objdyn/error.hpp"

namespace objdyn {

std::vector<TimedPose> Trajectory::timed_poses() const {
  std::vector<TimedPose> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.pose);
  return out;
}

void Trajectory::validate() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].pose.stamp > samples[i - 1].pose.stamp)) {
      throw Error(ErrorKind::kDataError, "trajectory: stamps must strictly increase (sample " + std::to_string(i) + ")");
    }
  }
}

KinematicWindow window_at(const Trajectory& traj, std::size_t i, VelocityLog mode) {
  return window_kinematics(traj.samples.at(i).pose, traj.samples.at(i + 1).pose, traj.samples.at(i + 2).pose, mode);
}

KinematicWindow exact_window_at(const Trajectory& traj, std::size_t i) {
  const auto& s = traj.samples.at(i);
  if (!s.truth) {
    throw Error(ErrorKind::kDataError, "trajectory: sample " + std::to_string(i) + " carries no exact kinematics");
  }
  return instantaneous_window(s.pose.pose, s.truth->omega, s.truth->angular_accel, s.truth->linear_accel);
}

}  // namespace objdyn
