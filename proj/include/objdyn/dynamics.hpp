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

#include <span>
#include <vector>

#include "objdyn/inertial.hpp"
#include "objdyn/se3.hpp"

namespace objdyn {

/// One fingertip contact, expressed in the object body frame at its sample.
/// A broken contact is reported as zero force with a large force_sigma.
struct ContactObservation {
  int contact_id = 0;
  Vec3 point = Vec3::Zero();
  Vec3 force = Vec3::Zero();
  double force_sigma = 1.0;
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();  // about the body origin

  Vec6 vector() const;
};

/// [A − Σf; B − Σ p×f]
using WrenchResidual = Wrench;

/// Mass, first moment m·r_c and body-origin inertia: the quantities the
/// Newton–Euler equations are linear in.
struct MassMoments {
  double mass = 0.0;
  Vec3 first_moment = Vec3::Zero();
  Mat3 inertia_body = Mat3::Zero();

  static MassMoments from(const InertialParams& p);
  static MassMoments from(const VectorParams& v);
};

Vec3 gravity_in_frame(const Vec3& world_gravity, const Pose& frame);

/// The wrench the contacts must supply: A (force) and B (torque about the
/// body origin) for the given kinematics.
Wrench newton_euler_terms(const MassMoments& mm, const KinematicWindow& k, const Vec3& g_body);
Wrench newton_euler_terms(const InertialParams& p, const KinematicWindow& k, const Vec3& g_body);

/// 6×10 matrix Y with newton_euler_terms = Y · vectorize(p).
Eigen::Matrix<double, 6, 10> newton_euler_regressor(const KinematicWindow& k, const Vec3& g_body);

/// Σf and Σ p×f.
Wrench net_contact_wrench(std::span<const ContactObservation> contacts);

WrenchResidual dynamics_residual(const MassMoments& mm, const KinematicWindow& k,
                                 std::span<const ContactObservation> contacts, const Vec3& g_body);
WrenchResidual dynamics_residual(const InertialParams& p, const KinematicWindow& k,
                                 std::span<const ContactObservation> contacts, const Vec3& g_body);

}  // namespace objdyn
