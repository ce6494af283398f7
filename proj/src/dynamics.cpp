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

#include "objdyn/dynamics.hpp"

namespace objdyn {

namespace {

// L(w) with H·w = L(w)·[xx, yy, zz, xy, xz, yz]ᵀ.
Eigen::Matrix<double, 3, 6> inertia_action(const Vec3& w) {
  Eigen::Matrix<double, 3, 6> l;
  l << w.x(), 0.0, 0.0, w.y(), w.z(), 0.0,
       0.0, w.y(), 0.0, w.x(), 0.0, w.z(),
       0.0, 0.0, w.z(), 0.0, w.x(), w.y();
  return l;
}

}  // namespace

Vec6 Wrench::vector() const {
  Vec6 v;
  v << force, torque;
  return v;
}

MassMoments MassMoments::from(const InertialParams& p) {
  return MassMoments{p.mass, p.mass * p.com, body_inertia(p)};
}

MassMoments MassMoments::from(const VectorParams& v) {
  return MassMoments{v.mass(), v.first_moment(), v.inertia_body()};
}

Vec3 gravity_in_frame(const Vec3& world_gravity, const Pose& frame) {
  return frame.rotation.unrotate(world_gravity);
}

Wrench newton_euler_terms(const MassMoments& mm, const KinematicWindow& k, const Vec3& g_body) {
  const Vec3 lin = k.linear_accel - g_body;
  const Vec3& c = mm.first_moment;  // m·r_c
  const Mat3 wc = skew(k.omega_curr);
  Wrench w;
  w.force = mm.mass * lin - c.cross(k.angular_accel) + wc * k.omega_prev.cross(c);
  w.torque = c.cross(lin) + mm.inertia_body * k.angular_accel + wc * (mm.inertia_body * k.omega_prev);
  return w;
}

Wrench newton_euler_terms(const InertialParams& p, const KinematicWindow& k, const Vec3& g_body) {
  return newton_euler_terms(MassMoments::from(p), k, g_body);
}

Eigen::Matrix<double, 6, 10> newton_euler_regressor(const KinematicWindow& k, const Vec3& g_body) {
  const Vec3 lin = k.linear_accel - g_body;
  const Mat3 wc = skew(k.omega_curr);
  Eigen::Matrix<double, 6, 10> y = Eigen::Matrix<double, 6, 10>::Zero();
  y.block<3, 1>(0, 0) = lin;
  y.block<3, 3>(0, 1) = skew(k.angular_accel) + wc * skew(k.omega_prev);
  y.block<3, 3>(3, 1) = -skew(lin);
  y.block<3, 6>(3, 4) = inertia_action(k.angular_accel) + wc * inertia_action(k.omega_prev);
  return y;
}

Wrench net_contact_wrench(std::span<const ContactObservation> contacts) {
  Wrench w;
  for (const auto& c : contacts) {
    w.force += c.force;
    w.torque += c.point.cross(c.force);
  }
  return w;
}

WrenchResidual dynamics_residual(const MassMoments& mm, const KinematicWindow& k,
                                 std::span<const ContactObservation> contacts, const Vec3& g_body) {
  const Wrench model = newton_euler_terms(mm, k, g_body);
  const Wrench applied = net_contact_wrench(contacts);
  return WrenchResidual{model.force - applied.force, model.torque - applied.torque};
}

WrenchResidual dynamics_residual(const InertialParams& p, const KinematicWindow& k,
                                 std::span<const ContactObservation> contacts, const Vec3& g_body) {
  return dynamics_residual(MassMoments::from(p), k, contacts, g_body);
}

}  // namespace objdyn
