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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace objdyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// [x]ₓ with [x]ₓ y = x × y.
Mat3 skew(const Vec3& x);

/// Unit quaternion kept in canonical form (w >= 0).
class Rotation {
 public:
  Rotation() = default;
  /// Normalizes and canonicalizes; a zero quaternion is rejected.
  Rotation(double w, double x, double y, double z);
  explicit Rotation(const Eigen::Quaterniond& q);

  static Rotation identity() { return Rotation(); }
  static Rotation from_matrix(const Mat3& m);
  static Rotation about_axis(const Vec3& axis, double angle);

  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }
  const Eigen::Quaterniond& quaternion() const { return q_; }

  Mat3 matrix() const { return q_.toRotationMatrix(); }
  Rotation inverse() const;
  Vec3 rotate(const Vec3& v) const { return q_ * v; }
  Vec3 unrotate(const Vec3& v) const { return q_.conjugate() * v; }

  friend Rotation operator*(const Rotation& a, const Rotation& b);

 private:
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

/// Axis-angle vector with magnitude in [0, π].
Vec3 log_rotation(const Rotation& r);
Rotation exp_rotation(const Vec3& phi);

/// Rigid transform body → world: p_world = rotation · p_body + translation.
struct Pose {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return Pose{}; }

  Pose inverse() const;
  Vec3 act(const Vec3& p) const { return rotation.rotate(p) + translation; }
  Eigen::Matrix4d matrix() const;

  friend Pose operator*(const Pose& a, const Pose& b);
};

/// Body-frame velocity: angular in rad/s, linear in m/s.
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  Vec6 vector() const;
  static Twist from_vector(const Vec6& xi);
  bool finite() const { return angular.allFinite() && linear.allFinite(); }
};

struct TimedPose {
  Pose pose;
  double stamp = 0.0;
};

/// How relative poses are turned into velocities.
enum class VelocityLog {
  kJoint,      ///< full SE(3) logarithm (screw motion)
  kDecoupled,  ///< SO(3) log for rotation, plain translation difference
};

/// SE(3) tangent ordering is (rotation, translation) throughout.
Vec6 log_pose(const Pose& x);
Pose exp_pose(const Vec6& xi);

/// a⁻¹ ∘ b
Pose relative_pose(const Pose& a, const Pose& b);

/// Constant body velocity taking a to b over their stamp difference, in frame a.
Twist body_twist(const TimedPose& a, const TimedPose& b, VelocityLog mode = VelocityLog::kJoint);

/// tw + (omega_ref × tw)·dt, applied to both components.
Twist transport_twist(const Twist& tw, const Vec3& omega_ref, double dt);

/// Velocities and accelerations for a window of three poses, all expressed in
/// the body frame of the oldest pose.
struct KinematicWindow {
  Vec3 omega_prev = Vec3::Zero();    // ω over (t-2, t-1)
  Vec3 omega_curr = Vec3::Zero();    // ω over (t-1, t), moved to frame t-2
  Vec3 linear_accel = Vec3::Zero();
  Vec3 angular_accel = Vec3::Zero();
  Pose frame_pose;                   // world pose at t-2
};

KinematicWindow window_kinematics(const TimedPose& p0, const TimedPose& p1, const TimedPose& p2,
                                  VelocityLog mode = VelocityLog::kJoint);

/// Window built from instantaneous (exactly known) kinematics at one instant.
KinematicWindow instantaneous_window(const Pose& frame, const Vec3& omega, const Vec3& angular_accel,
                                     const Vec3& linear_accel);

}  // namespace objdyn
