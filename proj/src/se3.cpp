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

#include "objdyn/se3.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "objdyn/error.hpp"

namespace objdyn {

namespace {

// Below this angle log/exp switch to Taylor expansions.
constexpr double kSmallAngle = 1e-7;
// Below this angle the SE(3) V-matrix coefficients use their series.
constexpr double kSmallAngleV = 1e-4;
constexpr double kMinTimestep = 1e-9;

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  // Unit inputs pass through bit-exact.
  if (std::abs(q.squaredNorm() - 1.0) > 8.0 * std::numeric_limits<double>::epsilon()) q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

}  // namespace

Mat3 skew(const Vec3& x) {
  Mat3 m;
  m << 0.0, -x.z(), x.y(),
       x.z(), 0.0, -x.x(),
       -x.y(), x.x(), 0.0;
  return m;
}

Rotation::Rotation(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  if (!(q.norm() > 0.0) || !q.coeffs().allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "rotation: quaternion must be finite and nonzero");
  }
  q_ = canonical(q);
}

Rotation::Rotation(const Eigen::Quaterniond& q) : Rotation(q.w(), q.x(), q.y(), q.z()) {}

Rotation Rotation::from_matrix(const Mat3& m) {
  // Eigen branches on the largest diagonal element.
  return Rotation(Eigen::Quaterniond(m));
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  return exp_rotation(axis.normalized() * angle);
}

Rotation Rotation::inverse() const { return Rotation(q_.conjugate()); }

Rotation operator*(const Rotation& a, const Rotation& b) { return Rotation(a.q_ * b.q_); }

Vec3 log_rotation(const Rotation& r) {
  const Eigen::Quaterniond& q = r.quaternion();
  const Vec3 v = q.vec();
  const double n = v.norm();
  const double w = q.w();  // >= 0 by canonicalization
  if (n < 0.5 * kSmallAngle) {
    // θ ≈ 2n; 2·atan(n/w)/n ≈ (2/w)(1 − n²/(3w²))
    return (2.0 / w) * (1.0 - n * n / (3.0 * w * w)) * v;
  }
  const double theta = 2.0 * std::atan2(n, w);
  return (theta / n) * v;
}

Rotation exp_rotation(const Vec3& phi) {
  const double theta = phi.norm();
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    const Vec3 v = (0.5 - t2 / 48.0) * phi;
    return Rotation(1.0 - t2 / 8.0, v.x(), v.y(), v.z());
  }
  const double half = 0.5 * theta;
  const Vec3 v = (std::sin(half) / theta) * phi;
  return Rotation(std::cos(half), v.x(), v.y(), v.z());
}

Pose Pose::inverse() const {
  const Rotation inv = rotation.inverse();
  return Pose{inv, -inv.rotate(translation)};
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose operator*(const Pose& a, const Pose& b) {
  return Pose{a.rotation * b.rotation, a.rotation.rotate(b.translation) + a.translation};
}

Vec6 Twist::vector() const {
  Vec6 xi;
  xi << angular, linear;
  return xi;
}

Twist Twist::from_vector(const Vec6& xi) { return Twist{xi.head<3>(), xi.tail<3>()}; }

Vec6 log_pose(const Pose& x) {
  const Vec3 phi = log_rotation(x.rotation);
  const double theta = phi.norm();
  const Mat3 Phi = skew(phi);
  double c;
  if (theta < kSmallAngleV) {
    const double t2 = theta * theta;
    c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const double half = 0.5 * theta;
    c = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  }
  const Mat3 v_inv = Mat3::Identity() - 0.5 * Phi + c * Phi * Phi;
  Vec6 xi;
  xi << phi, v_inv * x.translation;
  return xi;
}

Pose exp_pose(const Vec6& xi) {
  const Vec3 phi = xi.head<3>();
  const double theta = phi.norm();
  const Mat3 Phi = skew(phi);
  double b, c;
  if (theta < kSmallAngleV) {
    const double t2 = theta * theta;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  } else {
    const double s = std::sin(0.5 * theta);
    b = 2.0 * s * s / (theta * theta);
    c = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  const Mat3 v = Mat3::Identity() + b * Phi + c * Phi * Phi;
  return Pose{exp_rotation(phi), v * xi.tail<3>()};
}

Pose relative_pose(const Pose& a, const Pose& b) { return a.inverse() * b; }

Twist body_twist(const TimedPose& a, const TimedPose& b, VelocityLog mode) {
  const double dt = b.stamp - a.stamp;
  if (!(dt > kMinTimestep)) {
    throw Error(ErrorKind::kDegenerateTimestamp,
                "body_twist: stamps must increase by more than 1e-9 s (got dt=" + std::to_string(dt) + ")");
  }
  const Pose rel = relative_pose(a.pose, b.pose);
  if (mode == VelocityLog::kDecoupled) {
    return Twist{log_rotation(rel.rotation) / dt, rel.translation / dt};
  }
  return Twist::from_vector(log_pose(rel) / dt);
}

Twist transport_twist(const Twist& tw, const Vec3& omega_ref, double dt) {
  return Twist{tw.angular + omega_ref.cross(tw.angular) * dt, tw.linear + omega_ref.cross(tw.linear) * dt};
}

KinematicWindow window_kinematics(const TimedPose& p0, const TimedPose& p1, const TimedPose& p2,
                                  VelocityLog mode) {
  const Twist first = body_twist(p0, p1, mode);
  const Twist second = body_twist(p1, p2, mode);
  const double dt = p2.stamp - p1.stamp;
  const Twist moved = transport_twist(second, first.angular, dt);
  KinematicWindow k;
  k.omega_prev = first.angular;
  k.omega_curr = moved.angular;
  k.angular_accel = (moved.angular - first.angular) / dt;
  k.linear_accel = (moved.linear - first.linear) / dt;
  k.frame_pose = p0.pose;
  return k;
}

KinematicWindow instantaneous_window(const Pose& frame, const Vec3& omega, const Vec3& angular_accel,
                                     const Vec3& linear_accel) {
  KinematicWindow k;
  k.omega_prev = omega;
  k.omega_curr = omega;
  k.angular_accel = angular_accel;
  k.linear_accel = linear_accel;
  k.frame_pose = frame;
  return k;
}

}  // namespace objdyn
