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
#include <numbers>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "objdyn/error.hpp"
#include "objdyn/se3.hpp"
#include "support.hpp"

using namespace objdyn;
using objdyn::test::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent SE(3) log: the principal matrix logarithm of the 4×4 transform.
Vec6 matrix_log_oracle(const Pose& x) {
  const Eigen::Matrix4d l = x.matrix().log();
  Vec6 xi;
  xi << l(2, 1), l(0, 2), l(1, 0), l(0, 3), l(1, 3), l(2, 3);
  return xi;
}

double rotation_distance(const Rotation& a, const Rotation& b) {
  return std::min((a.quaternion().coeffs() - b.quaternion().coeffs()).norm(),
                  (a.quaternion().coeffs() + b.quaternion().coeffs()).norm());
}

double pose_distance(const Pose& a, const Pose& b) {
  return std::max(rotation_distance(a.rotation, b.rotation), (a.translation - b.translation).norm());
}

TimedPose at(const Pose& p, double stamp) { return TimedPose{p, stamp}; }

}  // namespace

TEST(Rotation, LogOfIdentityIsZero) { EXPECT_EQ(log_rotation(Rotation::identity()), Vec3::Zero()); }

TEST(Rotation, LogOfQuarterTurnAboutZ) {
  const Vec3 phi = log_rotation(Rotation::about_axis(Vec3::UnitZ(), kPi / 2));
  EXPECT_NEAR((phi - Vec3(0, 0, kPi / 2)).norm(), 0.0, 1e-12);
}

TEST(Rotation, ExpOfZeroIsIdentity) {
  const Rotation r = exp_rotation(Vec3::Zero());
  EXPECT_EQ(r.w(), 1.0);
  EXPECT_EQ(r.x(), 0.0);
}

TEST(Rotation, ExpOfHalfTurnAboutZ) {
  const Rotation r = exp_rotation(Vec3(0, 0, kPi));
  EXPECT_NEAR(std::abs(r.w()), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.z()), 1.0, 1e-15);
}

TEST(Rotation, TinyAngleMatchesFirstOrderTaylor) {
  const Vec3 phi = Vec3(1, -2, 2).normalized() * 1e-10;
  const Rotation r = exp_rotation(phi);
  EXPECT_NEAR(r.w(), 1.0, 1e-15);
  EXPECT_NEAR(r.x(), phi.x() / 2, 1e-15);
  EXPECT_NEAR(r.y(), phi.y() / 2, 1e-15);
  EXPECT_NEAR(r.z(), phi.z() / 2, 1e-15);
}

TEST(Rotation, ExpLogRoundtripOnRandomRotations) {
  Gen gen(11);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Rotation r = gen.rotation();
    worst = std::max(worst, rotation_distance(exp_rotation(log_rotation(r)), r));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Rotation, LogExpRoundtripInsideThePrincipalBall) {
  Gen gen(12);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vec3 phi = gen.vec3();
    if (phi.norm() > 0) phi *= gen.uniform(0.0, kPi - 1e-6) / phi.norm();
    worst = std::max(worst, (log_rotation(exp_rotation(phi)) - phi).norm());
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Rotation, LogMagnitudeStaysInZeroPi) {
  Gen gen(13);
  for (int i = 0; i < 1000; ++i) {
    const double n = log_rotation(gen.rotation()).norm();
    EXPECT_GE(n, 0.0);
    EXPECT_LE(n, kPi + 1e-12);
  }
}

TEST(Rotation, NearHalfTurnLogIsStable) {
  for (const Vec3& axis : std::vector<Vec3>{Vec3::UnitX(), Vec3::UnitY(), Vec3(1, 1, 1).normalized(), Vec3(-0.3, 0.2, 0.9).normalized()}) {
    for (double eps : {0.0, 1e-12, 1e-8, 1e-5}) {
      const Rotation r = Rotation::about_axis(axis, kPi - eps);
      EXPECT_LT(rotation_distance(exp_rotation(log_rotation(r)), r), 1e-9);
    }
  }
}

TEST(Rotation, CanonicalFormAndUnitNorm) {
  Gen gen(14);
  for (int i = 0; i < 1000; ++i) {
    const Rotation a = gen.rotation();
    const Rotation b = gen.rotation();
    for (const Rotation& r : std::vector<Rotation>{a, a * b, a.inverse(), exp_rotation(gen.vec3(4.0))}) {
      EXPECT_GE(r.w(), 0.0);
      EXPECT_NEAR(r.quaternion().norm(), 1.0, 1e-9);
    }
  }
}

TEST(Rotation, ZeroQuaternionIsRejected) { EXPECT_THROW(Rotation(0, 0, 0, 0), Error); }

TEST(Pose, CompositionIsAssociativeAndInverts) {
  Gen gen(21);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = gen.pose(), b = gen.pose(), c = gen.pose();
    EXPECT_LT(pose_distance((a * b) * c, a * (b * c)), 1e-9);
    EXPECT_LT(pose_distance(a.inverse() * a, Pose::identity()), 1e-9);
  }
}

TEST(RelativePose, SelfIsIdentity) {
  Gen gen(22);
  const Pose x = gen.pose();
  EXPECT_LT(pose_distance(relative_pose(x, x), Pose::identity()), 1e-12);
}

TEST(RelativePose, FromIdentityIsTheTarget) {
  Gen gen(23);
  const Pose b = gen.pose();
  EXPECT_LT(pose_distance(relative_pose(Pose::identity(), b), b), 1e-12);
}

TEST(RelativePose, ComposesBackToTheTarget) {
  Gen gen(24);
  for (int i = 0; i < 1000; ++i) {
    const Pose a = gen.pose(), b = gen.pose();
    EXPECT_LT(pose_distance(a * relative_pose(a, b), b), 1e-9);
  }
}

TEST(PoseLog, MatchesMatrixLogarithm) {
  Gen gen(25);
  for (int i = 0; i < 200; ++i) {
    Vec6 xi;
    xi << gen.vec3(1.5), gen.vec3(2.0);
    const Pose x = exp_pose(xi);
    EXPECT_LT((log_pose(x) - matrix_log_oracle(x)).norm(), 1e-8);
    EXPECT_LT((log_pose(x) - xi).norm(), 1e-9);
  }
}

TEST(BodyTwist, PureTranslation) {
  const Twist tw = body_twist(at(Pose::identity(), 0.0), at(Pose{Rotation(), Vec3(0.01, 0, 0)}, 0.1));
  EXPECT_NEAR(tw.angular.norm(), 0.0, 1e-15);
  EXPECT_NEAR((tw.linear - Vec3(0.1, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(BodyTwist, PureRotation) {
  const Twist tw = body_twist(at(Pose::identity(), 0.0), at(Pose{Rotation::about_axis(Vec3::UnitZ(), 0.05), Vec3::Zero()}, 0.05));
  EXPECT_NEAR((tw.angular - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(tw.linear.norm(), 0.0, 1e-15);
}

TEST(BodyTwist, ScrewMotionMatchesMatrixLogOracle) {
  Gen gen(31);
  for (int i = 0; i < 200; ++i) {
    const Pose a = gen.pose();
    const Pose b = a * gen.pose(0.1);
    const double dt = gen.uniform(0.005, 0.05);
    const Twist tw = body_twist(at(a, 1.0), at(b, 1.0 + dt));
    EXPECT_LT((tw.vector() - matrix_log_oracle(relative_pose(a, b)) / dt).norm() * dt, 1e-8);
  }
}

TEST(BodyTwist, ReintegratingReproducesTheRelativePose) {
  Gen gen(32);
  for (int i = 0; i < 500; ++i) {
    const Pose a = gen.pose();
    Vec6 xi;
    xi << gen.vec3(0.05), gen.vec3(0.05);
    const Pose b = a * exp_pose(xi);
    const double dt = gen.uniform(0.001, 0.02);
    const Twist tw = body_twist(at(a, 0.0), at(b, dt));
    EXPECT_LT(pose_distance(exp_pose(tw.vector() * dt), relative_pose(a, b)), 1e-8);
  }
}

TEST(BodyTwist, NonIncreasingStampsThrow) {
  try {
    body_twist(at(Pose::identity(), 1.0), at(Pose::identity(), 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateTimestamp);
  }
}

TEST(BodyTwist, DecoupledModeSplitsRotationAndTranslation) {
  const Pose b{Rotation::about_axis(Vec3::UnitZ(), 0.3), Vec3(0.2, 0.1, 0)};
  const Twist tw = body_twist(at(Pose::identity(), 0.0), at(b, 0.5), VelocityLog::kDecoupled);
  EXPECT_NEAR((tw.angular - Vec3(0, 0, 0.6)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((tw.linear - Vec3(0.4, 0.2, 0)).norm(), 0.0, 1e-12);
}

TEST(TransportTwist, ZeroReferenceIsIdentity) {
  Twist tw{Vec3(1, 2, 3), Vec3(-1, 0, 4)};
  const Twist out = transport_twist(tw, Vec3::Zero(), 0.01);
  EXPECT_EQ(out.angular, tw.angular);
  EXPECT_EQ(out.linear, tw.linear);
}

TEST(TransportTwist, CrossProductExample) {
  const Twist out = transport_twist(Twist{Vec3(0, 1, 0), Vec3::Zero()}, Vec3(0, 0, 1), 0.01);
  EXPECT_NEAR((out.angular - Vec3(-0.01, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(TransportTwist, MatchesHandCodedFormula) {
  Gen gen(33);
  for (int i = 0; i < 1000; ++i) {
    const Twist tw{gen.vec3(5), gen.vec3(5)};
    const Vec3 w = gen.vec3(5);
    const double dt = gen.uniform(1e-4, 0.1);
    const Twist out = transport_twist(tw, w, dt);
    const Vec3 ang(tw.angular.x() + (w.y() * tw.angular.z() - w.z() * tw.angular.y()) * dt,
                   tw.angular.y() + (w.z() * tw.angular.x() - w.x() * tw.angular.z()) * dt,
                   tw.angular.z() + (w.x() * tw.angular.y() - w.y() * tw.angular.x()) * dt);
    const Vec3 lin(tw.linear.x() + (w.y() * tw.linear.z() - w.z() * tw.linear.y()) * dt,
                   tw.linear.y() + (w.z() * tw.linear.x() - w.x() * tw.linear.z()) * dt,
                   tw.linear.z() + (w.x() * tw.linear.y() - w.y() * tw.linear.x()) * dt);
    EXPECT_LT((out.angular - ang).norm(), 1e-12);
    EXPECT_LT((out.linear - lin).norm(), 1e-12);
  }
}

// Constant-twist trajectories X(t) = X0·exp(ξt). The origin is unaccelerated
// only when the screw axis passes through it (v parallel to ω) or ω = 0.
TEST(WindowKinematics, ConstantTwistThroughOriginGivesZeroAcceleration) {
  Gen gen(41);
  for (int i = 0; i < 1000; ++i) {
    const Pose x0 = gen.pose();
    const Vec3 w = i % 4 == 0 ? Vec3::Zero() : gen.vec3(3.0);
    const Vec3 v = i % 4 == 0 ? gen.vec3(1.0) : Vec3(w * gen.uniform(-0.5, 0.5));
    Vec6 xi;
    xi << w, v;
    const double dt = gen.uniform(0.002, 0.02);
    const double t0 = gen.uniform(0.0, 10.0);
    const KinematicWindow k = window_kinematics(at(x0, t0), at(x0 * exp_pose(xi * dt), t0 + dt),
                                                at(x0 * exp_pose(xi * 2 * dt), t0 + 2 * dt));
    const double bound = 1e-6 * (1.0 + xi.norm());
    EXPECT_LT(k.linear_accel.norm(), bound);
    EXPECT_LT(k.angular_accel.norm(), bound);
  }
}

// Off-axis origins move on a helix; their acceleration is ω × v.
TEST(WindowKinematics, ConstantTwistOffAxisGivesCentripetalAcceleration) {
  Gen gen(42);
  for (int i = 0; i < 500; ++i) {
    Vec6 xi;
    xi << gen.vec3(3.0), gen.vec3(1.0);
    const Vec3 w = xi.head<3>(), v = xi.tail<3>();
    const double dt = 1e-3;
    const Pose x0 = gen.pose();
    const KinematicWindow k = window_kinematics(at(x0, 0), at(x0 * exp_pose(xi * dt), dt),
                                                at(x0 * exp_pose(xi * 2 * dt), 2 * dt));
    EXPECT_LT((k.linear_accel - w.cross(v)).norm(), 20 * dt * (1.0 + xi.squaredNorm() * xi.norm()));
    EXPECT_LT(k.angular_accel.norm(), 1e-6 * (1.0 + xi.norm()));
  }
}

TEST(WindowKinematics, FreeFallTranslation) {
  auto z = [](double t) { return Pose{Rotation(), Vec3(0, 0, -0.5 * 9.81 * t * t)}; };
  const KinematicWindow k = window_kinematics(at(z(0), 0), at(z(0.01), 0.01), at(z(0.02), 0.02));
  EXPECT_NEAR((k.linear_accel - Vec3(0, 0, -9.81)).norm(), 0.0, 1e-6);
  EXPECT_NEAR(k.angular_accel.norm(), 0.0, 1e-12);
}

TEST(WindowKinematics, ConstantAngularAcceleration) {
  const double alpha = 2.0;
  for (double dt : {0.01, 0.005}) {
    auto th = [&](double t) { return Pose{Rotation::about_axis(Vec3::UnitZ(), 0.5 * alpha * t * t), Vec3::Zero()}; };
    const KinematicWindow k = window_kinematics(at(th(0), 0), at(th(dt), dt), at(th(2 * dt), 2 * dt));
    EXPECT_NEAR(k.angular_accel.z(), alpha, 10 * dt);
    EXPECT_NEAR(k.angular_accel.head<2>().norm(), 0.0, 1e-12);
  }
}

TEST(WindowKinematics, RejectsTinyTimeSteps) {
  const Pose x = Pose::identity();
  EXPECT_THROW(window_kinematics(at(x, 0), at(x, 1e-10), at(x, 1)), Error);
  EXPECT_THROW(window_kinematics(at(x, 0), at(x, 1), at(x, 0.5)), Error);
}
