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

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "objdyn/hull.hpp"
#include "objdyn/inertial.hpp"
#include "objdyn/se3.hpp"
#include "objdyn/simulate.hpp"

namespace objdyn::test {

inline Eigen::Matrix<double, 6, 1> gt_components() {
  Eigen::Matrix<double, 6, 1> c;
  c << 40.15, 12.92, 47.99, -12.97, -2.59, -6.49;
  return c / kSimInertiaDisplayScale;
}

inline InertialParams gt_params() {
  return params_from_matrix(1.3, Vec3(0.2, 0.5, 0.1), symmetric_from_components(gt_components()));
}

inline ConvexHull gt_hull() { return ConvexHull::box(Vec3(-0.15, 0.0, -0.15), Vec3(0.45, 0.8, 0.25)); }

inline RigidBodyModel gt_model() {
  RigidBodyModel m;
  m.params = gt_params();
  m.hull = gt_hull();
  m.attachments = {Vec3(-0.15, 0.3, 0.1), Vec3(0.45, 0.3, 0.1), Vec3(0.1, 0.8, 0.05), Vec3(0.2, 0.0, 0.0)};
  return m;
}

/// Hand-rolled generators over a seeded engine.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Vec3 vec3(double scale = 1.0) { return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)); }

  // Uniform on SO(3) via a normalized Gaussian quaternion.
  Rotation rotation() {
    for (;;) {
      const Eigen::Vector4d q(normal(), normal(), normal(), normal());
      if (q.norm() > 1e-3) return Rotation(q[0], q[1], q[2], q[3]);
    }
  }

  Pose pose(double trans_scale = 1.0) { return Pose{rotation(), vec3(trans_scale)}; }

  InertialParams consistent_params(const ConvexHull& hull) {
    InertialParams p;
    p.mass = uniform(0.1, 5.0);
    const auto& v = hull.vertices();
    // Random convex combination of the vertices stays inside.
    Eigen::VectorXd w(v.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = uniform(0.0, 1.0);
    w /= w.sum();
    p.com.setZero();
    for (std::size_t i = 0; i < v.size(); ++i) p.com += w[static_cast<Eigen::Index>(i)] * v[i];
    p.principal_moments = Vec3(uniform(1e-3, 0.5), uniform(1e-3, 0.5), uniform(1e-3, 0.5));
    p.principal_rotation = rotation();
    return p;
  }

  // Second moments drawn about the CoM, so the pseudo-inertia is positive definite.
  InertialParams realizable_params(const ConvexHull& hull) {
    const InertialParams seed = consistent_params(hull);
    const Vec3 l = seed.principal_moments;
    const Mat3 r = seed.principal_rotation.matrix();
    const Mat3 h_cm = r * Vec3(l.y() + l.z(), l.x() + l.z(), l.x() + l.y()).asDiagonal() * r.transpose();
    return params_from_matrix(seed.mass, seed.com, h_cm);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace objdyn::test
