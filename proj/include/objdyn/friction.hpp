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

#include "objdyn/hull.hpp"
#include "objdyn/se3.hpp"

namespace objdyn {

/// A fingertip contact patch. `normal` is the pressing direction s_n: a force
/// pushing into the surface has a positive component along it (the inward
/// normal of the object face).
struct ContactSurface {
  Vec3 normal{0.0, 0.0, 1.0};
  double mu = 0.5;    // true static friction coefficient
  double warp = 0.0;  // rad per newton of normal load; 0 disables warping

  void validate() const;
};

struct ServoConfig {
  double initial_normal = 40.0;  // N
  double tangent = 3.0;          // N
  double decrement = 0.01;       // N per step
  double noise_sigma = 0.0;      // N, per axis
  int max_steps = 100000;
  double min_normal = 0.1;  // N

  void validate() const;
};

struct SlipEvent {
  Vec3 f_slip = Vec3::Zero();  // measured net force at the last step before slip
  int step = 0;
  bool slipped = false;
};

/// μ = tan(acos(f̂ · s_n)). Throws kDegenerateForce for |f| < 1e-9 and
/// kNonPressingForce when f̂ · s_n <= 0.
double estimate_mu(const Vec3& f_slip, const Vec3& s_n);

/// Lowers the normal force by `decrement` each step at constant tangent force
/// until the true force leaves the friction cone. If the very first step
/// already slips, that step's measurement is returned.
SlipEvent servo_until_slip(const ContactSurface& surface, const ServoConfig& config, std::uint64_t seed);

/// Tilts the surface from a seeded offset in [0, step) in increments of
/// `angle_step` until tan(θ) > μ, and returns the midpoint of the bracket
/// [tan(θ − step), tan(θ)] (lower end clamped at a flat platform). Returns
/// +inf when nothing slips before vertical.
double slope_method_oracle(const ContactSurface& surface, double angle_step, std::uint64_t seed);

/// Outward normal of the face nearest to `point`; ties go to the lowest index.
Vec3 surface_normal_at(const ConvexHull& hull, const Vec3& point);

/// A unit vector orthogonal to n, chosen deterministically.
Vec3 tangent_direction(const Vec3& n);

}  // namespace objdyn
