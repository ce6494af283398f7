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

#include "objdyn/friction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "objdyn/error.hpp"

namespace objdyn {

void ContactSurface::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-9) throw Error(ErrorKind::kInvalidArgument, "surface: normal must be unit");
  if (!(mu > 0.0)) throw Error(ErrorKind::kInvalidArgument, "surface: mu must be positive");
  if (warp < 0.0) throw Error(ErrorKind::kInvalidArgument, "surface: warp must be non-negative");
}

void ServoConfig::validate() const {
  if (initial_normal < 0.0 || tangent < 0.0 || noise_sigma < 0.0 || min_normal < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "servo config: forces must be non-negative");
  }
  if (!(decrement > 0.0)) throw Error(ErrorKind::kInvalidArgument, "servo config: decrement must be positive");
  if (max_steps <= 0) throw Error(ErrorKind::kInvalidArgument, "servo config: max_steps must be positive");
}

Vec3 tangent_direction(const Vec3& n) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return (seed - seed.dot(n) * n).normalized();
}

double estimate_mu(const Vec3& f_slip, const Vec3& s_n) {
  const double norm = f_slip.norm();
  if (!(norm >= 1e-9)) throw Error(ErrorKind::kDegenerateForce, "estimate_mu: force magnitude below 1e-9 N");
  const double c = std::clamp(f_slip.dot(s_n) / (norm * s_n.norm()), -1.0, 1.0);
  if (c <= 0.0) throw Error(ErrorKind::kNonPressingForce, "estimate_mu: force does not press into the surface");
  return std::tan(std::acos(c));
}

SlipEvent servo_until_slip(const ContactSurface& surface, const ServoConfig& config, std::uint64_t seed) {
  surface.validate();
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const Vec3 n = surface.normal;
  const Vec3 t = tangent_direction(n);

  auto measure = [&](const Vec3& f) {
    Vec3 noisy = f;
    for (int a = 0; a < 3; ++a) noisy[a] += config.noise_sigma * unit(rng);
    return noisy;
  };
  // Warping tilts the effective normal away from the tangent load.
  auto slips = [&](double fn) {
    const double angle = surface.warp * fn;
    const Vec3 n_eff = std::cos(angle) * n - std::sin(angle) * t;
    const Vec3 f = fn * n + config.tangent * t;
    const double normal = f.dot(n_eff);
    const double tangential = (f - normal * n_eff).norm();
    return tangential > surface.mu * std::abs(normal);
  };

  SlipEvent ev;
  Vec3 previous = Vec3::Zero();
  for (int k = 0; k < config.max_steps; ++k) {
    const double fn = config.initial_normal - k * config.decrement;
    if (fn < config.min_normal) break;
    const Vec3 measured = measure(fn * n + config.tangent * t);
    if (slips(fn)) {
      ev.slipped = true;
      ev.step = k == 0 ? 0 : k - 1;
      ev.f_slip = k == 0 ? measured : previous;
      return ev;
    }
    previous = measured;
    ev.step = k;
    ev.f_slip = measured;
  }
  ev.slipped = false;
  return ev;
}

double slope_method_oracle(const ContactSurface& surface, double angle_step, std::uint64_t seed) {
  surface.validate();
  if (!(angle_step > 0.0)) throw Error(ErrorKind::kInvalidArgument, "slope method: angle step must be positive");
  std::mt19937_64 rng(seed);
  const double offset = std::uniform_real_distribution<double>(0.0, angle_step)(rng);
  const Vec3 n = surface.normal;
  const Vec3 t = tangent_direction(n);
  // Gravity expressed in the tilted surface frame.
  auto gravity_ratio = [&](double theta) { return estimate_mu(std::cos(theta) * n + std::sin(theta) * t, n); };
  for (long k = 0;; ++k) {
    const double theta = offset + static_cast<double>(k) * angle_step;
    if (theta >= 0.5 * std::numbers::pi) break;
    const double ratio = gravity_ratio(theta);
    if (ratio > surface.mu) {
      const double lower = k == 0 ? 0.0 : gravity_ratio(theta - angle_step);
      return 0.5 * (lower + ratio);
    }
  }
  return std::numeric_limits<double>::infinity();
}

Vec3 surface_normal_at(const ConvexHull& hull, const Vec3& point) {
  const auto& hs = hull.halfspaces();
  std::size_t best = hs.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double d = hull.face_distance(i, point);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  if (best == hs.size()) throw Error(ErrorKind::kInvalidArgument, "surface_normal_at: hull has no faces");
  return hs[best].normal;
}

}  // namespace objdyn
