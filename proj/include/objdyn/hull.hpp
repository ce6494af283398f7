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

#include "objdyn/se3.hpp"

namespace objdyn {

/// Points x with normal · x <= offset are inside.
struct Halfspace {
  Vec3 normal;
  double offset = 0.0;

  double margin(const Vec3& x) const { return normal.dot(x) - offset; }
};

/// Bounded convex polytope in the object body frame, stored in halfspace form.
/// Vertices and per-face polygons are recovered once at construction.
class ConvexHull {
 public:
  static constexpr double kContainmentTol = 1e-9;

  /// Normals are rescaled to unit length (offsets scaled alongside).
  /// Throws if a normal is zero or the intersection is empty or unbounded.
  static ConvexHull from_halfspaces(std::vector<Halfspace> halfspaces);
  /// Convex hull of a point set (at least four non-coplanar points).
  static ConvexHull from_vertices(std::span<const Vec3> points);
  /// Axis-aligned box [lo, hi].
  static ConvexHull box(const Vec3& lo, const Vec3& hi);

  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  /// Counter-clockwise (about the outward normal) vertex loop of face i; empty
  /// for redundant halfspaces that do not touch the polytope in a facet.
  const std::vector<Vec3>& face_polygon(std::size_t i) const { return polygons_[i]; }

  /// Mean of the recovered vertices.
  Vec3 centroid() const;
  bool contains(const Vec3& x, double tol = kContainmentTol) const;
  /// Distance from x to the polygon of face i (infinite for redundant faces).
  double face_distance(std::size_t i, const Vec3& x) const;

 private:
  std::vector<Halfspace> halfspaces_;
  std::vector<Vec3> vertices_;
  std::vector<std::vector<Vec3>> polygons_;

  void recover_geometry();
};

}  // namespace objdyn
