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

#include "objdyn/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include <Eigen/LU>

#include "objdyn/error.hpp"

namespace objdyn {

namespace {

constexpr double kPlaneTol = 1e-9;
constexpr double kBoundingExtent = 1e6;

std::vector<Vec3> enumerate_vertices(const std::vector<Halfspace>& hs) {
  std::vector<Vec3> out;
  const std::size_t n = hs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        Mat3 a;
        a.row(0) = hs[i].normal.transpose();
        a.row(1) = hs[j].normal.transpose();
        a.row(2) = hs[k].normal.transpose();
        if (std::abs(a.determinant()) < 1e-12) continue;
        const Vec3 x = a.partialPivLu().solve(Vec3(hs[i].offset, hs[j].offset, hs[k].offset));
        const double scale = 1.0 + x.cwiseAbs().maxCoeff();
        bool inside = true;
        for (const auto& h : hs) {
          if (h.margin(x) > kPlaneTol * scale) {
            inside = false;
            break;
          }
        }
        if (!inside) continue;
        const bool dup = std::any_of(out.begin(), out.end(), [&](const Vec3& v) {
          return (v - x).norm() <= kPlaneTol * scale;
        });
        if (!dup) out.push_back(x);
      }
    }
  }
  return out;
}

struct Tri {
  std::array<int, 3> v;
  Vec3 n;
  double d;
};

Tri make_tri(const std::vector<Vec3>& p, int a, int b, int c, const Vec3& interior) {
  Tri t{{a, b, c}, (p[b] - p[a]).cross(p[c] - p[a]), 0.0};
  t.n.normalize();
  t.d = t.n.dot(p[a]);
  if (t.n.dot(interior) - t.d > 0.0) {
    std::swap(t.v[1], t.v[2]);
    t.n = -t.n;
    t.d = -t.d;
  }
  return t;
}

}  // namespace

ConvexHull ConvexHull::from_halfspaces(std::vector<Halfspace> halfspaces) {
  for (auto& h : halfspaces) {
    const double n = h.normal.norm();
    if (!(n > 0.0) || !std::isfinite(h.offset)) {
      throw Error(ErrorKind::kInvalidArgument, "hull: halfspace normals must be finite and nonzero");
    }
    h.normal /= n;
    h.offset /= n;
  }
  ConvexHull hull;
  hull.halfspaces_ = std::move(halfspaces);
  hull.recover_geometry();
  return hull;
}

ConvexHull ConvexHull::box(const Vec3& lo, const Vec3& hi) {
  std::vector<Halfspace> hs;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 n = Vec3::Zero();
    n[axis] = -1.0;
    hs.push_back({n, -lo[axis]});
    n[axis] = 1.0;
    hs.push_back({n, hi[axis]});
  }
  return from_halfspaces(std::move(hs));
}

ConvexHull ConvexHull::from_vertices(std::span<const Vec3> points) {
  const std::vector<Vec3> p(points.begin(), points.end());
  if (p.size() < 4) throw Error(ErrorKind::kInvalidArgument, "hull: need at least four vertices");

  double extent = 0.0;
  for (const auto& x : p) extent = std::max(extent, x.cwiseAbs().maxCoeff());
  const double eps = kPlaneTol * (1.0 + extent);

  // Initial tetrahedron from extreme points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = 0.0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    const double d = (p[i] - p[i0]).norm();
    if (d > best) best = d, i1 = i;
  }
  best = 0.0;
  for (int i = 0; i1 >= 0 && i < static_cast<int>(p.size()); ++i) {
    const double d = (p[i] - p[i0]).cross(p[i1] - p[i0]).norm();
    if (d > best) best = d, i2 = i;
  }
  best = 0.0;
  for (int i = 0; i2 >= 0 && i < static_cast<int>(p.size()); ++i) {
    const double d = std::abs((p[i] - p[i0]).dot((p[i1] - p[i0]).cross(p[i2] - p[i0])));
    if (d > best) best = d, i3 = i;
  }
  if (i3 < 0 || best <= eps * eps * eps) {
    throw Error(ErrorKind::kInvalidArgument, "hull: vertices are coplanar");
  }

  const Vec3 interior = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
  std::vector<Tri> faces = {make_tri(p, i0, i1, i2, interior), make_tri(p, i0, i1, i3, interior),
                            make_tri(p, i0, i2, i3, interior), make_tri(p, i1, i2, i3, interior)};

  for (int idx = 0; idx < static_cast<int>(p.size()); ++idx) {
    if (idx == i0 || idx == i1 || idx == i2 || idx == i3) continue;
    std::vector<bool> visible(faces.size(), false);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].n.dot(p[idx]) - faces[f].d > eps) visible[f] = any = true;
    }
    if (!any) continue;
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      for (int e = 0; e < 3; ++e) edge_count[{faces[f].v[e], faces[f].v[(e + 1) % 3]}]++;
    }
    std::vector<Tri> next;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) next.push_back(faces[f]);
    }
    for (const auto& [edge, count] : edge_count) {
      if (edge_count.count({edge.second, edge.first}) == 0) {
        next.push_back(make_tri(p, edge.first, edge.second, idx, interior));
      }
    }
    faces = std::move(next);
  }

  std::vector<Halfspace> hs;
  for (const auto& t : faces) {
    const bool dup = std::any_of(hs.begin(), hs.end(), [&](const Halfspace& h) {
      return (h.normal - t.n).norm() < 1e-7 && std::abs(h.offset - t.d) < 1e-7 * (1.0 + extent);
    });
    if (!dup) hs.push_back({t.n, t.d});
  }
  return from_halfspaces(std::move(hs));
}

void ConvexHull::recover_geometry() {
  if (halfspaces_.size() < 4) {
    throw Error(ErrorKind::kInvalidArgument, "hull: a bounded polytope needs at least four halfspaces");
  }
  // Recover vertices inside a large box; any vertex on that box means the
  // halfspaces alone leave the polytope open.
  std::vector<Halfspace> bounded = halfspaces_;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 n = Vec3::Zero();
    n[axis] = 1.0;
    bounded.push_back({n, kBoundingExtent});
    bounded.push_back({-n, kBoundingExtent});
  }
  vertices_ = enumerate_vertices(bounded);
  if (vertices_.empty()) throw Error(ErrorKind::kInvalidArgument, "hull: halfspaces have empty intersection");
  for (const auto& v : vertices_) {
    if (v.cwiseAbs().maxCoeff() > 0.5 * kBoundingExtent) {
      throw Error(ErrorKind::kInvalidArgument, "hull: halfspaces do not bound a finite region");
    }
  }
  if (vertices_.size() < 4) throw Error(ErrorKind::kInvalidArgument, "hull: polytope is degenerate");

  polygons_.assign(halfspaces_.size(), {});
  for (std::size_t i = 0; i < halfspaces_.size(); ++i) {
    const auto& h = halfspaces_[i];
    std::vector<Vec3> on;
    for (const auto& v : vertices_) {
      if (std::abs(h.margin(v)) <= kPlaneTol * (1.0 + v.cwiseAbs().maxCoeff())) on.push_back(v);
    }
    if (on.size() < 3) continue;
    Vec3 c = Vec3::Zero();
    for (const auto& v : on) c += v;
    c /= static_cast<double>(on.size());
    const Vec3 u = (on.front() - c).normalized();
    const Vec3 w = h.normal.cross(u);
    std::sort(on.begin(), on.end(), [&](const Vec3& a, const Vec3& b) {
      return std::atan2(w.dot(a - c), u.dot(a - c)) < std::atan2(w.dot(b - c), u.dot(b - c));
    });
    polygons_[i] = std::move(on);
  }
}

Vec3 ConvexHull::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

bool ConvexHull::contains(const Vec3& x, double tol) const {
  return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                     [&](const Halfspace& h) { return h.margin(x) <= tol; });
}

double ConvexHull::face_distance(std::size_t i, const Vec3& x) const {
  const auto& poly = polygons_.at(i);
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  const Vec3& n = halfspaces_[i].normal;
  const double plane = halfspaces_[i].margin(x);
  const Vec3 q = x - plane * n;
  bool inside = true;
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const Vec3& a = poly[e];
    const Vec3& b = poly[(e + 1) % poly.size()];
    if ((b - a).cross(q - a).dot(n) < -1e-12) {
      inside = false;
      break;
    }
  }
  if (inside) return std::abs(plane);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < poly.size(); ++e) {
    const Vec3& a = poly[e];
    const Vec3& b = poly[(e + 1) % poly.size()];
    const Vec3 ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (x - (a + t * ab)).norm());
  }
  return best;
}

}  // namespace objdyn
