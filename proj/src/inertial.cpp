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

#include "objdyn/inertial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "objdyn/error.hpp"

namespace objdyn {

namespace {

constexpr double kDegenerateEigen = 1e-12;

void fix_sign(Eigen::Ref<Vec3> v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

// Unit vector orthogonal to u, taken from the coordinate axis least aligned
// with u so the choice is deterministic.
Vec3 canonical_orthogonal(const Vec3& u) {
  int k = 0;
  u.cwiseAbs().minCoeff(&k);
  Vec3 e = Vec3::Unit(k);
  return (e - e.dot(u) * u).normalized();
}

Mat4 checked_inverse(const Mat4& m, ErrorKind kind, const char* what) {
  Eigen::FullPivLU<Mat4> lu(m);
  if (!lu.isInvertible() || std::abs(lu.rcond()) < 1e-14) throw Error(kind, what);
  return lu.inverse();
}

}  // namespace

Mat3 symmetric_from_components(const Eigen::Matrix<double, 6, 1>& c) {
  Mat3 m;
  m << c[0], c[3], c[4],
       c[3], c[1], c[5],
       c[4], c[5], c[2];
  return m;
}

Eigen::Matrix<double, 6, 1> symmetric_components(const Mat3& m) {
  Eigen::Matrix<double, 6, 1> c;
  c << m(0, 0), m(1, 1), m(2, 2), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)),
      0.5 * (m(1, 2) + m(2, 1));
  return c;
}

Mat3 parallel_axis_term(double mass, const Vec3& com, ParallelAxis convention) {
  if (convention == ParallelAxis::kPaper) return mass * com * com.transpose();
  return mass * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
}

InertialMatrixForm InertialMatrixForm::make(double mass, const Vec3& com, const Mat3& inertia_body,
                                            ParallelAxis convention) {
  InertialMatrixForm f;
  f.mass = mass;
  f.com = com;
  f.inertia_body = 0.5 * (inertia_body + inertia_body.transpose());
  f.inertia_cm = f.inertia_body - parallel_axis_term(mass, com, convention);
  return f;
}

Mat3 VectorParams::inertia_body() const {
  return symmetric_from_components(values.segment<6>(4));
}

Mat3 body_inertia(const InertialParams& p) {
  const Vec3& l = p.principal_moments;
  const Vec3 diag(l.y() + l.z(), l.x() + l.z(), l.x() + l.y());
  const Mat3 r = p.principal_rotation.matrix();
  Mat3 h = r * diag.asDiagonal() * r.transpose();
  return 0.5 * (h + h.transpose());
}

Mat3 cm_inertia(const InertialParams& p, ParallelAxis convention) {
  return body_inertia(p) - parallel_axis_term(p.mass, p.com, convention);
}

InertialParams params_from_body_inertia(double mass, const Vec3& com, const Mat3& inertia_body) {
  const Mat3 h = 0.5 * (inertia_body + inertia_body.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(h);
  // Descending order.
  Vec3 lambda = es.eigenvalues().reverse();
  Mat3 axes = es.eigenvectors().rowwise().reverse();

  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const bool eq01 = std::abs(lambda[0] - lambda[1]) <= kDegenerateEigen * scale;
  const bool eq12 = std::abs(lambda[1] - lambda[2]) <= kDegenerateEigen * scale;
  if (eq01 && eq12) {
    axes.setIdentity();
  } else if (eq01) {
    Vec3 u = axes.col(2);
    fix_sign(u);
    axes.col(0) = canonical_orthogonal(u);
    axes.col(1) = u.cross(Vec3(axes.col(0)));
    axes.col(2) = u;
  } else if (eq12) {
    Vec3 u = axes.col(0);
    fix_sign(u);
    axes.col(0) = u;
    axes.col(1) = canonical_orthogonal(u);
    axes.col(2) = u.cross(Vec3(axes.col(1)));
  } else {
    for (int c = 0; c < 3; ++c) fix_sign(axes.col(c));
  }
  if (axes.determinant() < 0.0) axes.col(2) = -axes.col(2);

  InertialParams p;
  p.mass = mass;
  p.com = com;
  p.principal_moments = Vec3(0.5 * (lambda[1] + lambda[2] - lambda[0]), 0.5 * (lambda[0] + lambda[2] - lambda[1]),
                             0.5 * (lambda[0] + lambda[1] - lambda[2]));
  p.principal_rotation = Rotation::from_matrix(axes);
  return p;
}

InertialParams params_from_matrix(double mass, const Vec3& com, const Mat3& inertia_cm, ParallelAxis convention) {
  return params_from_body_inertia(mass, com, inertia_cm + parallel_axis_term(mass, com, convention));
}

InertialMatrixForm matrix_form(const InertialParams& p, ParallelAxis convention) {
  return InertialMatrixForm::make(p.mass, p.com, body_inertia(p), convention);
}

PseudoInertia project_pseudo(double mass, const Vec3& com, const Mat3& inertia_body) {
  PseudoInertia out;
  Mat4& j = out.matrix;
  j.topLeftCorner<3, 3>() = 0.5 * inertia_body.trace() * Mat3::Identity() - inertia_body;
  j.topRightCorner<3, 1>() = mass * com;
  j.bottomLeftCorner<1, 3>() = mass * com.transpose();
  j(3, 3) = mass;
  return out;
}

PseudoInertia project_pseudo(const InertialParams& p) { return project_pseudo(p.mass, p.com, body_inertia(p)); }

PseudoInertia project_pseudo(const VectorParams& v) {
  PseudoInertia out;
  Mat4& j = out.matrix;
  const Mat3 h = v.inertia_body();
  j.topLeftCorner<3, 3>() = 0.5 * h.trace() * Mat3::Identity() - h;
  j.topRightCorner<3, 1>() = v.first_moment();
  j.bottomLeftCorner<1, 3>() = v.first_moment().transpose();
  j(3, 3) = v.mass();
  return out;
}

InertialMatrixForm matrix_form_from_pseudo(const PseudoInertia& p) {
  const Mat4 j = 0.5 * (p.matrix + p.matrix.transpose());
  const double m = j(3, 3);
  if (m == 0.0) throw Error(ErrorKind::kDegenerateMass, "pseudo-inertia has zero mass");
  const Mat3 sigma = j.topLeftCorner<3, 3>();
  const Mat3 h = sigma.trace() * Mat3::Identity() - sigma;
  return InertialMatrixForm::make(m, j.topRightCorner<3, 1>() / m, h);
}

double geodesic_prior_value(const PseudoInertia& p, const PseudoInertia& prior) {
  const Mat4 inv = checked_inverse(prior.matrix, ErrorKind::kSingularPrior, "geodesic prior: singular prior projection");
  return (inv * p.matrix).trace();
}

double geodesic_prior_value(const InertialParams& p, const InertialParams& prior) {
  return geodesic_prior_value(project_pseudo(p), project_pseudo(prior));
}

double inertial_error(const PseudoInertia& gt, const PseudoInertia& est) {
  const Mat4 inv = checked_inverse(gt.matrix, ErrorKind::kSingularPrior, "inertial error: singular ground-truth projection");
  return std::abs(4.0 - (inv * est.matrix).trace());
}

double inertial_error(const InertialParams& gt, const InertialParams& est) {
  return inertial_error(project_pseudo(gt), project_pseudo(est));
}

std::vector<Violation> consistency_violations(const InertialParams& p, const ConvexHull& hull, double tol) {
  std::vector<Violation> out;
  if (!(p.mass > 0.0)) out.push_back({"mass", -p.mass});
  static const char* kL[] = {"L_x", "L_y", "L_z"};
  for (int i = 0; i < 3; ++i) {
    if (p.principal_moments[i] < 0.0) out.push_back({kL[i], -p.principal_moments[i]});
  }
  const auto& hs = hull.halfspaces();
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double m = hs[i].margin(p.com);
    if (m > tol) out.push_back({"face_" + std::to_string(i), m});
  }
  return out;
}

VectorParams vectorize(const InertialMatrixForm& f) {
  VectorParams v;
  v.values[0] = f.mass;
  v.values.segment<3>(1) = f.mass * f.com;
  v.values.segment<6>(4) = symmetric_components(f.inertia_body);
  return v;
}

VectorParams vectorize(const InertialParams& p) { return vectorize(matrix_form(p)); }

InertialMatrixForm devectorize(const VectorParams& v, ParallelAxis convention) {
  const double m = v.mass();
  if (m == 0.0) throw Error(ErrorKind::kDegenerateMass, "devectorize: zero mass, centre of mass undefined");
  return InertialMatrixForm::make(m, v.first_moment() / m, v.inertia_body(), convention);
}

}  // namespace objdyn
