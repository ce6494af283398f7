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

#include <string>
#include <vector>

#include "objdyn/hull.hpp"
#include "objdyn/se3.hpp"

namespace objdyn {

using Mat4 = Eigen::Matrix4d;
using Vec10 = Eigen::Matrix<double, 10, 1>;

/// Manifold parameterization of a rigid body's inertia:
///   mass, centre of mass in the body frame, principal second moments
///   L = (L_x, L_y, L_z) about the body origin, and the rotation taking
///   principal axes to body axes.
/// The body-origin inertia is R · diag(L_y+L_z, L_x+L_z, L_x+L_y) · Rᵀ.
struct InertialParams {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Vec3 principal_moments = Vec3::Zero();
  Rotation principal_rotation;
};

/// Parallel-axis convention used when moving between body-origin and
/// centre-of-mass inertia.
enum class ParallelAxis {
  kStandard,  ///< H_cm = H_o − m(|r|²I − r rᵀ)
  kPaper,     ///< H_cm = H_o − m r rᵀ (literal form, kept for comparison)
};

/// Inertia in matrix form. Construct with `make`, which derives inertia_cm
/// from inertia_body.
struct InertialMatrixForm {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia_body = Mat3::Zero();  // about the body origin
  Mat3 inertia_cm = Mat3::Zero();    // about the centre of mass, body axes

  static InertialMatrixForm make(double mass, const Vec3& com, const Mat3& inertia_body,
                                 ParallelAxis convention = ParallelAxis::kStandard);
};

/// [m, m·r_c, H_xx, H_yy, H_zz, H_xy, H_xz, H_yz] with H the body-origin
/// inertia. Newton–Euler is linear in these.
struct VectorParams {
  Vec10 values = Vec10::Zero();

  double mass() const { return values[0]; }
  Vec3 first_moment() const { return values.segment<3>(1); }
  Mat3 inertia_body() const;
};

/// Symmetric 4×4 [[½Tr(H)I − H, m r_c], [m r_cᵀ, m]].
struct PseudoInertia {
  Mat4 matrix = Mat4::Zero();
};

/// Parallel-axis offset term m(|r|²I − r rᵀ) (or m r rᵀ under kPaper).
Mat3 parallel_axis_term(double mass, const Vec3& com, ParallelAxis convention);

Mat3 body_inertia(const InertialParams& p);
Mat3 cm_inertia(const InertialParams& p, ParallelAxis convention = ParallelAxis::kStandard);

/// Eigendecomposition of the body-origin inertia. Eigenvalues are sorted in
/// descending order, eigenvector signs are fixed (first nonzero component
/// positive) and a reflection is repaired by negating the last axis.
InertialParams params_from_matrix(double mass, const Vec3& com, const Mat3& inertia_cm,
                                  ParallelAxis convention = ParallelAxis::kStandard);
InertialParams params_from_body_inertia(double mass, const Vec3& com, const Mat3& inertia_body);

InertialMatrixForm matrix_form(const InertialParams& p, ParallelAxis convention = ParallelAxis::kStandard);

PseudoInertia project_pseudo(double mass, const Vec3& com, const Mat3& inertia_body);
PseudoInertia project_pseudo(const InertialParams& p);
/// Also defined for m <= 0, where the other forms are not.
PseudoInertia project_pseudo(const VectorParams& v);
/// Inverse of project_pseudo; throws kDegenerateMass when the mass entry is 0.
InertialMatrixForm matrix_form_from_pseudo(const PseudoInertia& p);

/// Tr(proj(prior)⁻¹ proj(p)); throws kSingularPrior if proj(prior) is singular.
double geodesic_prior_value(const InertialParams& p, const InertialParams& prior);
double geodesic_prior_value(const PseudoInertia& p, const PseudoInertia& prior);

/// |4 − Tr(P_gt⁻¹ P_est)|
double inertial_error(const InertialParams& gt, const InertialParams& est);
double inertial_error(const PseudoInertia& gt, const PseudoInertia& est);

struct Violation {
  std::string constraint;  // "mass", "L_x", "L_y", "L_z" or "face_<i>"
  double margin = 0.0;     // positive amount by which the constraint is violated
};

/// Empty iff m > 0, L >= 0 componentwise and the CoM is inside every face.
std::vector<Violation> consistency_violations(const InertialParams& p, const ConvexHull& hull,
                                              double tol = ConvexHull::kContainmentTol);

VectorParams vectorize(const InertialParams& p);
VectorParams vectorize(const InertialMatrixForm& f);
/// Throws kDegenerateMass when m = 0 (r_c cannot be recovered).
InertialMatrixForm devectorize(const VectorParams& v, ParallelAxis convention = ParallelAxis::kStandard);

/// Printed inertia entries are often scaled for readability; these are the factors
/// between the stored SI value and the printed one.
inline constexpr double kSimInertiaDisplayScale = 1e2;
inline constexpr double kRealInertiaDisplayScale = 1e5;

/// Symmetric matrix from (xx, yy, zz, xy, xz, yz).
Mat3 symmetric_from_components(const Eigen::Matrix<double, 6, 1>& c);
Eigen::Matrix<double, 6, 1> symmetric_components(const Mat3& m);

}  // namespace objdyn
