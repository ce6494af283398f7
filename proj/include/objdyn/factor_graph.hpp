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

#include <array>
#include <compare>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "objdyn/hull.hpp"
#include "objdyn/inertial.hpp"
#include "objdyn/trajectory.hpp"

namespace objdyn {

enum class VariableKind { kPose, kForce, kContact, kInertial };

struct VariableId {
  VariableKind kind = VariableKind::kPose;
  int timestep = -1;  // -1 for the inertial variable
  int contact = -1;   // force/contact only

  static VariableId pose(int t) { return {VariableKind::kPose, t, -1}; }
  static VariableId force(int t, int i) { return {VariableKind::kForce, t, i}; }
  static VariableId contact_point(int t, int i) { return {VariableKind::kContact, t, i}; }
  static VariableId inertial() { return {VariableKind::kInertial, -1, -1}; }

  auto operator<=>(const VariableId&) const = default;
};

/// Local (tangent) dimension of a variable kind.
int local_dimension(VariableKind kind);

enum class Variant {
  kBaselineFg,  ///< vector parameters, no consistency or prior
  kNoCNoG,      ///< manifold parameters, no consistency or prior
  kCNoG,        ///< manifold parameters + consistency hinge
  kCPlusG,      ///< manifold parameters + consistency hinge + geodesic prior
};
Variant parse_variant(const std::string& name);
std::string to_string(Variant v);
bool uses_constraints(Variant v);
bool uses_prior(Variant v);
bool uses_vector_params(Variant v);

enum class JacobianMode { kNumeric, kAnalyticWhereAvailable };
JacobianMode parse_jacobian_mode(const std::string& name);
std::string to_string(JacobianMode m);

struct SolverConfig {
  int max_iterations = 200;
  double initial_damping = 1e-4;
  double damping_up = 10.0;
  double damping_down = 10.0;
  double tolerance = 1e-9;  // on relative cost decrease
  double constraint_weight = 1e4;
  double constraint_tightening = 1e-6;
  bool constraint_continuation = true;  // solve without the hinge first, then with it
  double prior_weight = 1.0;
  Variant variant = Variant::kCNoG;
  JacobianMode jacobian = JacobianMode::kAnalyticWhereAvailable;
  double jacobian_step = 1e-6;

  double pose_rotation_sigma = 1e-3;     // rad
  double pose_translation_sigma = 1e-3;  // m
  double contact_sigma = 2e-3;           // m
  double force_sigma_floor = 1e-3;       // N
  double dynamics_force_sigma = 1.0;     // N
  double dynamics_torque_sigma = 1.0;    // N·m
  double measurement_weight_scale = 1.0;  // multiplies every M-factor square-root weight
  VelocityLog velocity_log = VelocityLog::kJoint;

  /// Throws kInvalidArgument on non-positive entries.
  void validate() const;
};

/// The inertial variable in either manifold or vector form.
struct InertialValue {
  bool vector_form = false;
  InertialParams manifold;
  VectorParams vector;

  VectorParams as_vector() const { return vector_form ? vector : vectorize(manifold); }
};

/// Assignment of every variable in a graph.
class Values {
 public:
  std::vector<Pose> poses;
  std::vector<std::vector<Vec3>> forces;    // [timestep][contact]
  std::vector<std::vector<Vec3>> contacts;  // [timestep][contact]
  InertialValue inertial;

  using Value = std::variant<Pose, Vec3, InertialValue>;
  Value get(const VariableId& id) const;
  void set(const VariableId& id, const Value& v);
  /// Replaces the variable by its retraction along `delta`.
  void retract(const VariableId& id, const Eigen::Ref<const Eigen::VectorXd>& delta);
};

/// Right retraction X·exp(δ).
Pose retract(const Pose& x, const Eigen::Ref<const Eigen::VectorXd>& delta);
Vec3 retract(const Vec3& x, const Eigen::Ref<const Eigen::VectorXd>& delta);
/// Mass, CoM and L by addition; rotation by R·exp(δ_rot). δ = [m, com, L, rot].
InertialParams retract(const InertialParams& p, const Eigen::Ref<const Eigen::VectorXd>& delta);
VectorParams retract(const VectorParams& v, const Eigen::Ref<const Eigen::VectorXd>& delta);

enum class FactorKind { kPoseMeasurement, kForceMeasurement, kContactMeasurement, kDynamics, kConstraint, kPrior };
std::string to_string(FactorKind k);

/// A whitened residual r(x) over a fixed set of variables; the cost is |r|².
class Factor {
 public:
  virtual ~Factor() = default;
  virtual FactorKind kind() const = 0;
  virtual int dimension() const = 0;
  const std::vector<VariableId>& keys() const { return keys_; }
  virtual Eigen::VectorXd residual(const Values& values) const = 0;
  /// One block per key. The default is the numeric Jacobian.
  virtual std::vector<Eigen::MatrixXd> jacobians(Values& values, JacobianMode mode, double step) const;

 protected:
  std::vector<VariableId> keys_;
};

/// Central differences in local coordinates via retract; the variables are
/// perturbed in place and restored. Returns one block per key.
std::vector<Eigen::MatrixXd> numeric_jacobian_blocks(const Factor& factor, Values& values, double step);
/// The blocks concatenated horizontally in key order.
Eigen::MatrixXd numeric_jacobian(const Factor& factor, Values& values, double step);

class PoseMeasurementFactor : public Factor {
 public:
  PoseMeasurementFactor(int t, const Pose& measured, double rot_sigma, double trans_sigma);
  FactorKind kind() const override { return FactorKind::kPoseMeasurement; }
  int dimension() const override { return 6; }
  Eigen::VectorXd residual(const Values& values) const override;

 private:
  Pose measured_;
  Vec6 weight_;
};

/// Euclidean 3-vector measurement (forces or contact points).
class PointMeasurementFactor : public Factor {
 public:
  PointMeasurementFactor(const VariableId& id, const Vec3& measured, double sigma);
  FactorKind kind() const override;
  int dimension() const override { return 3; }
  Eigen::VectorXd residual(const Values& values) const override;
  std::vector<Eigen::MatrixXd> jacobians(Values& values, JacobianMode mode, double step) const override;

 private:
  Vec3 measured_;
  double weight_;
};

/// Newton–Euler wrench residual for window (t−2, t−1, t) with the contacts of t−2.
/// Keys: pose(t−2), pose(t−1), pose(t), force/contact pairs of t−2, inertial.
class DynamicsFactor : public Factor {
 public:
  DynamicsFactor(int t, int contacts, const Vec3& world_gravity, double force_sigma, double torque_sigma,
                 VelocityLog mode, const std::array<double, 3>& stamps);
  FactorKind kind() const override { return FactorKind::kDynamics; }
  int dimension() const override { return 6; }
  Eigen::VectorXd residual(const Values& values) const override;
  std::vector<Eigen::MatrixXd> jacobians(Values& values, JacobianMode mode, double step) const override;

 private:
  int t_;
  int contacts_;
  Vec3 gravity_;
  Vec6 weight_;
  VelocityLog mode_;
  std::array<double, 3> stamps_;

  KinematicWindow window(const Values& values) const;
};

/// Hinge penalty on m > 0, L >= 0 and CoM inside each hull face.
class ConstraintFactor : public Factor {
 public:
  ConstraintFactor(const ConvexHull& hull, double weight, double tightening);
  FactorKind kind() const override { return FactorKind::kConstraint; }
  int dimension() const override;
  Eigen::VectorXd residual(const Values& values) const override;
  void set_weight(double w) { weight_ = w; }
  double weight() const { return weight_; }

 private:
  ConvexHull hull_;
  double weight_;
  double tightening_;
};

/// √w · (Tr(P₀⁻¹ P) − 4), zero at the prior.
class GeodesicPriorFactor : public Factor {
 public:
  GeodesicPriorFactor(const InertialParams& prior, double weight);
  FactorKind kind() const override { return FactorKind::kPrior; }
  int dimension() const override { return 1; }
  Eigen::VectorXd residual(const Values& values) const override;

 private:
  Mat4 prior_inverse_;
  double sqrt_weight_;
};

/// Each component = weight · max(0, violation margin + tightening), ordered
/// mass, L_x, L_y, L_z, then one per hull face.
Eigen::VectorXd constraint_residual(const InertialParams& p, const ConvexHull& hull, double weight,
                                    double tightening = 0.0);

struct FactorGraph {
  std::vector<std::unique_ptr<Factor>> factors;
  Values initial;
  ConvexHull hull;
  Variant variant = Variant::kCNoG;
  std::size_t timesteps = 0;

  std::size_t count(FactorKind kind) const;
  /// Variables in elimination order: forces/contacts, poses, inertial.
  std::vector<VariableId> ordering() const;
  double cost(const Values& values) const;
};

/// Default seed for the inertial variable: m = 0.1, CoM at the hull centroid,
/// L = 1e-4, identity rotation.
InertialParams default_initial_params(const ConvexHull& hull);

/// Throws kDataError for fewer than 3 timesteps; kUsage if c-plus-g lacks a prior.
FactorGraph build_graph(const Trajectory& traj, const ConvexHull& hull, const SolverConfig& config,
                        const std::optional<InertialParams>& prior = std::nullopt);

enum class Termination { kConverged, kMaxIterations, kNonConvergence };
std::string to_string(Termination t);

struct SolveReport {
  Variant variant = Variant::kCNoG;
  InertialParams params;       // manifold estimate (derived by eigendecomposition for baseline-fg)
  VectorParams vector_params;  // vector estimate
  bool params_valid = true;    // false if the vector estimate has m <= 0
  Values values;
  std::vector<double> cost_trace;  // initial cost, then one entry per accepted step
  std::vector<double> warm_start_trace;  // hinge-free phase, if run
  std::vector<double> escalation_trace;  // re-solve with the raised hinge weight, if run
  Termination termination = Termination::kConverged;
  std::string message;
  int iterations = 0;
  double wall_time = 0.0;  // s
  bool constraints_checked = false;
  bool constraints_satisfied = true;
  bool escalated = false;
  std::vector<Violation> violations;
};

/// Hinge tolerance of the post-solve consistency check.
inline constexpr double kConstraintCheckTolerance = 1e-6;

/// Levenberg–Marquardt on the graph. `init` overrides the graph's initial
/// inertial value when given.
SolveReport solve(FactorGraph& graph, const SolverConfig& config,
                  const std::optional<InertialValue>& init = std::nullopt);

}  // namespace objdyn
