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

#include "objdyn/factor_graph.hpp"

#include <cmath>

#include <Eigen/LU>

#include "objdyn/error.hpp"

namespace objdyn {

int local_dimension(VariableKind kind) {
  switch (kind) {
    case VariableKind::kPose: return 6;
    case VariableKind::kForce:
    case VariableKind::kContact: return 3;
    case VariableKind::kInertial: return 10;
  }
  return 0;
}

Variant parse_variant(const std::string& name) {
  if (name == "baseline-fg") return Variant::kBaselineFg;
  if (name == "no-c-no-g") return Variant::kNoCNoG;
  if (name == "c-no-g") return Variant::kCNoG;
  if (name == "c-plus-g") return Variant::kCPlusG;
  throw Error(ErrorKind::kInvalidArgument, "unknown variant '" + name + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kBaselineFg: return "baseline-fg";
    case Variant::kNoCNoG: return "no-c-no-g";
    case Variant::kCNoG: return "c-no-g";
    case Variant::kCPlusG: return "c-plus-g";
  }
  return "";
}

bool uses_constraints(Variant v) { return v == Variant::kCNoG || v == Variant::kCPlusG; }
bool uses_prior(Variant v) { return v == Variant::kCPlusG; }
bool uses_vector_params(Variant v) { return v == Variant::kBaselineFg; }

JacobianMode parse_jacobian_mode(const std::string& name) {
  if (name == "numeric") return JacobianMode::kNumeric;
  if (name == "analytic-where-available") return JacobianMode::kAnalyticWhereAvailable;
  throw Error(ErrorKind::kInvalidArgument, "unknown jacobian mode '" + name + "'");
}

std::string to_string(JacobianMode m) {
  return m == JacobianMode::kNumeric ? "numeric" : "analytic-where-available";
}

std::string to_string(FactorKind k) {
  switch (k) {
    case FactorKind::kPoseMeasurement: return "pose";
    case FactorKind::kForceMeasurement: return "force";
    case FactorKind::kContactMeasurement: return "contact";
    case FactorKind::kDynamics: return "dynamics";
    case FactorKind::kConstraint: return "constraint";
    case FactorKind::kPrior: return "prior";
  }
  return "";
}

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidArgument, std::string("solver config: ") + name + " must be positive");
    }
  };
  if (max_iterations <= 0) throw Error(ErrorKind::kInvalidArgument, "solver config: max_iterations must be positive");
  positive(initial_damping, "initial_damping");
  positive(damping_up, "damping_up");
  positive(damping_down, "damping_down");
  positive(tolerance, "tolerance");
  positive(constraint_weight, "constraint_weight");
  positive(prior_weight, "prior_weight");
  positive(jacobian_step, "jacobian_step");
  positive(pose_rotation_sigma, "pose_rotation_sigma");
  positive(pose_translation_sigma, "pose_translation_sigma");
  positive(contact_sigma, "contact_sigma");
  positive(force_sigma_floor, "force_sigma_floor");
  positive(dynamics_force_sigma, "dynamics_force_sigma");
  positive(dynamics_torque_sigma, "dynamics_torque_sigma");
  positive(measurement_weight_scale, "measurement_weight_scale");
  if (constraint_tightening < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "solver config: constraint_tightening must be non-negative");
  }
}

// ---------------------------------------------------------------------------
// Retractions and values

namespace {

void check_size(const Eigen::Ref<const Eigen::VectorXd>& delta, Eigen::Index n, const char* what) {
  if (delta.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, std::string("retract: ") + what + " expects a " + std::to_string(n) +
                                                   "-vector, got " + std::to_string(delta.size()));
  }
}

}  // namespace

Pose retract(const Pose& x, const Eigen::Ref<const Eigen::VectorXd>& delta) {
  check_size(delta, 6, "pose");
  return x * exp_pose(Vec6(delta));
}

Vec3 retract(const Vec3& x, const Eigen::Ref<const Eigen::VectorXd>& delta) {
  check_size(delta, 3, "point");
  return x + delta;
}

InertialParams retract(const InertialParams& p, const Eigen::Ref<const Eigen::VectorXd>& delta) {
  check_size(delta, 10, "inertial");
  InertialParams out;
  out.mass = p.mass + delta[0];
  out.com = p.com + delta.segment<3>(1);
  out.principal_moments = p.principal_moments + delta.segment<3>(4);
  out.principal_rotation = p.principal_rotation * exp_rotation(delta.segment<3>(7));
  return out;
}

VectorParams retract(const VectorParams& v, const Eigen::Ref<const Eigen::VectorXd>& delta) {
  check_size(delta, 10, "vector inertial");
  VectorParams out;
  out.values = v.values + delta;
  return out;
}

Values::Value Values::get(const VariableId& id) const {
  switch (id.kind) {
    case VariableKind::kPose: return poses.at(id.timestep);
    case VariableKind::kForce: return forces.at(id.timestep).at(id.contact);
    case VariableKind::kContact: return contacts.at(id.timestep).at(id.contact);
    case VariableKind::kInertial: return inertial;
  }
  return inertial;
}

void Values::set(const VariableId& id, const Value& v) {
  switch (id.kind) {
    case VariableKind::kPose: poses.at(id.timestep) = std::get<Pose>(v); break;
    case VariableKind::kForce: forces.at(id.timestep).at(id.contact) = std::get<Vec3>(v); break;
    case VariableKind::kContact: contacts.at(id.timestep).at(id.contact) = std::get<Vec3>(v); break;
    case VariableKind::kInertial: inertial = std::get<InertialValue>(v); break;
  }
}

void Values::retract(const VariableId& id, const Eigen::Ref<const Eigen::VectorXd>& delta) {
  switch (id.kind) {
    case VariableKind::kPose: {
      Pose& x = poses.at(id.timestep);
      x = objdyn::retract(x, delta);
      break;
    }
    case VariableKind::kForce: {
      Vec3& f = forces.at(id.timestep).at(id.contact);
      f = objdyn::retract(f, delta);
      break;
    }
    case VariableKind::kContact: {
      Vec3& p = contacts.at(id.timestep).at(id.contact);
      p = objdyn::retract(p, delta);
      break;
    }
    case VariableKind::kInertial:
      if (inertial.vector_form) {
        inertial.vector = objdyn::retract(inertial.vector, delta);
      } else {
        inertial.manifold = objdyn::retract(inertial.manifold, delta);
      }
      break;
  }
}

// ---------------------------------------------------------------------------
// Factors

std::vector<Eigen::MatrixXd> numeric_jacobian_blocks(const Factor& factor, Values& values, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::kInvalidArgument, "numeric_jacobian: step must be positive");
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(factor.keys().size());
  for (const auto& key : factor.keys()) {
    const int n = local_dimension(key.kind);
    Eigen::MatrixXd j(factor.dimension(), n);
    const Values::Value saved = values.get(key);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < n; ++c) {
      delta[c] = step;
      values.retract(key, delta);
      const Eigen::VectorXd plus = factor.residual(values);
      values.set(key, saved);
      delta[c] = -step;
      values.retract(key, delta);
      const Eigen::VectorXd minus = factor.residual(values);
      values.set(key, saved);
      delta[c] = 0.0;
      j.col(c) = (plus - minus) / (2.0 * step);
    }
    blocks.push_back(std::move(j));
  }
  return blocks;
}

Eigen::MatrixXd numeric_jacobian(const Factor& factor, Values& values, double step) {
  const auto blocks = numeric_jacobian_blocks(factor, values, step);
  Eigen::Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Eigen::MatrixXd out(factor.dimension(), cols);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    out.middleCols(c, b.cols()) = b;
    c += b.cols();
  }
  return out;
}

std::vector<Eigen::MatrixXd> Factor::jacobians(Values& values, JacobianMode, double step) const {
  return numeric_jacobian_blocks(*this, values, step);
}

PoseMeasurementFactor::PoseMeasurementFactor(int t, const Pose& measured, double rot_sigma, double trans_sigma)
    : measured_(measured) {
  keys_ = {VariableId::pose(t)};
  weight_ << Vec3::Constant(1.0 / rot_sigma), Vec3::Constant(1.0 / trans_sigma);
}

Eigen::VectorXd PoseMeasurementFactor::residual(const Values& values) const {
  const Pose& x = values.poses[keys_[0].timestep];
  return weight_.cwiseProduct(log_pose(relative_pose(measured_, x)));
}

PointMeasurementFactor::PointMeasurementFactor(const VariableId& id, const Vec3& measured, double sigma)
    : measured_(measured), weight_(1.0 / sigma) {
  if (id.kind != VariableKind::kForce && id.kind != VariableKind::kContact) {
    throw Error(ErrorKind::kInvalidArgument, "point measurement: key must be a force or contact");
  }
  keys_ = {id};
}

FactorKind PointMeasurementFactor::kind() const {
  return keys_[0].kind == VariableKind::kForce ? FactorKind::kForceMeasurement : FactorKind::kContactMeasurement;
}

Eigen::VectorXd PointMeasurementFactor::residual(const Values& values) const {
  const auto& k = keys_[0];
  const Vec3& x = k.kind == VariableKind::kForce ? values.forces[k.timestep][k.contact]
                                                 : values.contacts[k.timestep][k.contact];
  return weight_ * (x - measured_);
}

std::vector<Eigen::MatrixXd> PointMeasurementFactor::jacobians(Values& values, JacobianMode mode,
                                                               double step) const {
  if (mode == JacobianMode::kNumeric) return numeric_jacobian_blocks(*this, values, step);
  return {Eigen::MatrixXd(weight_ * Mat3::Identity())};
}

DynamicsFactor::DynamicsFactor(int t, int contacts, const Vec3& world_gravity, double force_sigma,
                               double torque_sigma, VelocityLog mode, const std::array<double, 3>& stamps)
    : t_(t), contacts_(contacts), gravity_(world_gravity), mode_(mode), stamps_(stamps) {
  if (t < 2) throw Error(ErrorKind::kInvalidArgument, "dynamics factor: needs two earlier timesteps");
  weight_ << Vec3::Constant(1.0 / force_sigma), Vec3::Constant(1.0 / torque_sigma);
  keys_ = {VariableId::pose(t - 2), VariableId::pose(t - 1), VariableId::pose(t)};
  for (int i = 0; i < contacts; ++i) {
    keys_.push_back(VariableId::force(t - 2, i));
    keys_.push_back(VariableId::contact_point(t - 2, i));
  }
  keys_.push_back(VariableId::inertial());
}

KinematicWindow DynamicsFactor::window(const Values& values) const {
  return window_kinematics(TimedPose{values.poses[t_ - 2], stamps_[0]}, TimedPose{values.poses[t_ - 1], stamps_[1]},
                           TimedPose{values.poses[t_], stamps_[2]}, mode_);
}

Eigen::VectorXd DynamicsFactor::residual(const Values& values) const {
  const KinematicWindow k = window(values);
  const Vec10 theta = values.inertial.as_vector().values;
  Vec6 r = newton_euler_regressor(k, gravity_in_frame(gravity_, k.frame_pose)) * theta;
  const auto& f = values.forces[t_ - 2];
  const auto& p = values.contacts[t_ - 2];
  for (int i = 0; i < contacts_; ++i) {
    r.head<3>() -= f[i];
    r.tail<3>() -= p[i].cross(f[i]);
  }
  return weight_.cwiseProduct(r);
}

std::vector<Eigen::MatrixXd> DynamicsFactor::jacobians(Values& values, JacobianMode mode, double step) const {
  if (mode == JacobianMode::kNumeric) return numeric_jacobian_blocks(*this, values, step);
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(keys_.size());
  const Vec10 theta = values.inertial.as_vector().values;
  const auto w = weight_.asDiagonal();

  // Pose blocks: the window kinematics have no closed-form derivative here.
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd b(6, 6);
    Pose& x = values.poses[t_ - 2 + j];
    const Pose saved = x;
    Vec6 delta = Vec6::Zero();
    for (int c = 0; c < 6; ++c) {
      delta[c] = step;
      x = saved * exp_pose(delta);
      KinematicWindow k = window(values);
      const Vec6 plus = newton_euler_regressor(k, gravity_in_frame(gravity_, k.frame_pose)) * theta;
      delta[c] = -step;
      x = saved * exp_pose(delta);
      k = window(values);
      const Vec6 minus = newton_euler_regressor(k, gravity_in_frame(gravity_, k.frame_pose)) * theta;
      delta[c] = 0.0;
      b.col(c) = w * ((plus - minus) / (2.0 * step));
    }
    x = saved;
    blocks.push_back(std::move(b));
  }

  const auto& f = values.forces[t_ - 2];
  const auto& p = values.contacts[t_ - 2];
  for (int i = 0; i < contacts_; ++i) {
    Eigen::Matrix<double, 6, 3> jf;
    jf << -Mat3::Identity(), -skew(p[i]);
    Eigen::Matrix<double, 6, 3> jp;
    jp << Mat3::Zero(), skew(f[i]);
    blocks.emplace_back(w * jf);
    blocks.emplace_back(w * jp);
  }

  const KinematicWindow k = window(values);
  const Eigen::Matrix<double, 6, 10> y = newton_euler_regressor(k, gravity_in_frame(gravity_, k.frame_pose));
  if (values.inertial.vector_form) {
    blocks.emplace_back(w * y);
  } else {
    // Chain rule through the manifold-to-vector map.
    const InertialParams& p0 = values.inertial.manifold;
    Eigen::Matrix<double, 10, 10> dv;
    Vec10 delta = Vec10::Zero();
    for (int c = 0; c < 10; ++c) {
      delta[c] = step;
      const Vec10 plus = vectorize(retract(p0, delta)).values;
      delta[c] = -step;
      const Vec10 minus = vectorize(retract(p0, delta)).values;
      delta[c] = 0.0;
      dv.col(c) = (plus - minus) / (2.0 * step);
    }
    blocks.emplace_back(w * y * dv);
  }
  return blocks;
}

Eigen::VectorXd constraint_residual(const InertialParams& p, const ConvexHull& hull, double weight,
                                    double tightening) {
  const auto& hs = hull.halfspaces();
  Eigen::VectorXd r(4 + static_cast<Eigen::Index>(hs.size()));
  auto hinge = [&](double margin) { return weight * std::max(0.0, margin + tightening); };
  r[0] = hinge(-p.mass);
  for (int i = 0; i < 3; ++i) r[1 + i] = hinge(-p.principal_moments[i]);
  for (std::size_t i = 0; i < hs.size(); ++i) r[4 + static_cast<Eigen::Index>(i)] = hinge(hs[i].margin(p.com));
  return r;
}

ConstraintFactor::ConstraintFactor(const ConvexHull& hull, double weight, double tightening)
    : hull_(hull), weight_(weight), tightening_(tightening) {
  keys_ = {VariableId::inertial()};
}

int ConstraintFactor::dimension() const { return 4 + static_cast<int>(hull_.halfspaces().size()); }

Eigen::VectorXd ConstraintFactor::residual(const Values& values) const {
  if (values.inertial.vector_form) {
    throw Error(ErrorKind::kInvalidArgument, "constraint factor: requires the manifold inertial form");
  }
  return constraint_residual(values.inertial.manifold, hull_, weight_, tightening_);
}

GeodesicPriorFactor::GeodesicPriorFactor(const InertialParams& prior, double weight)
    : sqrt_weight_(std::sqrt(weight)) {
  const PseudoInertia p0 = project_pseudo(prior);
  geodesic_prior_value(p0, p0);  // throws on a singular prior
  prior_inverse_ = Eigen::FullPivLU<Mat4>(p0.matrix).inverse();
  keys_ = {VariableId::inertial()};
}

Eigen::VectorXd GeodesicPriorFactor::residual(const Values& values) const {
  const PseudoInertia p = project_pseudo(values.inertial.as_vector());
  Eigen::VectorXd r(1);
  r[0] = sqrt_weight_ * ((prior_inverse_ * p.matrix).trace() - 4.0);
  return r;
}

// ---------------------------------------------------------------------------
// Graph

std::size_t FactorGraph::count(FactorKind kind) const {
  std::size_t n = 0;
  for (const auto& f : factors) n += f->kind() == kind ? 1 : 0;
  return n;
}

std::vector<VariableId> FactorGraph::ordering() const {
  std::vector<VariableId> out;
  for (std::size_t t = 0; t < initial.forces.size(); ++t) {
    for (std::size_t i = 0; i < initial.forces[t].size(); ++i) {
      out.push_back(VariableId::force(static_cast<int>(t), static_cast<int>(i)));
      out.push_back(VariableId::contact_point(static_cast<int>(t), static_cast<int>(i)));
    }
  }
  for (std::size_t t = 0; t < initial.poses.size(); ++t) out.push_back(VariableId::pose(static_cast<int>(t)));
  out.push_back(VariableId::inertial());
  return out;
}

double FactorGraph::cost(const Values& values) const {
  double c = 0.0;
  for (const auto& f : factors) c += f->residual(values).squaredNorm();
  return c;
}

InertialParams default_initial_params(const ConvexHull& hull) {
  InertialParams p;
  p.mass = 0.1;
  p.com = hull.centroid();
  p.principal_moments = Vec3::Constant(1e-4);
  p.principal_rotation = Rotation::identity();
  return p;
}

FactorGraph build_graph(const Trajectory& traj, const ConvexHull& hull, const SolverConfig& config,
                        const std::optional<InertialParams>& prior) {
  config.validate();
  if (traj.size() < 3) throw Error(ErrorKind::kDataError, "build_graph: at least 3 timesteps required");
  traj.validate();
  if (uses_prior(config.variant) && !prior) {
    throw Error(ErrorKind::kUsage, "build_graph: variant c-plus-g requires a prior");
  }

  FactorGraph g;
  g.hull = hull;
  g.variant = config.variant;
  g.timesteps = traj.size();
  const double s = config.measurement_weight_scale;

  Values& v = g.initial;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& sample = traj.samples[t];
    const int ti = static_cast<int>(t);
    v.poses.push_back(sample.pose.pose);
    g.factors.push_back(std::make_unique<PoseMeasurementFactor>(ti, sample.pose.pose, config.pose_rotation_sigma / s,
                                                                config.pose_translation_sigma / s));
    std::vector<Vec3> f, p;
    for (std::size_t i = 0; i < sample.contacts.size(); ++i) {
      const auto& c = sample.contacts[i];
      const int ii = static_cast<int>(i);
      f.push_back(c.force);
      p.push_back(c.point);
      g.factors.push_back(std::make_unique<PointMeasurementFactor>(
          VariableId::force(ti, ii), c.force, std::max(c.force_sigma, config.force_sigma_floor) / s));
      g.factors.push_back(std::make_unique<PointMeasurementFactor>(VariableId::contact_point(ti, ii), c.point,
                                                                   config.contact_sigma / s));
    }
    v.forces.push_back(std::move(f));
    v.contacts.push_back(std::move(p));
  }
  for (std::size_t t = 2; t < traj.size(); ++t) {
    const std::array<double, 3> stamps{traj.samples[t - 2].pose.stamp, traj.samples[t - 1].pose.stamp,
                                       traj.samples[t].pose.stamp};
    g.factors.push_back(std::make_unique<DynamicsFactor>(
        static_cast<int>(t), static_cast<int>(traj.samples[t - 2].contacts.size()), traj.metadata.gravity,
        config.dynamics_force_sigma, config.dynamics_torque_sigma, config.velocity_log, stamps));
  }
  if (uses_constraints(config.variant)) {
    g.factors.push_back(std::make_unique<ConstraintFactor>(hull, config.constraint_weight, config.constraint_tightening));
  }
  if (uses_prior(config.variant)) {
    g.factors.push_back(std::make_unique<GeodesicPriorFactor>(*prior, config.prior_weight));
  }

  const InertialParams seed = default_initial_params(hull);
  v.inertial.vector_form = uses_vector_params(config.variant);
  v.inertial.manifold = seed;
  v.inertial.vector = vectorize(seed);
  return g;
}

}  // namespace objdyn
