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

#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "objdyn/error.hpp"
#include "objdyn/factor_graph.hpp"

namespace objdyn {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIterations: return "max-iterations";
    case Termination::kNonConvergence: return "non-convergence";
  }
  return "";
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Ldlt = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>>;

constexpr double kMaxDamping = 1e16;
constexpr double kDiagonalFloor = 1e-12;

// Column offsets of every variable in the elimination order.
class Layout {
 public:
  explicit Layout(const FactorGraph& g) {
    const Values& v = g.initial;
    int offset = 0;
    point_offset_.resize(v.forces.size());
    for (std::size_t t = 0; t < v.forces.size(); ++t) {
      for (std::size_t i = 0; i < v.forces[t].size(); ++i) {
        point_offset_[t].push_back(offset);
        offset += 6;
      }
    }
    for (std::size_t t = 0; t < v.poses.size(); ++t) {
      pose_offset_.push_back(offset);
      offset += 6;
    }
    inertial_offset_ = offset;
    size_ = offset + 10;
    order_ = g.ordering();
  }

  int offset(const VariableId& id) const {
    switch (id.kind) {
      case VariableKind::kPose: return pose_offset_[id.timestep];
      case VariableKind::kForce: return point_offset_[id.timestep][id.contact];
      case VariableKind::kContact: return point_offset_[id.timestep][id.contact] + 3;
      case VariableKind::kInertial: return inertial_offset_;
    }
    return 0;
  }
  int size() const { return size_; }
  const std::vector<VariableId>& order() const { return order_; }

 private:
  std::vector<std::vector<int>> point_offset_;
  std::vector<int> pose_offset_;
  int inertial_offset_ = 0;
  int size_ = 0;
  std::vector<VariableId> order_;
};

struct Linearization {
  SparseMatrix hessian;  // JᵀJ, lower triangle
  Eigen::VectorXd gradient;  // Jᵀr
};

Linearization linearize(const FactorGraph& g, Values& values, const Layout& layout, const SolverConfig& config) {
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  for (int i = 0; i < layout.size(); ++i) triplets.emplace_back(i, i, 0.0);
  for (const auto& f : g.factors) {
    const Eigen::VectorXd r = f->residual(values);
    const auto blocks = f->jacobians(values, config.jacobian, config.jacobian_step);
    const auto& keys = f->keys();
    std::vector<int> offsets(keys.size());
    for (std::size_t a = 0; a < keys.size(); ++a) offsets[a] = layout.offset(keys[a]);
    for (std::size_t a = 0; a < keys.size(); ++a) {
      grad.segment(offsets[a], blocks[a].cols()) += blocks[a].transpose() * r;
      for (std::size_t b = 0; b < keys.size(); ++b) {
        if (offsets[b] > offsets[a]) continue;
        const Eigen::MatrixXd h = blocks[a].transpose() * blocks[b];
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
          for (Eigen::Index j = 0; j < h.cols(); ++j) {
            const int row = offsets[a] + static_cast<int>(i);
            const int col = offsets[b] + static_cast<int>(j);
            if (row >= col) triplets.emplace_back(row, col, h(i, j));
          }
        }
      }
    }
  }
  Linearization lin;
  lin.hessian.resize(layout.size(), layout.size());
  lin.hessian.setFromTriplets(triplets.begin(), triplets.end());
  lin.gradient = std::move(grad);
  return lin;
}

void retract_all(Values& values, const Layout& layout, const Eigen::VectorXd& delta) {
  for (const auto& id : layout.order()) {
    values.retract(id, delta.segment(layout.offset(id), local_dimension(id.kind)));
  }
}

struct LmOutcome {
  Termination termination = Termination::kMaxIterations;
  std::string message;
  int iterations = 0;
};

LmOutcome levenberg_marquardt(const FactorGraph& g, Values& values, const SolverConfig& config,
                              std::vector<double>& trace) {
  const Layout layout(g);
  double cost = g.cost(values);
  if (!std::isfinite(cost)) throw Error(ErrorKind::kDataError, "solve: non-finite residual at the initial values");
  trace.push_back(cost);

  Linearization lin = linearize(g, values, layout, config);
  Ldlt ldlt;
  ldlt.analyzePattern(lin.hessian);
  double lambda = config.initial_damping;
  LmOutcome out;
  bool last_failure_singular = false;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    out.iterations = iter + 1;
    if (cost == 0.0) {
      out.termination = Termination::kConverged;
      out.message = "zero cost";
      return out;
    }
    SparseMatrix damped = lin.hessian;
    for (int i = 0; i < layout.size(); ++i) {
      damped.coeffRef(i, i) += lambda * (lin.hessian.coeff(i, i) + kDiagonalFloor);
    }
    ldlt.factorize(damped);
    Eigen::VectorXd delta;
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      delta = ldlt.solve(-lin.gradient);
      ok = delta.allFinite();
    }
    double new_cost = std::numeric_limits<double>::infinity();
    Values candidate;
    if (ok) {
      candidate = values;
      retract_all(candidate, layout, delta);
      new_cost = g.cost(candidate);
    }
    last_failure_singular = !ok;
    if (ok && std::isfinite(new_cost) && new_cost < cost) {
      const double relative = (cost - new_cost) / cost;
      values = std::move(candidate);
      cost = new_cost;
      trace.push_back(cost);
      lambda = std::max(lambda / config.damping_down, 1e-12);
      if (relative < config.tolerance) {
        out.termination = Termination::kConverged;
        out.message = "relative decrease below tolerance";
        return out;
      }
      lin = linearize(g, values, layout, config);
    } else {
      lambda *= config.damping_up;
      if (lambda > kMaxDamping) {
        if (last_failure_singular) {
          out.termination = Termination::kNonConvergence;
          out.message = "normal equations singular at maximum damping";
        } else {
          out.termination = Termination::kConverged;
          out.message = "no decrease at maximum damping";
        }
        return out;
      }
    }
  }
  out.termination = Termination::kMaxIterations;
  out.message = "maximum iterations reached";
  return out;
}

ConstraintFactor* find_constraint(FactorGraph& g) {
  for (auto& f : g.factors) {
    if (auto* c = dynamic_cast<ConstraintFactor*>(f.get())) return c;
  }
  return nullptr;
}

}  // namespace

SolveReport solve(FactorGraph& graph, const SolverConfig& config, const std::optional<InertialValue>& init) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.variant = graph.variant;
  Values values = graph.initial;
  if (init) {
    if (init->vector_form != graph.initial.inertial.vector_form) {
      throw Error(ErrorKind::kInvalidArgument, "solve: initial value form does not match the variant");
    }
    if (!init->as_vector().values.allFinite()) throw Error(ErrorKind::kInvalidArgument, "solve: non-finite init");
    values.inertial = *init;
  }

  ConstraintFactor* constraint = uses_constraints(graph.variant) ? find_constraint(graph) : nullptr;
  int iterations = 0;
  if (constraint != nullptr && config.constraint_continuation) {
    const double w = constraint->weight();
    constraint->set_weight(0.0);
    const LmOutcome warm = levenberg_marquardt(graph, values, config, report.warm_start_trace);
    constraint->set_weight(w);
    iterations += warm.iterations;
  }

  LmOutcome outcome = levenberg_marquardt(graph, values, config, report.cost_trace);
  iterations += outcome.iterations;

  if (uses_constraints(graph.variant)) {
    report.constraints_checked = true;
    report.violations = consistency_violations(values.inertial.manifold, graph.hull, kConstraintCheckTolerance);
    if (!report.violations.empty() && constraint != nullptr) {
      const double w = constraint->weight();
      constraint->set_weight(100.0 * w);
      report.escalated = true;
      outcome = levenberg_marquardt(graph, values, config, report.escalation_trace);
      iterations += outcome.iterations;
      constraint->set_weight(w);
      report.violations = consistency_violations(values.inertial.manifold, graph.hull, kConstraintCheckTolerance);
    }
    report.constraints_satisfied = report.violations.empty();
  }

  report.termination = outcome.termination;
  report.message = outcome.message;
  if (report.constraints_checked && !report.constraints_satisfied) {
    report.message += "; consistency post-check failed";
  }
  report.iterations = iterations;
  if (values.inertial.vector_form) {
    report.vector_params = values.inertial.vector;
    const double m = report.vector_params.mass();
    report.params_valid = m > 0.0;
    if (report.params_valid) {
      report.params = params_from_body_inertia(m, report.vector_params.first_moment() / m,
                                               report.vector_params.inertia_body());
    }
  } else {
    report.params = values.inertial.manifold;
    report.vector_params = vectorize(report.params);
  }
  report.values = std::move(values);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace objdyn
