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
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "objdyn/baseline.hpp"
#include "objdyn/error.hpp"
#include "objdyn/factor_graph.hpp"
#include "objdyn/friction.hpp"
#include "objdyn/io.hpp"
#include "objdyn/simulate.hpp"

using namespace objdyn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// A file may hold the object itself or a model wrapping it.
Json unwrap(const Json& j, const char* key) { return j.is_object() && j.contains(key) ? j.at(key) : j; }

Json load(const std::string& path) {
  try {
    return read_json_file(path);
  } catch (const Error& e) {
    throw Error(e.kind(), e.what());
  }
}

template <class F>
auto naming_file(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw Error(e.kind(), path + ": " + what);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kDataError, path + ": " + e.what());
  }
}

void ensure_writable(std::ofstream& out, const std::string& path) {
  if (!out) throw Error(ErrorKind::kDataError, "cannot write '" + path + "'");
}

struct SimulateArgs {
  std::string model, config, out;
  double noise_sigma2 = 0.0;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  RigidBodyModel model;
  naming_file(a.model, [&] {
    model = model_from_json(load(a.model));
    model.validate();
    return 0;
  });
  SimConfig config;
  if (!a.config.empty()) objdyn::apply(config, read_key_value_file(a.config));
  config.seed = a.seed;
  if (a.noise_sigma2 < 0.0) throw Error(ErrorKind::kUsage, "--noise-sigma2 must be non-negative");
  Trajectory traj = run_sim(model, config);
  if (a.noise_sigma2 > 0.0) traj = add_force_noise(traj, a.noise_sigma2, a.seed);
  write_trajectory_file(a.out, traj);
  std::cout << traj.size() << "\n";
  return 0;
}

struct EstimateArgs {
  std::string data, hull, method, prior, config, out, dataset, kinematics = "fd";
  bool smoothing = false;
};

int run_estimate(const EstimateArgs& a) {
  const bool baseline = a.method == "baseline";
  SolverConfig config;
  if (!a.config.empty()) objdyn::apply(config, read_key_value_file(a.config));
  if (!baseline) config.variant = parse_variant(a.method);
  if (!baseline && uses_prior(config.variant) && a.prior.empty()) {
    throw Error(ErrorKind::kUsage, "method " + a.method + " requires --prior");
  }
  const TrajectoryReadResult read = read_trajectory_file(a.data);
  for (const auto& w : read.warnings) std::cerr << "warning: " << a.data << ": " << w << "\n";
  const Trajectory& traj = read.trajectory;
  if (traj.size() < 3) {
    throw Error(ErrorKind::kUsage, a.data + ": at least 3 timesteps are required, got " + std::to_string(traj.size()));
  }
  const ConvexHull hull = naming_file(a.hull, [&] { return hull_from_json(unwrap(load(a.hull), "hull")); });
  const std::string dataset = a.dataset.empty() ? std::filesystem::path(a.data).stem().string() : a.dataset;

  Json report;
  if (baseline) {
    BaselineOptions options;
    options.smoothing = a.smoothing;
    options.velocity_log = config.velocity_log;
    if (a.kinematics == "exact") options.kinematics = KinematicsSource::kExact;
    else if (a.kinematics != "fd") throw Error(ErrorKind::kUsage, "--kinematics must be fd or exact");
    const auto start = std::chrono::steady_clock::now();
    const BaselineResult r = baseline_least_squares(traj, options);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report = baseline_report_to_json(r, dataset, wall);
    const double m_static = static_mass_estimate(traj);
    const double deviation = std::abs(r.params.mass() - m_static) / std::abs(m_static);
    report["mass_check"] = {{"static_mass", m_static}, {"relative_deviation", deviation}, {"flagged", deviation > 0.5}};
    if (deviation > 0.5) {
      std::cerr << "warning: estimated mass " << r.params.mass() << " kg deviates from the static balance estimate "
                << m_static << " kg by " << 100.0 * deviation << "%\n";
    }
  } else {
    std::optional<InertialParams> prior;
    if (!a.prior.empty()) prior = naming_file(a.prior, [&] { return params_from_json(unwrap(load(a.prior), "params")); });
    FactorGraph graph = build_graph(traj, hull, config, prior);
    const SolveReport r = solve(graph, config);
    report = report_to_json(r, dataset);
  }
  write_json_file(a.out, report);
  return 0;
}

struct FrictionArgs {
  double mu_true = 0.5;
  std::string servo_config, out, object_id = "sim";
  int trials = 10;
  std::uint64_t seed = 1;
};

int run_friction(const FrictionArgs& a) {
  if (a.trials < 1) throw Error(ErrorKind::kUsage, "--trials must be at least 1");
  ServoConfig servo;
  if (!a.servo_config.empty()) objdyn::apply(servo, read_key_value_file(a.servo_config));
  ContactSurface surface;
  surface.mu = a.mu_true;
  try {
    surface.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kUsage, e.what());
  }
  std::vector<FrictionTrial> trials;
  for (int k = 0; k < a.trials; ++k) {
    const SlipEvent ev = servo_until_slip(surface, servo, a.seed + static_cast<std::uint64_t>(k));
    if (!ev.slipped) throw Error(ErrorKind::kDataError, "trial " + std::to_string(k) + ": no slip before the servo limit");
    trials.push_back({a.object_id, k, a.mu_true, estimate_mu(ev.f_slip, surface.normal), ev.f_slip});
  }
  std::ofstream out(a.out);
  ensure_writable(out, a.out);
  write_friction_csv(out, trials);
  return 0;
}

struct EvalArgs {
  std::string gt, out;
  std::vector<std::string> reports;
};

int run_eval(const EvalArgs& a) {
  const InertialParams gt = naming_file(a.gt, [&] { return params_from_json(unwrap(load(a.gt), "params")); });
  std::vector<std::string> rows;
  for (const auto& path : a.reports) {
    rows.push_back(naming_file(path, [&] { return metrics_csv_row(metrics_from_report(load(path), gt)); }));
  }
  std::ofstream out(a.out);
  ensure_writable(out, a.out);
  out << metrics_csv_header() << "\n";
  for (const auto& r : rows) out << r << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object dynamics identification from grasp force and pose data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a grasped object and write a JSONL trajectory");
  s->add_option("--model", sim.model, "Model JSON (params, hull, attachments)")->required();
  s->add_option("--config", sim.config, "Simulation config (key = value)");
  s->add_option("--noise-sigma2", sim.noise_sigma2, "Force noise variance per axis [N^2]");
  s->add_option("--seed", sim.seed, "Noise seed");
  s->add_option("--out", sim.out, "Output JSONL")->required();

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate inertial parameters from a trajectory");
  e->add_option("--data", est.data, "Trajectory JSONL")->required();
  e->add_option("--hull", est.hull, "Hull JSON (or a model JSON)")->required();
  e->add_option("--method", est.method, "baseline | baseline-fg | no-c-no-g | c-no-g | c-plus-g")
      ->required()
      ->check(CLI::IsMember({"baseline", "baseline-fg", "no-c-no-g", "c-no-g", "c-plus-g"}));
  e->add_option("--prior", est.prior, "Prior params JSON (c-plus-g)");
  e->add_option("--config", est.config, "Solver config (key = value)");
  e->add_option("--dataset", est.dataset, "Dataset id written to the report");
  e->add_option("--kinematics", est.kinematics, "Baseline kinematics: fd | exact");
  e->add_flag("--smoothing", est.smoothing, "Savitzky-Golay smoothing for the baseline");
  e->add_option("--out", est.out, "Report JSON")->required();

  FrictionArgs fr;
  auto* f = app.add_subcommand("friction", "Estimate a friction coefficient by force-servo slip trials");
  f->add_option("--mu-true", fr.mu_true, "True friction coefficient")->required();
  f->add_option("--servo-config", fr.servo_config, "Servo config (key = value)");
  f->add_option("--trials", fr.trials, "Number of trials");
  f->add_option("--seed", fr.seed, "Base seed");
  f->add_option("--object-id", fr.object_id, "Object id written to the CSV");
  f->add_option("--out", fr.out, "Output CSV")->required();

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "Tabulate reports against ground truth");
  v->add_option("--gt", ev.gt, "Ground-truth params JSON (or a model JSON)")->required();
  v->add_option("--reports", ev.reports, "Report JSON files")->required();
  v->add_option("--out", ev.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*s) return run_simulate(sim);
    if (*e) return run_estimate(est);
    if (*f) return run_friction(fr);
    if (*v) return run_eval(ev);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    switch (err.kind()) {
      case ErrorKind::kUsage:
      case ErrorKind::kInvalidArgument:
        return kExitUsage;
      default:
        return kExitData;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
