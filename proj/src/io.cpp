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

#include "objdyn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "objdyn/error.hpp"

namespace objdyn {

namespace {

[[noreturn]] void data_error(const std::string& what) { throw Error(ErrorKind::kDataError, what); }
[[noreturn]] void usage_error(const std::string& what) { throw Error(ErrorKind::kUsage, what); }

std::string vec_string(const double* v, int n) {
  std::string s = "[";
  for (int i = 0; i < n; ++i) {
    if (i > 0) s += ',';
    s += format_number(v[i]);
  }
  return s + "]";
}

std::string vec_string(const Vec3& v) { return vec_string(v.data(), 3); }

Vec3 vec3_from(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) data_error(what + ": expected a 3-vector");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) data_error(what + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) data_error(what + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key, const std::string& what) {
  const Json& v = field(j, key, what);
  if (!v.is_number()) data_error(what + ": field '" + key + "' must be a number");
  return v.get<double>();
}

Mat3 mat3_from(const Json& j, const std::string& what) {
  if (j.is_array() && j.size() == 6) {
    Eigen::Matrix<double, 6, 1> c;
    for (int i = 0; i < 6; ++i) c[i] = j[i].get<double>();
    return symmetric_from_components(c);
  }
  if (!j.is_array() || j.size() != 3) data_error(what + ": expected a 3x3 matrix or 6 components");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = vec3_from(j[r], what).transpose();
  return m;
}

Json mat3_json(const Mat3& m) {
  Json j = Json::array();
  for (int r = 0; r < 3; ++r) j.push_back(vec_json(m.row(r).transpose()));
  return j;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    usage_error("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    usage_error("config: '" + key + "' expects an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  usage_error("config: '" + key + "' expects true or false, got '" + value + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& value) {
  std::string s = value;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    std::string tok;
    if (!(in >> tok)) usage_error("config: '" + key + "' expects three numbers");
    v[i] = parse_double(key, tok);
  }
  std::string extra;
  if (in >> extra) usage_error("config: '" + key + "' expects three numbers");
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Trajectories

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  for (std::size_t t = 0; t < traj.samples.size(); ++t) {
    const auto& s = traj.samples[t];
    const Rotation& q = s.pose.pose.rotation;
    const Vec3& x = s.pose.pose.translation;
    const double pose[7] = {q.w(), q.x(), q.y(), q.z(), x.x(), x.y(), x.z()};
    std::string line = "{\"t\":" + std::to_string(t) + ",\"stamp\":" + format_number(s.pose.stamp) +
                       ",\"pose\":" + vec_string(pose, 7) + ",\"contacts\":[";
    for (std::size_t i = 0; i < s.contacts.size(); ++i) {
      const auto& c = s.contacts[i];
      if (i > 0) line += ',';
      line += "{\"id\":" + std::to_string(c.contact_id) + ",\"p\":" + vec_string(c.point) +
              ",\"f\":" + vec_string(c.force) + ",\"sigma\":" + format_number(c.force_sigma) + "}";
    }
    line += "]";
    if (s.truth) {
      line += ",\"truth\":{\"omega\":" + vec_string(s.truth->omega) +
              ",\"angular_accel\":" + vec_string(s.truth->angular_accel) +
              ",\"linear_velocity\":" + vec_string(s.truth->linear_velocity) +
              ",\"linear_accel\":" + vec_string(s.truth->linear_accel) + "}";
    }
    if (t == 0) {
      const auto& m = traj.metadata;
      line += ",\"meta\":{\"seed\":" + std::to_string(m.seed) + ",\"noise_sigma2\":" + format_number(m.noise_sigma2) +
              ",\"source\":" + Json(m.source).dump() + ",\"gravity\":" + vec_string(m.gravity) + "}";
    }
    line += "}\n";
    out << line;
  }
}

void write_trajectory_file(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kDataError, "cannot write '" + path + "'");
  write_trajectory(out, traj);
}

TrajectoryReadResult read_trajectory(std::istream& in) {
  TrajectoryReadResult result;
  Trajectory& traj = result.trajectory;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      data_error(where + ": " + e.what());
    }
    TrajectorySample s;
    s.pose.stamp = number(j, "stamp", where);
    const Json& pose = field(j, "pose", where);
    if (!pose.is_array() || pose.size() != 7) data_error(where + ": pose must have 7 entries");
    double p[7];
    for (int i = 0; i < 7; ++i) {
      if (!pose[i].is_number()) data_error(where + ": pose entries must be numbers");
      p[i] = pose[i].get<double>();
    }
    const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
    if (std::abs(norm - 1.0) > 1e-6) data_error(where + ": quaternion norm " + format_number(norm) + " is not 1");
    if (std::abs(norm - 1.0) > 1e-9) result.warnings.push_back(where + ": quaternion renormalized");
    s.pose.pose.rotation = Rotation(p[0], p[1], p[2], p[3]);
    s.pose.pose.translation = Vec3(p[4], p[5], p[6]);
    const Json& contacts = field(j, "contacts", where);
    if (!contacts.is_array()) data_error(where + ": contacts must be an array");
    for (const auto& c : contacts) {
      ContactObservation obs;
      const Json& id = field(c, "id", where);
      if (!id.is_number_integer()) data_error(where + ": contact id must be an integer");
      obs.contact_id = id.get<int>();
      obs.point = vec3_from(field(c, "p", where), where);
      obs.force = vec3_from(field(c, "f", where), where);
      obs.force_sigma = number(c, "sigma", where);
      s.contacts.push_back(obs);
    }
    if (j.contains("truth")) {
      const Json& tr = j.at("truth");
      s.truth = TrueKinematics{vec3_from(field(tr, "omega", where), where),
                               vec3_from(field(tr, "angular_accel", where), where),
                               vec3_from(field(tr, "linear_velocity", where), where),
                               vec3_from(field(tr, "linear_accel", where), where)};
    }
    if (j.contains("meta")) {
      const Json& m = j.at("meta");
      if (m.contains("seed")) traj.metadata.seed = m.at("seed").get<std::uint64_t>();
      if (m.contains("noise_sigma2")) traj.metadata.noise_sigma2 = m.at("noise_sigma2").get<double>();
      if (m.contains("source")) traj.metadata.source = m.at("source").get<std::string>();
      if (m.contains("gravity")) traj.metadata.gravity = vec3_from(m.at("gravity"), where);
    }
    if (!traj.samples.empty() && !(s.pose.stamp > traj.samples.back().pose.stamp)) {
      data_error(where + ": stamps must strictly increase");
    }
    traj.samples.push_back(std::move(s));
  }
  return result;
}

TrajectoryReadResult read_trajectory_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot read '" + path + "'");
  try {
    return read_trajectory(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON documents

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    data_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) data_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

InertialParams params_from_json(const Json& j) {
  const std::string what = "params";
  const double mass = number(j, "mass", what);
  const Vec3 com = vec3_from(field(j, "com", what), what);
  if (j.contains("L")) {
    InertialParams p;
    p.mass = mass;
    p.com = com;
    p.principal_moments = vec3_from(j.at("L"), what);
    if (j.contains("principal_rotation_quaternion")) {
      const Json& q = j.at("principal_rotation_quaternion");
      if (!q.is_array() || q.size() != 4) data_error(what + ": principal_rotation_quaternion must have 4 entries");
      p.principal_rotation = Rotation(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
    }
    return p;
  }
  if (j.contains("H_cm")) return params_from_matrix(mass, com, mat3_from(j.at("H_cm"), what));
  data_error(what + ": needs either L or H_cm");
}

Json params_to_json(const InertialParams& p) {
  const InertialMatrixForm f = matrix_form(p);
  const Rotation& r = p.principal_rotation;
  Json j;
  j["mass"] = p.mass;
  j["com"] = vec_json(p.com);
  j["L"] = vec_json(p.principal_moments);
  j["principal_rotation_quaternion"] = Json::array({r.w(), r.x(), r.y(), r.z()});
  j["H_cm"] = mat3_json(f.inertia_cm);
  j["H_body"] = mat3_json(f.inertia_body);
  return j;
}

ConvexHull hull_from_json(const Json& j) {
  if (j.contains("vertices")) {
    std::vector<Vec3> pts;
    for (const auto& v : j.at("vertices")) pts.push_back(vec3_from(v, "hull vertices"));
    return ConvexHull::from_vertices(pts);
  }
  if (j.contains("halfspaces")) {
    std::vector<Halfspace> hs;
    for (const auto& h : j.at("halfspaces")) hs.push_back({vec3_from(field(h, "n", "hull"), "hull"), number(h, "d", "hull")});
    return ConvexHull::from_halfspaces(std::move(hs));
  }
  data_error("hull: needs either vertices or halfspaces");
}

Json hull_to_json(const ConvexHull& hull) {
  Json hs = Json::array();
  for (const auto& h : hull.halfspaces()) hs.push_back({{"n", vec_json(h.normal)}, {"d", h.offset}});
  return Json{{"halfspaces", hs}};
}

RigidBodyModel model_from_json(const Json& j) {
  RigidBodyModel m;
  m.params = params_from_json(field(j, "params", "model"));
  m.hull = hull_from_json(field(j, "hull", "model"));
  for (const auto& a : field(j, "attachments", "model")) m.attachments.push_back(vec3_from(a, "model attachments"));
  return m;
}

Json model_to_json(const RigidBodyModel& m) {
  Json att = Json::array();
  for (const auto& a : m.attachments) att.push_back(vec_json(a));
  return Json{{"params", params_to_json(m.params)}, {"hull", hull_to_json(m.hull)}, {"attachments", att}};
}

// ---------------------------------------------------------------------------
// Key-value configs

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) usage_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) usage_error("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage_error("cannot read config '" + path + "'");
  return parse_key_values(in);
}

void apply(SolverConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "max_iterations") c.max_iterations = static_cast<int>(parse_integer(k, v));
    else if (k == "initial_damping") c.initial_damping = parse_double(k, v);
    else if (k == "damping_up") c.damping_up = parse_double(k, v);
    else if (k == "damping_down") c.damping_down = parse_double(k, v);
    else if (k == "tolerance") c.tolerance = parse_double(k, v);
    else if (k == "constraint_weight") c.constraint_weight = parse_double(k, v);
    else if (k == "constraint_tightening") c.constraint_tightening = parse_double(k, v);
    else if (k == "constraint_continuation") c.constraint_continuation = parse_bool(k, v);
    else if (k == "prior_weight") c.prior_weight = parse_double(k, v);
    else if (k == "variant") c.variant = parse_variant(v);
    else if (k == "jacobian") c.jacobian = parse_jacobian_mode(v);
    else if (k == "jacobian_step") c.jacobian_step = parse_double(k, v);
    else if (k == "pose_rotation_sigma") c.pose_rotation_sigma = parse_double(k, v);
    else if (k == "pose_translation_sigma") c.pose_translation_sigma = parse_double(k, v);
    else if (k == "contact_sigma") c.contact_sigma = parse_double(k, v);
    else if (k == "force_sigma_floor") c.force_sigma_floor = parse_double(k, v);
    else if (k == "dynamics_force_sigma") c.dynamics_force_sigma = parse_double(k, v);
    else if (k == "dynamics_torque_sigma") c.dynamics_torque_sigma = parse_double(k, v);
    else if (k == "measurement_weight_scale") c.measurement_weight_scale = parse_double(k, v);
    else if (k == "velocity_log") {
      if (v == "joint") c.velocity_log = VelocityLog::kJoint;
      else if (v == "decoupled") c.velocity_log = VelocityLog::kDecoupled;
      else usage_error("config: velocity_log must be joint or decoupled");
    } else usage_error("solver config: unknown key '" + k + "'");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    usage_error(e.what());
  }
}

void apply(SimConfig& c, const std::map<std::string, std::string>& kv) {
  ExcitationProfile& p = c.profile;
  for (const auto& [k, v] : kv) {
    if (k == "dt") c.dt = parse_double(k, v);
    else if (k == "sample_period") c.sample_period = parse_double(k, v);
    else if (k == "duration") c.duration = parse_double(k, v);
    else if (k == "gravity") c.gravity = parse_vec3(k, v);
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(parse_integer(k, v));
    else if (k == "amplitude_scale") p.amplitude_scale = parse_double(k, v);
    else if (k == "translation_amplitude") p.translation_amplitude = parse_vec3(k, v);
    else if (k == "translation_frequency") p.translation_frequency = parse_vec3(k, v);
    else if (k == "rotation_amplitude") p.rotation_amplitude = parse_vec3(k, v);
    else if (k == "rotation_frequency") p.rotation_frequency = parse_vec3(k, v);
    else if (k == "vibration_translation") p.vibration_translation = parse_vec3(k, v);
    else if (k == "vibration_rotation") p.vibration_rotation = parse_vec3(k, v);
    else if (k == "vibration_frequency") p.vibration_frequency = parse_double(k, v);
    else if (k == "squeeze_force") p.squeeze_force = parse_double(k, v);
    else usage_error("sim config: unknown key '" + k + "'");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    usage_error(e.what());
  }
}

void apply(ServoConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "initial_normal") c.initial_normal = parse_double(k, v);
    else if (k == "tangent") c.tangent = parse_double(k, v);
    else if (k == "decrement") c.decrement = parse_double(k, v);
    else if (k == "noise_sigma") c.noise_sigma = parse_double(k, v);
    else if (k == "max_steps") c.max_steps = static_cast<int>(parse_integer(k, v));
    else if (k == "min_normal") c.min_normal = parse_double(k, v);
    else usage_error("servo config: unknown key '" + k + "'");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    usage_error(e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports and metrics

Json report_to_json(const SolveReport& r, const std::string& dataset) {
  Json j;
  j["dataset"] = dataset;
  j["method"] = to_string(r.variant);
  if (r.params_valid) j["params"] = params_to_json(r.params);
  j["params_valid"] = r.params_valid;
  j["vector_params"] = std::vector<double>(r.vector_params.values.data(), r.vector_params.values.data() + 10);
  j["termination"] = to_string(r.termination);
  j["message"] = r.message;
  j["iterations"] = r.iterations;
  j["cost_trace"] = r.cost_trace;
  if (!r.warm_start_trace.empty()) j["warm_start_trace"] = r.warm_start_trace;
  if (!r.escalation_trace.empty()) j["escalation_trace"] = r.escalation_trace;
  if (r.constraints_checked) {
    Json v = Json::array();
    for (const auto& x : r.violations) v.push_back({{"constraint", x.constraint}, {"margin", x.margin}});
    j["constraints"] = {{"satisfied", r.constraints_satisfied}, {"escalated", r.escalated}, {"violations", v}};
  }
  Json poses = Json::array();
  for (const auto& p : r.values.poses) {
    poses.push_back({p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z(), p.translation.x(),
                     p.translation.y(), p.translation.z()});
  }
  Json forces = Json::array();
  for (std::size_t t = 0; t < r.values.forces.size(); ++t) {
    Json row = Json::array();
    for (std::size_t i = 0; i < r.values.forces[t].size(); ++i) {
      row.push_back({{"f", vec_json(r.values.forces[t][i])}, {"p", vec_json(r.values.contacts[t][i])}});
    }
    forces.push_back(row);
  }
  j["values"] = {{"poses", poses}, {"contacts", forces}};
  j["wall_time"] = r.wall_time;
  return j;
}

Json baseline_report_to_json(const BaselineResult& r, const std::string& dataset, double wall_time) {
  Json j;
  j["dataset"] = dataset;
  j["method"] = "baseline";
  const double m = r.params.mass();
  j["params_valid"] = m > 0.0;
  if (m > 0.0) {
    j["params"] = params_to_json(params_from_body_inertia(m, r.params.first_moment() / m, r.params.inertia_body()));
  }
  j["vector_params"] = std::vector<double>(r.params.values.data(), r.params.values.data() + 10);
  j["rank"] = r.rank;
  j["windows"] = r.windows;
  if (r.rank_deficient) j["warning"] = r.warning;
  j["wall_time"] = wall_time;
  return j;
}

MetricsRow metrics_from_report(const Json& report, const InertialParams& gt) {
  const std::string what = "report";
  MetricsRow row;
  row.dataset = report.value("dataset", "");
  const Json& method = field(report, "method", what);
  if (!method.is_string()) data_error(what + ": method must be a string");
  row.method = method.get<std::string>();
  static const char* kMethods[] = {"baseline", "baseline-fg", "no-c-no-g", "c-no-g", "c-plus-g"};
  if (std::find(std::begin(kMethods), std::end(kMethods), row.method) == std::end(kMethods)) {
    data_error(what + ": unknown method '" + row.method + "'");
  }
  const Json& v = field(report, "vector_params", what);
  if (!v.is_array() || v.size() != 10) data_error(what + ": vector_params must have 10 entries");
  for (int i = 0; i < 10; ++i) row.params.values[i] = v[i].get<double>();
  row.inertial_error = inertial_error(project_pseudo(gt), project_pseudo(row.params));
  row.wall_time = report.value("wall_time", 0.0);
  return row;
}

std::string metrics_csv_header() {
  return "dataset,method,m,cx,cy,cz,Hxx,Hyy,Hzz,Hxy,Hxz,Hyz,inertial_error,wall_time";
}

std::string metrics_csv_row(const MetricsRow& row) {
  const double m = row.params.mass();
  Vec3 com = Vec3::Constant(std::nan(""));
  Eigen::Matrix<double, 6, 1> h = Eigen::Matrix<double, 6, 1>::Constant(std::nan(""));
  if (m != 0.0) {
    const InertialMatrixForm f = devectorize(row.params);
    com = f.com;
    h = symmetric_components(f.inertia_cm);
  }
  std::string s = row.dataset + "," + row.method + "," + format_number(m);
  for (int i = 0; i < 3; ++i) s += "," + format_number(com[i]);
  for (int i = 0; i < 6; ++i) s += "," + format_number(h[i]);
  s += "," + format_number(row.inertial_error) + "," + format_number(row.wall_time);
  return s;
}

void write_friction_csv(std::ostream& out, const std::vector<FrictionTrial>& trials) {
  out << "object_id,trial,mu_true,mu_est,abs_error,fx,fy,fz\n";
  std::vector<double> errors;
  for (const auto& t : trials) {
    const double err = std::abs(t.mu_est - t.mu_true);
    errors.push_back(err);
    out << t.object_id << ',' << t.trial << ',' << format_number(t.mu_true) << ',' << format_number(t.mu_est) << ','
        << format_number(err) << ',' << format_number(t.f_slip.x()) << ',' << format_number(t.f_slip.y()) << ','
        << format_number(t.f_slip.z()) << '\n';
  }
  if (errors.empty()) return;
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  const double median = n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  out << (trials.front().object_id) << ",median," << format_number(trials.front().mu_true) << ",,"
      << format_number(median) << ",,,\n";
}

}  // namespace objdyn
