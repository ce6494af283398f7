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

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "objdyn/baseline.hpp"
#include "objdyn/factor_graph.hpp"
#include "objdyn/friction.hpp"
#include "objdyn/simulate.hpp"

namespace objdyn {

using Json = nlohmann::ordered_json;

/// %.17g; non-finite values are written as null.
std::string format_number(double v);

/// One record per line: t, stamp, pose [qw,qx,qy,qz,tx,ty,tz], contacts
/// [{id, p, f, sigma}], optional truth. The first line also carries "meta".
void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory_file(const std::string& path, const Trajectory& traj);

struct TrajectoryReadResult {
  Trajectory trajectory;
  std::vector<std::string> warnings;
};
/// Throws kDataError on malformed lines, quaternions off unit norm by more than
/// 1e-6, or non-increasing stamps. Norm errors above 1e-9 are renormalized with a warning.
TrajectoryReadResult read_trajectory(std::istream& in);
TrajectoryReadResult read_trajectory_file(const std::string& path);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// {mass, com, L, principal_rotation_quaternion} or {mass, com, H_cm}; H_cm
/// may be a 3×3 array or six components (xx, yy, zz, xy, xz, yz).
InertialParams params_from_json(const Json& j);
/// Manifold form plus H_cm and H_body.
Json params_to_json(const InertialParams& p);

/// {"vertices": [[x,y,z], ...]} or {"halfspaces": [{"n": [..], "d": ..}, ...]}.
ConvexHull hull_from_json(const Json& j);
Json hull_to_json(const ConvexHull& hull);

/// {"params": {...}, "hull": {...}, "attachments": [[x,y,z], ...]}.
RigidBodyModel model_from_json(const Json& j);
Json model_to_json(const RigidBodyModel& m);

/// Flat key = value text; '#' starts a comment. Throws kUsage on malformed lines.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> read_key_value_file(const std::string& path);

/// Apply keys to a config; unknown keys and bad values throw kUsage.
void apply(SolverConfig& c, const std::map<std::string, std::string>& kv);
void apply(SimConfig& c, const std::map<std::string, std::string>& kv);
void apply(ServoConfig& c, const std::map<std::string, std::string>& kv);

Json report_to_json(const SolveReport& r, const std::string& dataset);
Json baseline_report_to_json(const BaselineResult& r, const std::string& dataset, double wall_time);

struct MetricsRow {
  std::string dataset;
  std::string method;
  VectorParams params;
  double inertial_error = 0.0;
  double wall_time = 0.0;
};
/// Builds a metrics row from a report JSON; throws kDataError if fields are missing.
MetricsRow metrics_from_report(const Json& report, const InertialParams& gt);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);

struct FrictionTrial {
  std::string object_id;
  int trial = 0;
  double mu_true = 0.0;
  double mu_est = 0.0;
  Vec3 f_slip = Vec3::Zero();
};
/// Header, one row per trial, then a "median" row carrying the median abs error.
void write_friction_csv(std::ostream& out, const std::vector<FrictionTrial>& trials);

}  // namespace objdyn
