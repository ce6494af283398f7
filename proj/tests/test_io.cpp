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

#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "objdyn/error.hpp"
#include "objdyn/io.hpp"
#include "support.hpp"

using namespace objdyn;

namespace {

Trajectory short_sim(double sigma2 = 0.0) {
  SimConfig c;
  c.duration = 0.3;
  const Trajectory t = run_sim(objdyn::test::gt_model(), c);
  return sigma2 > 0 ? add_force_noise(t, sigma2, 9) : t;
}

std::string to_text(const Trajectory& t) {
  std::ostringstream os;
  write_trajectory(os, t);
  return os.str();
}

ErrorKind read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_trajectory(in);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kSingularPrior;  // sentinel: nothing thrown
}

const char* kLine0 =
    R"({"t":0,"stamp":0,"pose":[1,0,0,0,0,0,0],"contacts":[{"id":0,"p":[0,0,0],"f":[0,0,1],"sigma":0}]})";
const char* kLine1 =
    R"({"t":1,"stamp":0.01,"pose":[1,0,0,0,0,0,0],"contacts":[{"id":0,"p":[0,0,0],"f":[0,0,1],"sigma":0}]})";

}  // namespace

TEST(Jsonl, RoundTripIsByteIdentical) {
  for (double s2 : {0.0, 0.5}) {
    const std::string a = to_text(short_sim(s2));
    std::istringstream in(a);
    const TrajectoryReadResult r = read_trajectory(in);
    EXPECT_TRUE(r.warnings.empty());
    EXPECT_EQ(to_text(r.trajectory), a);
  }
}

TEST(Jsonl, RoundTripPreservesValues) {
  const Trajectory t = short_sim(0.25);
  std::istringstream in(to_text(t));
  const Trajectory u = read_trajectory(in).trajectory;
  ASSERT_EQ(u.size(), t.size());
  EXPECT_EQ(u.metadata.noise_sigma2, 0.25);
  EXPECT_EQ(u.metadata.gravity, t.metadata.gravity);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(u.samples[i].pose.stamp, t.samples[i].pose.stamp);
    EXPECT_EQ(u.samples[i].pose.pose.translation, t.samples[i].pose.pose.translation);
    ASSERT_EQ(u.samples[i].contacts.size(), 4u);
    EXPECT_EQ(u.samples[i].contacts[2].force, t.samples[i].contacts[2].force);
    ASSERT_TRUE(u.samples[i].truth.has_value());
    EXPECT_EQ(u.samples[i].truth->linear_accel, t.samples[i].truth->linear_accel);
  }
}

TEST(Jsonl, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(std::nan("")), "null");
}

TEST(Jsonl, ReadErrors) {
  const std::string ok = std::string(kLine0) + "\n" + kLine1 + "\n";
  {
    std::istringstream in(ok + "\n");
    EXPECT_EQ(read_trajectory(in).trajectory.size(), 2u);
  }
  EXPECT_EQ(read_error(std::string(kLine0) + "\n{not json\n"), ErrorKind::kDataError);
  EXPECT_EQ(read_error(std::string(kLine1) + "\n" + kLine0 + "\n"), ErrorKind::kDataError);
  EXPECT_EQ(read_error(R"({"t":0,"stamp":0,"contacts":[]})"), ErrorKind::kDataError);
  EXPECT_EQ(read_error(R"({"t":0,"stamp":0,"pose":[1.1,0,0,0,0,0,0],"contacts":[]})"), ErrorKind::kDataError);
  EXPECT_EQ(read_error(R"({"t":0,"stamp":0,"pose":[1,0,0],"contacts":[]})"), ErrorKind::kDataError);
}

TEST(Jsonl, SmallQuaternionDriftIsRenormalisedWithWarning) {
  std::istringstream in(R"({"t":0,"stamp":0,"pose":[1.0000001,0,0,0,0,0,0],"contacts":[]})");
  const TrajectoryReadResult r = read_trajectory(in);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.trajectory.samples[0].pose.pose.rotation.w(), 1.0);
}

TEST(Jsonl, MissingFileIsDataError) {
  try {
    read_trajectory_file("/nonexistent/x.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDataError);
  }
}

TEST(ParamsJson, ManifoldRoundTrip) {
  objdyn::test::Gen gen(301);
  for (int i = 0; i < 50; ++i) {
    const InertialParams p = gen.consistent_params(objdyn::test::gt_hull());
    const InertialParams q = params_from_json(Json::parse(params_to_json(p).dump()));
    EXPECT_EQ(q.mass, p.mass);
    EXPECT_EQ(q.com, p.com);
    EXPECT_EQ(q.principal_moments, p.principal_moments);
    EXPECT_LT((q.principal_rotation.matrix() - p.principal_rotation.matrix()).norm(), 1e-15);
  }
}

TEST(ParamsJson, MatrixFormsAgree) {
  const Json six = Json::parse(R"({"mass":1.3,"com":[0.2,0.5,0.1],
      "H_cm":[0.4015,0.1292,0.4799,-0.1297,-0.0259,-0.0649]})");
  const Json full = Json::parse(R"({"mass":1.3,"com":[0.2,0.5,0.1],
      "H_cm":[[0.4015,-0.1297,-0.0259],[-0.1297,0.1292,-0.0649],[-0.0259,-0.0649,0.4799]]})");
  const PseudoInertia a = project_pseudo(params_from_json(six));
  const PseudoInertia b = project_pseudo(params_from_json(full));
  const PseudoInertia gt = project_pseudo(objdyn::test::gt_params());
  EXPECT_LT((a.matrix - b.matrix).norm(), 1e-14);
  EXPECT_LT((a.matrix - gt.matrix).norm(), 1e-12);
}

TEST(ParamsJson, RejectsMalformed) {
  EXPECT_THROW(params_from_json(Json::parse(R"({"mass":1})")), Error);
  EXPECT_THROW(params_from_json(Json::parse(R"({"mass":1,"com":[0,0],"H_cm":[1,1,1,0,0,0]})")), Error);
  EXPECT_THROW(params_from_json(Json::parse(R"([1,2,3])")), Error);
}

TEST(HullJson, BothFormsRoundTrip) {
  const ConvexHull h = objdyn::test::gt_hull();
  const ConvexHull a = hull_from_json(hull_to_json(h));
  EXPECT_EQ(a.halfspaces().size(), h.halfspaces().size());
  Json hs;
  for (const auto& s : h.halfspaces()) hs["halfspaces"].push_back({{"n", {s.normal.x(), s.normal.y(), s.normal.z()}}, {"d", s.offset}});
  const ConvexHull b = hull_from_json(hs);
  EXPECT_TRUE(b.contains(Vec3(0.2, 0.5, 0.1)));
  EXPECT_FALSE(b.contains(Vec3(0.5, 0.5, 0.1)));
  EXPECT_THROW(hull_from_json(Json::parse(R"({"vertices":[[0,0,0],[1,0,0]]})")), Error);
}

TEST(ModelJson, RoundTrip) {
  const RigidBodyModel m = objdyn::test::gt_model();
  const RigidBodyModel n = model_from_json(Json::parse(model_to_json(m).dump()));
  EXPECT_EQ(n.attachments.size(), 4u);
  EXPECT_EQ(n.attachments[1], m.attachments[1]);
  EXPECT_EQ(n.params.mass, m.params.mass);
}

TEST(KeyValues, ParseAndApply) {
  std::istringstream in("# comment\nduration = 2.5\n\ngravity = 0, 0, -9.8  # trailing\nseed=4\n");
  const auto kv = parse_key_values(in);
  SimConfig c;
  objdyn::apply(c, kv);
  EXPECT_EQ(c.duration, 2.5);
  EXPECT_EQ(c.gravity, Vec3(0, 0, -9.8));
  EXPECT_EQ(c.seed, 4u);
}

TEST(KeyValues, Errors) {
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kSingularPrior;  // sentinel: nothing thrown
  };
  EXPECT_EQ(kind([] {
              std::istringstream in("no equals sign\n");
              parse_key_values(in);
            }),
            ErrorKind::kUsage);
  EXPECT_EQ(kind([] {
              SolverConfig c;
              objdyn::apply(c, {{"bogus", "1"}});
            }),
            ErrorKind::kUsage);
  EXPECT_EQ(kind([] {
              SolverConfig c;
              objdyn::apply(c, {{"max_iterations", "many"}});
            }),
            ErrorKind::kUsage);
  EXPECT_EQ(kind([] {
              ServoConfig c;
              objdyn::apply(c, {{"decrement", "-1"}});
            }),
            ErrorKind::kUsage);
}

TEST(Metrics, ReportRowAndCsv) {
  const InertialParams gt = objdyn::test::gt_params();
  Json report;
  report["dataset"] = "d";
  report["method"] = "c-no-g";
  const VectorParams v = vectorize(gt);
  report["vector_params"] = std::vector<double>(v.values.data(), v.values.data() + 10);
  report["wall_time"] = 1.5;
  const MetricsRow row = metrics_from_report(report, gt);
  EXPECT_LT(row.inertial_error, 1e-12);
  const std::string csv = metrics_csv_row(row);
  EXPECT_EQ(csv.rfind("d,c-no-g,1.3,", 0), 0u);
  const std::string header = metrics_csv_header();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), ','), std::count(header.begin(), header.end(), ','));
  report["method"] = "other";
  EXPECT_THROW(metrics_from_report(report, gt), Error);
  report.erase("vector_params");
  report["method"] = "c-no-g";
  EXPECT_THROW(metrics_from_report(report, gt), Error);
}

TEST(Metrics, FrictionCsv) {
  std::vector<FrictionTrial> trials;
  for (int k = 0; k < 3; ++k) trials.push_back({"obj", k, 0.5, 0.5 - 0.125 * k, Vec3(1, 0, 2)});
  std::ostringstream os;
  write_friction_csv(os, trials);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("object_id,trial,mu_true,mu_est,abs_error,fx,fy,fz\n", 0), 0u);
  EXPECT_NE(s.find("obj,median,0.5,,0.125,,,\n"), std::string::npos);
}
