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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "objdyn/io.hpp"
#include "support.hpp"

using namespace objdyn;
namespace fs = std::filesystem;

namespace {

const std::string kCli = OBJDYN_CLI;
const std::string kData = OBJDYN_DATA_DIR;

class Cli : public ::testing::Test {
 protected:
  fs::path dir;

  void SetUp() override {
    dir = fs::temp_directory_path() / ("objdyn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd = kCli + " " + args + " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  void simulate(const std::string& out, double seconds, double sigma2 = 0.0, int seed = 1) const {
    write("sim.cfg", "duration = " + std::to_string(seconds) + "\n");
    ASSERT_EQ(run("simulate --model " + kData + "/model.json --config " + path("sim.cfg") + " --noise-sigma2 " +
                  std::to_string(sigma2) + " --seed " + std::to_string(seed) + " --out " + path(out)),
              0)
        << read("stderr.txt");
  }
};

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, SimulateIsDeterministicAndSized) {
  ASSERT_EQ(run("simulate --model " + kData + "/model.json --config " + kData + "/sim.cfg --noise-sigma2 0 --seed 1 --out " +
                path("a.jsonl")),
            0);
  EXPECT_NE(read("stdout.txt").find("1000"), std::string::npos);
  simulate("b.jsonl", 10.0);
  const std::string a = read("a.jsonl");
  EXPECT_EQ(line_count(a), 1000u);
  EXPECT_EQ(a, read("b.jsonl"));
}

TEST_F(Cli, SimulateNoiseVariance) {
  simulate("clean.jsonl", 5.0);
  simulate("noisy.jsonl", 5.0, 1.0, 4);
  const Trajectory a = read_trajectory_file(path("clean.jsonl")).trajectory;
  const Trajectory b = read_trajectory_file(path("noisy.jsonl")).trajectory;
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t c = 0; c < a.samples[i].contacts.size(); ++c) {
      const Vec3 d = b.samples[i].contacts[c].force - a.samples[i].contacts[c].force;
      for (int k = 0; k < 3; ++k, ++n) {
        sum += d[k];
        sq += d[k] * d[k];
      }
    }
  }
  const double mean = sum / n, var = sq / n - mean * mean;
  EXPECT_NEAR(var, 1.0, 0.1);
}

TEST_F(Cli, SimulateRejectsInvalidInputs) {
  write("bad.cfg", "duration = -1\n");
  EXPECT_EQ(run("simulate --model " + kData + "/model.json --config " + path("bad.cfg") + " --noise-sigma2 0 --seed 1 --out " +
                path("x.jsonl")),
            1);
  write("model.json", R"({"params":{"mass":-1,"com":[0,0,0],"H_cm":[1,1,1,0,0,0]}})");
  EXPECT_NE(run("simulate --model " + path("model.json") + " --noise-sigma2 0 --seed 1 --out " + path("x.jsonl")), 0);
  EXPECT_FALSE(read("stderr.txt").empty());
}

TEST_F(Cli, EstimateConstrainedRecoversMass) {
  simulate("d.jsonl", 3.0);
  ASSERT_EQ(run("estimate --data " + path("d.jsonl") + " --hull " + kData + "/model.json --method c-no-g --out " +
                path("r.json")),
            0)
      << read("stderr.txt");
  const Json r = read_json_file(path("r.json"));
  EXPECT_EQ(r.at("method"), "c-no-g");
  EXPECT_NEAR(r.at("params").at("mass").get<double>(), 1.3, 0.013);
  EXPECT_TRUE(r.at("params").contains("H_cm"));
  EXPECT_TRUE(r.at("params").contains("L"));
  EXPECT_FALSE(r.at("cost_trace").empty());
}

TEST_F(Cli, BaselineFlagsMassError) {
  simulate("d.jsonl", 3.0);
  ASSERT_EQ(run("estimate --data " + path("d.jsonl") + " --hull " + kData + "/model.json --method baseline --out " +
                path("r.json")),
            0);
  const Json r = read_json_file(path("r.json"));
  EXPECT_TRUE(r.at("mass_check").at("flagged").get<bool>());
  EXPECT_GT(std::abs(r.at("vector_params")[0].get<double>() - 1.3) / 1.3, 0.5);
  EXPECT_NE(read("stderr.txt").find("mass"), std::string::npos);
}

TEST_F(Cli, EstimateUsageErrors) {
  simulate("d.jsonl", 0.5);
  EXPECT_EQ(run("estimate --data " + path("d.jsonl") + " --hull " + kData + "/model.json --method c-plus-g --out " +
                path("r.json")),
            1);
  const std::string full = read("d.jsonl");
  write("short.jsonl", full.substr(0, full.find('\n', full.find('\n') + 1) + 1));
  EXPECT_EQ(run("estimate --data " + path("short.jsonl") + " --hull " + kData + "/model.json --method c-no-g --out " +
                path("r.json")),
            1);
  EXPECT_EQ(run("estimate --data " + path("d.jsonl") + " --hull " + kData + "/model.json --method magic --out " +
                path("r.json")),
            1);
  write("broken.jsonl", "{\n");
  EXPECT_EQ(run("estimate --data " + path("broken.jsonl") + " --hull " + kData + "/model.json --method c-no-g --out " +
                path("r.json")),
            2);
}

TEST_F(Cli, FrictionTrials) {
  ASSERT_EQ(run("friction --mu-true 0.5 --servo-config " + kData + "/servo.cfg --trials 10 --seed 1 --out " + path("f.csv")), 0);
  std::istringstream csv(read("f.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (cells[1] == "median") break;
    ++rows;
    const double est = std::stod(cells[3]);
    EXPECT_LE(est, 0.5 + 1e-12);
    EXPECT_GE(est, 3.0 / (3.0 / 0.5 + 0.01) - 1e-12);
  }
  EXPECT_EQ(rows, 10);

  write("noisy.cfg", "noise_sigma = 0.02\n");
  ASSERT_EQ(run("friction --mu-true 0.5 --servo-config " + path("noisy.cfg") + " --trials 10 --seed 1 --out " + path("g.csv")), 0);
  const std::string g = read("g.csv");
  const std::size_t at = g.find(",median,");
  ASSERT_NE(at, std::string::npos);
  const std::string tail = g.substr(at + 8);
  const double median = std::stod(tail.substr(tail.find(",,") + 2));
  EXPECT_LT(median, 0.02);

  EXPECT_EQ(run("friction --mu-true 0.5 --servo-config " + kData + "/servo.cfg --trials 0 --seed 1 --out " + path("h.csv")), 1);
  write("bad.cfg", "decrement = 0\n");
  EXPECT_EQ(run("friction --mu-true 0.5 --servo-config " + path("bad.cfg") + " --trials 3 --seed 1 --out " + path("h.csv")), 1);
}

TEST_F(Cli, EvalReplaysReferenceRow) {
  Eigen::Matrix<double, 6, 1> c;
  c << 1.76, -0.79, 1.88, 0.15, -0.29, -0.29;
  const Vec3 com(0.086, 0.419, 0.068);
  const Mat3 h_cm = symmetric_from_components(c / kSimInertiaDisplayScale);
  const VectorParams row = vectorize(InertialMatrixForm::make(0.073, com, h_cm + parallel_axis_term(0.073, com, ParallelAxis::kStandard)));
  const VectorParams gt = vectorize(objdyn::test::gt_params());
  Json a{{"dataset", "reference"}, {"method", "baseline"}, {"vector_params", std::vector<double>(row.values.data(), row.values.data() + 10)}};
  Json b{{"dataset", "reference"}, {"method", "c-no-g"}, {"vector_params", std::vector<double>(gt.values.data(), gt.values.data() + 10)}};
  write_json_file(path("a.json"), a);
  write_json_file(path("b.json"), b);
  ASSERT_EQ(run("eval --gt " + kData + "/gt_params.json --reports " + path("a.json") + " " + path("b.json") + " --out " + path("m.csv")), 0)
      << read("stderr.txt");
  std::istringstream csv(read("m.csv"));
  std::string header, first, second;
  std::getline(csv, header);
  std::getline(csv, first);
  std::getline(csv, second);
  EXPECT_EQ(header, metrics_csv_header());
  auto error_of = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    return std::stod(cells.at(12));
  };
  EXPECT_NEAR(error_of(first), 4.247384079832377, 1e-9);
  EXPECT_LT(error_of(second), 1e-12);

  write("bad.json", "{oops");
  EXPECT_EQ(run("eval --gt " + kData + "/gt_params.json --reports " + path("a.json") + " " + path("bad.json") + " --out " + path("m.csv")), 2);
  EXPECT_NE(read("stderr.txt").find("bad.json"), std::string::npos);
}
