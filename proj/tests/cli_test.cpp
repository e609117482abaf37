// Copyright 2026 The rpesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace rpesim::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST(Cli, ListPrintsSixScenarios) {
  const Result r = invoke({"list"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(count_lines(r.out), 6);
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) EXPECT_NE(line.find("Fig."), std::string::npos) << line;
  EXPECT_EQ(r.out.rfind("mzi_delayed_choice", 0), 0u);
  EXPECT_EQ(invoke({}).out, r.out);
  EXPECT_EQ(list_scenarios(), r.out);
}

TEST(Cli, MziSplitterOutText) {
  const Result r = invoke({"run", "mzi", "--bs", "out"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("P(C)=0.5 P(D)=0.5"), std::string::npos) << r.out;
}

TEST(Cli, HardyJson) {
  const Result r = invoke({"run", "hardy", "--format", "json"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("\"p_detector_d\": 0.125"), std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["concurrence"].get<double>(), 1.0, 1e-10);
}

TEST(Cli, UniteWithSamplingJson) {
  const Result r = invoke({"run", "rpe-coherent", "--erasure", "unite_and_spin", "--shots", "100000", "--seed", "42",
                           "--format", "json", "--deterministic"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["chsh"]["value"].get<double>(), 2 * std::sqrt(2.0), 1e-9);
  const double est = j["samples"]["chsh"]["value"].get<double>();
  const double sigma = j["samples"]["chsh"]["sigma"].get<double>();
  EXPECT_NEAR(est, 2 * std::sqrt(2.0), 5 * sigma);
  EXPECT_EQ(j["samples"]["seed"].get<int>(), 42);
  const Result again = invoke({"run", "rpe-coherent", "--erasure", "unite", "--shots", "100000", "--seed", "42",
                               "--format", "json", "--deterministic", "--threads", "3"});
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, ScenarioOption) {
  EXPECT_EQ(invoke({"run", "--scenario", "hardy"}).code, kExitOk);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({"run", "epr"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "hardy", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "hardy", "--erasure", "unite"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "mzi", "--bs", "sideways"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "rpe-incoherent", "--erasure", "position"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "two-source-ifm", "--p", "1.5"}).code, kExitUsage);
  const Result r = invoke({"run", "epr"});
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, PhysicsErrors) {
  EXPECT_EQ(invoke({"run", "rpe-incoherent", "--epsilon", "0"}).code, kExitPhysics);
}

TEST(Cli, ConfigFile) {
  const auto path = std::filesystem::temp_directory_path() / "rpesim_cli_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"scenario": "mzi_delayed_choice", "bs_present": false})";
  }
  const Result r = invoke({"run", "--config", path.string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("P(C)=0.5 P(D)=0.5"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_EQ(invoke({"run", "--config", path.string()}).code, kExitUsage);
}

}  // namespace
}  // namespace rpesim::cli
