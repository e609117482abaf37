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

#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rpesim/error.hpp"
#include "rpesim/experiments.hpp"
#include "rpesim/report_json.hpp"

namespace rpesim::cli {

std::string list_scenarios() {
  std::ostringstream os;
  for (Scenario s : kAllScenarios) {
    os << std::left << std::setw(26) << to_string(s) << describe(s) << '\n';
  }
  return os.str();
}

namespace {

struct RunOptions {
  std::string scenario_positional;
  std::string scenario_flag;
  std::optional<std::string> bs;
  std::optional<double> phase;
  std::optional<std::string> erasure;
  bool blocker = false;
  std::optional<double> p;
  std::optional<double> epsilon;
  std::optional<int> n_max;
  std::optional<std::string> prep;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string format = "text";
  bool deterministic = false;
  std::string config_path;
};

ExperimentConfig build_config(const RunOptions& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot read config file '" + o.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = config_from_json(buf.str());
  }

  if (!o.scenario_positional.empty() && !o.scenario_flag.empty() && o.scenario_positional != o.scenario_flag) {
    throw ConfigError("scenario given twice with different values");
  }
  const std::string name = o.scenario_flag.empty() ? o.scenario_positional : o.scenario_flag;
  if (!name.empty()) {
    auto s = parse_scenario(name);
    if (!s) throw ConfigError("unknown scenario '" + name + "'; try 'rpesim list'");
    cfg.scenario = *s;
  } else if (o.config_path.empty()) {
    throw ConfigError("no scenario given; try 'rpesim list'");
  }

  if (o.bs) cfg.bs_present = *o.bs == "in";
  if (o.phase) cfg.phase = *o.phase;
  if (o.erasure) {
    auto e = parse_erasure(*o.erasure);
    if (!e) throw ConfigError("unknown erasure mode '" + *o.erasure + "'");
    cfg.erasure = *e;
  }
  if (o.blocker) cfg.blocker_present = true;
  if (o.p) cfg.p = *o.p;
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  if (o.n_max) cfg.n_max = *o.n_max;
  if (o.prep) cfg.prep = parse_prep(*o.prep);
  if (o.shots || o.seed) {
    SampleConfig sc = cfg.sampling.value_or(SampleConfig{});
    if (o.shots) sc.shots = *o.shots;
    if (o.seed) sc.seed = *o.seed;
    if (!o.shots && !cfg.sampling) throw ConfigError("--seed needs --shots");
    cfg.sampling = sc;
  }
  if (cfg.sampling) cfg.sampling->threads = o.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-atom interference and heralded-entanglement simulator", "rpesim"};
  app.require_subcommand(0, 1);

  auto* list = app.add_subcommand("list", "List the available scenarios");
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and print its report");

  RunOptions o;
  run_cmd->add_option("name", o.scenario_positional, "Scenario name (see 'list')");
  run_cmd->add_option("--scenario", o.scenario_flag, "Scenario name (alternative to the positional)");
  run_cmd->add_option("--bs", o.bs, "Final beam splitter in or out")->check(CLI::IsMember({"in", "out"}));
  run_cmd->add_option("--phase", o.phase, "Arm or relative source phase in radians (default: scenario-specific)");
  run_cmd->add_option("--erasure", o.erasure, "Erasure mode for rpe_coherent")
      ->check(CLI::IsMember({"none", "position", "unite", "position_measurement", "unite_and_spin"}));
  run_cmd->add_flag("--blocker", o.blocker, "Place the absorber next to source v (two_source_ifm)");
  run_cmd->add_option("--p", o.p, "Weak-source single-photon amplitude");
  run_cmd->add_option("--epsilon", o.epsilon, "Weak excitation amplitude (rpe_incoherent)");
  run_cmd->add_option("--nmax", o.n_max, "Photon-number truncation")->check(CLI::IsMember({1, 2}));
  run_cmd->add_option("--prep", o.prep, "Atom preparation phase convention")
      ->check(CLI::IsMember({"eq1", "eq8", "up_phase_i", "down_phase_i"}));
  run_cmd->add_option("--shots", o.shots, "Monte Carlo shots")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", o.seed, "Sampler seed");
  run_cmd->add_option("--threads", o.threads, "Sampler worker threads")->check(CLI::Range(1u, 256u));
  run_cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  run_cmd->add_flag("--deterministic", o.deterministic, "Suppress the timestamp in JSON output");
  run_cmd->add_option("--config", o.config_path, "JSON file with the config block of a report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (list->parsed() || !run_cmd->parsed()) {
    out << list_scenarios();
    return kExitOk;
  }

  try {
    const ExperimentConfig cfg = build_config(o);
    const ExperimentReport report = run_experiment(cfg);
    if (o.format == "json") {
      out << report_to_json(report, JsonOptions{o.deterministic, 2}) << '\n';
    } else {
      out << report_to_text(report);
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "rpesim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PhysicsError& e) {
    err << "rpesim: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const std::exception& e) {
    err << "rpesim: internal error: " << e.what() << '\n';
    return kExitPhysics;
  }
}

}  // namespace rpesim::cli
