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

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rpesim/atoms.hpp"
#include "rpesim/fockspace.hpp"
#include "rpesim/measurement.hpp"
#include "rpesim/optics.hpp"
#include "rpesim/sampling.hpp"

namespace rpesim {

enum class Scenario {
  mzi_delayed_choice,
  two_source_interference,
  two_source_ifm,
  hardy,
  rpe_coherent,
  rpe_incoherent,
};

inline constexpr std::array<Scenario, 6> kAllScenarios{
    Scenario::mzi_delayed_choice, Scenario::two_source_interference, Scenario::two_source_ifm,
    Scenario::hardy,              Scenario::rpe_coherent,            Scenario::rpe_incoherent,
};

std::string_view to_string(Scenario s);
// Accepts the canonical names, dashes in place of underscores, and "mzi".
std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view describe(Scenario s);

enum class ErasureMode { none, position_measurement, unite_and_spin };

std::string_view to_string(ErasureMode m);
// Accepts the canonical names plus "position" and "unite".
std::optional<ErasureMode> parse_erasure(std::string_view name);

struct ExperimentConfig {
  Scenario scenario = Scenario::hardy;
  bool bs_present = true;
  // Arm phase (MZI, Hardy) or relative source phase. Unset means 0 for the
  // MZI, Hardy and the incoherent scheme, and the auto-tuned dark-port phase
  // for the two-source scenarios and rpe_coherent.
  std::optional<double> phase;
  ErasureMode erasure = ErasureMode::none;
  bool blocker_present = false;
  // Unset: up_phase_i for hardy, down_phase_i for rpe_coherent.
  std::optional<AtomPrep> prep;
  double p = 0.1;
  double epsilon = 0.1;
  int n_max = 1;
  std::optional<SampleConfig> sampling;

  // Throws ConfigError.
  void validate() const;
  AtomPrep effective_prep() const;
};

struct NamedState {
  std::string name;
  PureState state;
};

struct ChshReport {
  ChshSetting setting;
  double value = 0.0;
  double max_value = 0.0;  // optimum over all settings
  std::string frame;
};

struct ExperimentReport {
  ExperimentConfig config;
  double phase_used = 0.0;
  std::vector<std::pair<std::string, double>> probabilities;
  // Each family lists probability names of mutually exclusive events that
  // exhaust the sample space.
  std::vector<std::vector<std::string>> exclusive_families;
  std::vector<NamedState> conditional_states;  // unit norm
  // Pipeline snapshots, possibly sub-normalized. In-memory only.
  std::vector<NamedState> stages;
  std::optional<double> discard_probability;
  std::optional<DensityMatrix> atom_density;
  std::optional<ChshReport> chsh;
  std::optional<double> concurrence;
  std::vector<std::pair<std::string, double>> concurrence_by_event;
  std::optional<SampleCounts> samples;
  std::optional<ChshEstimate> sampled_chsh;
  std::vector<std::pair<std::string, std::string>> provenance;

  // Throw ConfigError for unknown names.
  double probability(std::string_view name) const;
  bool has_probability(std::string_view name) const;
  const PureState& conditional_state(std::string_view name) const;
  const PureState& stage(std::string_view name) const;
};

// Checks the report contract: every probability in [0, 1], each exclusive
// family sums to 1 within 1e-10, conditional states have unit norm within
// 1e-12. Throws PhysicsError.
void check_report(const ExperimentReport& report);

// Zero of a sinusoidal dark-port probability f(phi) = a + b cos(phi) + c sin(phi),
// located from three evaluations. Returns a value in [0, 2 pi).
double tune_dark_phase(const std::function<double(double)>& dark_probability);

// Relative source phase that silences detector D for two weak sources
// combined on the default splitter.
double tuned_two_source_phase(double p, int n_max);

ExperimentReport run_mzi_delayed_choice(const ExperimentConfig& cfg);
ExperimentReport run_two_source_interference(const ExperimentConfig& cfg);
ExperimentReport run_two_source_ifm(const ExperimentConfig& cfg);
ExperimentReport run_hardy(const ExperimentConfig& cfg);
ExperimentReport run_rpe_coherent(const ExperimentConfig& cfg);
ExperimentReport run_rpe_incoherent(const ExperimentConfig& cfg);

// Dispatches on cfg.scenario.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace rpesim
