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

#include <cmath>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "rpesim/experiments.hpp"

namespace rpesim::oracle {

// Oracle probabilities for the configuration of `report`. The phase is taken
// from the report so auto-tuned runs are compared at the same point.
inline Probabilities for_report(const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  const bool eq1 = c.effective_prep() == AtomPrep::up_phase_i;
  switch (c.scenario) {
    case Scenario::mzi_delayed_choice: return mzi(c.bs_present, report.phase_used);
    case Scenario::two_source_interference: return two_source(c.bs_present, false, false, c.p, report.phase_used);
    case Scenario::two_source_ifm: return two_source(c.bs_present, true, c.blocker_present, c.p, report.phase_used);
    case Scenario::hardy: return hardy(c.bs_present, eq1, report.phase_used);
    case Scenario::rpe_coherent: return rpe_coherent(c.bs_present, eq1, c.p, report.phase_used);
    case Scenario::rpe_incoherent: return rpe_incoherent(c.bs_present, c.epsilon, report.phase_used);
  }
  return {};
}

struct Comparison {
  double max_error = 0.0;
  std::vector<std::string> missing_in_report;
  std::vector<std::string> missing_in_oracle;
};

inline Comparison compare(const ExperimentReport& report, const Probabilities& expected) {
  Comparison out;
  for (const auto& [name, value] : expected) {
    if (!report.has_probability(name)) {
      out.missing_in_report.push_back(name);
      continue;
    }
    out.max_error = std::max(out.max_error, std::abs(report.probability(name) - value));
  }
  for (const auto& [name, value] : report.probabilities) {
    if (!expected.count(name)) out.missing_in_oracle.push_back(name);
  }
  return out;
}

}  // namespace rpesim::oracle
