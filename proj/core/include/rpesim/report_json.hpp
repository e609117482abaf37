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

#include <optional>
#include <string>
#include <string_view>

#include "rpesim/experiments.hpp"

namespace rpesim {

struct JsonOptions {
  // Omit the wall-clock timestamp so identical runs give identical bytes.
  bool deterministic = false;
  int indent = 2;
};

// Stable report schema. Top-level keys, in order: scenario, config,
// probabilities, exclusive_families, discard_probability,
// conditional_states, atom_density, chsh, concurrence,
// concurrence_by_event, samples, provenance. Doubles are written in their
// shortest round-trip form.
std::string report_to_json(const ExperimentReport& report, const JsonOptions& options = {});

std::string config_to_json(const ExperimentConfig& cfg);
// Accepts the object written under "config"; every key is optional. Throws
// ConfigError on unknown keys or wrong types.
ExperimentConfig config_from_json(std::string_view text);

std::string report_to_text(const ExperimentReport& report);

// "eq1"/"eq8" and the canonical enum names.
std::optional<AtomPrep> parse_prep(std::string_view name);

}  // namespace rpesim
