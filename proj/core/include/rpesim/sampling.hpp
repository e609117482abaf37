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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rpesim/fockspace.hpp"
#include "rpesim/measurement.hpp"

namespace rpesim {

inline constexpr std::string_view kSamplerAlgorithm = "splitmix64-counter";

struct SampleConfig {
  std::uint64_t shots = 1;
  std::uint64_t seed = 0;
  // Worker threads; counts do not depend on this.
  unsigned threads = 1;

  void validate() const;
};

// Uniform double in [0, 1) for draw `index` of stream `stream`, derived only
// from (seed, stream, index).
double shot_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

struct Event {
  std::string name;
  double probability;
};

struct SampleCounts {
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
  std::string algorithm{kSamplerAlgorithm};
  std::vector<std::pair<std::string, std::uint64_t>> counts;  // same order as the events

  std::uint64_t count(std::string_view name) const;
  double frequency(std::string_view name) const;
};

// i.i.d. draws over an exclusive event family whose probabilities sum to 1
// within 1e-9.
SampleCounts sample_events(const std::vector<Event>& events, const SampleConfig& cfg, std::uint64_t stream = 0);

// Born-rule draws over basis kets; a sub-normalized state contributes a
// "discarded" outcome for the missing weight.
SampleCounts sample_state(const PureState& state, const SampleConfig& cfg);

struct ChshEstimate {
  double value = 0.0;
  double sigma = 0.0;                    // standard error of the estimate
  std::array<double, 4> correlations{};  // (a,b), (a,b2), (a2,b), (a2,b2)
  std::uint64_t shots_per_pair = 0;
};

// Samples spin outcome pairs for each of the four setting pairs, `cfg.shots`
// draws each, and forms the CHSH combination of the empirical correlations.
ChshEstimate sample_chsh(const DensityMatrix& rho, const ChshSetting& setting, const SampleConfig& cfg);

}  // namespace rpesim
