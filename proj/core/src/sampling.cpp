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

#include "rpesim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rpesim/error.hpp"

namespace rpesim {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<std::uint64_t> draw_counts(const std::vector<double>& cumulative, const SampleConfig& cfg,
                                       std::uint64_t stream) {
  const std::size_t k = cumulative.size();
  auto run = [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& counts) {
    for (std::uint64_t shot = begin; shot < end; ++shot) {
      const double u = shot_uniform(cfg.seed, stream, shot);
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), k - 1);
      ++counts[idx];
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(std::min<std::uint64_t>(cfg.shots, 64))));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(k, 0));
  if (workers == 1) {
    run(0, cfg.shots, partial[0]);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (cfg.shots + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(cfg.shots, w * chunk);
      const std::uint64_t end = std::min(cfg.shots, begin + chunk);
      pool.emplace_back([&, begin, end, w] { run(begin, end, partial[w]); });
    }
  }
  std::vector<std::uint64_t> total(k, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < k; ++i) total[i] += p[i];
  return total;
}

std::vector<double> cumulative_of(const std::vector<Event>& events) {
  std::vector<double> cum;
  cum.reserve(events.size());
  double acc = 0.0;
  for (const auto& e : events) {
    if (!(e.probability >= -1e-12)) throw ConfigError("event '" + e.name + "' has negative probability");
    acc += std::max(0.0, e.probability);
    cum.push_back(acc);
  }
  if (std::abs(acc - 1.0) > 1e-9) throw ConfigError("event probabilities must sum to 1");
  return cum;
}

}  // namespace

void SampleConfig::validate() const {
  if (shots < 1) throw ConfigError("shots must be >= 1");
}

double shot_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream));
  const std::uint64_t bits = splitmix64(key ^ splitmix64(index + kGolden));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t SampleCounts::count(std::string_view name) const {
  for (const auto& [n, c] : counts) {
    if (n == name) return c;
  }
  return 0;
}

double SampleCounts::frequency(std::string_view name) const {
  return shots == 0 ? 0.0 : static_cast<double>(count(name)) / static_cast<double>(shots);
}

SampleCounts sample_events(const std::vector<Event>& events, const SampleConfig& cfg, std::uint64_t stream) {
  cfg.validate();
  if (events.empty()) throw ConfigError("nothing to sample");
  const auto counts = draw_counts(cumulative_of(events), cfg, stream);
  SampleCounts out;
  out.seed = cfg.seed;
  out.shots = cfg.shots;
  for (std::size_t i = 0; i < events.size(); ++i) out.counts.emplace_back(events[i].name, counts[i]);
  return out;
}

SampleCounts sample_state(const PureState& state, const SampleConfig& cfg) {
  std::vector<Event> events;
  for (const auto& [ket, amp] : state.terms()) events.push_back({state.space().describe(ket), std::norm(amp)});
  const double missing = 1.0 - state.norm_sq();
  if (missing > 1e-15) events.push_back({"discarded", missing});
  // Normalize away rounding so the family sums to exactly 1 for the sampler.
  double total = 0.0;
  for (const auto& e : events) total += e.probability;
  for (auto& e : events) e.probability /= total;
  return sample_events(events, cfg);
}

ChshEstimate sample_chsh(const DensityMatrix& rho, const ChshSetting& setting, const SampleConfig& cfg) {
  cfg.validate();
  if (rho.space().size() != 2) throw ConfigError("CHSH sampling needs a two-atom density matrix");
  const std::string& x = rho.space()[0].name;
  const std::string& y = rho.space()[1].name;
  const std::array<std::pair<const SpinDirection*, const SpinDirection*>, 4> pairs{
      {{&setting.a, &setting.b}, {&setting.a, &setting.b2}, {&setting.a2, &setting.b}, {&setting.a2, &setting.b2}}};

  ChshEstimate est;
  est.shots_per_pair = cfg.shots;
  double variance = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double e = std::clamp(correlation(rho, x, *pairs[i].first, y, *pairs[i].second), -1.0, 1.0);
    // Only the parity of the two outcomes enters the correlation.
    const double p_same = 0.5 * (1.0 + e);
    const auto counts = sample_events({{"same", p_same}, {"different", 1.0 - p_same}}, cfg, i + 1);
    const double n = static_cast<double>(cfg.shots);
    const double e_hat = (static_cast<double>(counts.counts[0].second) - static_cast<double>(counts.counts[1].second)) / n;
    est.correlations[i] = e_hat;
    variance += (1.0 - e_hat * e_hat) / n;
  }
  est.value = est.correlations[0] + est.correlations[1] + est.correlations[2] - est.correlations[3];
  est.sigma = std::sqrt(variance);
  return est;
}

}  // namespace rpesim
