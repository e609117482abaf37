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

#include <benchmark/benchmark.h>

#include <vector>

#include "rpesim/experiments.hpp"
#include "rpesim/measurement.hpp"
#include "rpesim/optics.hpp"
#include "rpesim/sampling.hpp"

namespace {

using namespace rpesim;

void BM_Scenario(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.scenario = kAllScenarios[static_cast<std::size_t>(state.range(0))];
  cfg.n_max = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));
  state.SetLabel(std::string(to_string(cfg.scenario)));
}
BENCHMARK(BM_Scenario)->ArgsProduct({{0, 1, 2, 3, 4, 5}, {1, 2}})->Unit(benchmark::kMicrosecond);

void BM_UniteErasure(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::rpe_coherent;
  cfg.erasure = ErasureMode::unite_and_spin;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg));
}
BENCHMARK(BM_UniteErasure)->Unit(benchmark::kMicrosecond);

void BM_BeamSplitterModes(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  const StateSpace sp = new_space({SubsystemLabel::photon_mode("a", n_max), SubsystemLabel::photon_mode("b", n_max)},
                                  n_max);
  PureState::Terms terms;
  for (unsigned k = 0; k <= static_cast<unsigned>(n_max); ++k) terms[sp.ket({{"a", k}})] = 1.0 / std::sqrt(n_max + 1.0);
  const PureState s(sp, terms);
  for (auto _ : state) benchmark::DoNotOptimize(beam_splitter(s, "a", "b"));
}
BENCHMARK(BM_BeamSplitterModes)->DenseRange(1, 8);

void BM_SampleEvents(benchmark::State& state) {
  const std::vector<Event> events{{"absorbed", 0.5}, {"c", 0.375}, {"d", 0.125}};
  const SampleConfig cfg{100000, 1, static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(sample_events(events, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.shots));
}
BENCHMARK(BM_SampleEvents)->Arg(1)->Arg(4)->UseRealTime();

void BM_Concurrence(benchmark::State& state) {
  const StateSpace sp = new_space({SubsystemLabel::atom2("z1"), SubsystemLabel::atom2("z2")});
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity() * 0.1;
  m(0, 0) = m(3, 3) = 0.4;
  m(0, 3) = m(3, 0) = 0.3;
  const DensityMatrix rho(sp, m);
  for (auto _ : state) benchmark::DoNotOptimize(concurrence(rho));
}
BENCHMARK(BM_Concurrence);

}  // namespace

BENCHMARK_MAIN();
