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
#include <vector>

#include "rpesim/fockspace.hpp"

namespace rpesim {

// Lossless two-port splitter. A photon entering port a leaves through output
// a with amplitude t and through output b with amplitude r, and symmetrically
// for port b. The default is the balanced splitter with a factor i on
// reflection.
struct BeamSplitterConvention {
  double transmission = 0.70710678118654752440;
  Complex reflection_phase{0.0, 1.0};

  Complex t() const { return {transmission, 0.0}; }
  Complex r() const;

  // Throws ConfigError unless 0 <= t <= 1 and |reflection_phase| == 1, and
  // for 0 < t < 1 unless reflection_phase is +i or -i (the only unitary choice).
  void validate() const;
};

// Single-mode weak coherent source truncated to q|0> + p|1>.
struct WeakSourceParams {
  double p = 0.1;
  double q = 0.99498743710661995473;

  static WeakSourceParams from_p(double p);
  void validate() const;
};

PureState single_photon(const StateSpace& space, std::string_view mode);

// q|0> + p|1> on `mode`, vacuum elsewhere. p == 1 is accepted with a warning
// on stderr since the source is no longer weak.
PureState weak_source(const StateSpace& space, std::string_view mode, const WeakSourceParams& params);

// Splitter acting in place on two modes: the bosonic lift of
//   a -> t a + r b,   b -> r a + t b.
PureState beam_splitter(const PureState& state, std::string_view mode_a, std::string_view mode_b,
                        const BeamSplitterConvention& conv = {});

// Splitter whose outputs are distinct modes. `in_b` may be empty for an
// unused (vacuum) port. Output modes may coincide with the inputs.
struct SplitterPorts {
  std::string in_a;
  std::string in_b;
  std::string out_a;
  std::string out_b;
};
PureState beam_splitter(const PureState& state, const SplitterPorts& ports,
                        const BeamSplitterConvention& conv = {});

// Straight-through propagation when the splitter is absent: in_a -> out_a and
// in_b -> out_b without phase.
PureState pass_through(const PureState& state, const SplitterPorts& ports);

// Splitter slot whose insertion can be decided late. The stages before it are
// untouched by the choice.
class SplitterStage {
 public:
  SplitterStage(SplitterPorts ports, bool inserted = true, BeamSplitterConvention conv = {});

  bool inserted() const { return inserted_; }
  const SplitterPorts& ports() const { return ports_; }
  const BeamSplitterConvention& convention() const { return conv_; }

  SplitterStage removed() const;
  SplitterStage with_splitter() const;

  PureState apply(const PureState& state) const;

 private:
  SplitterPorts ports_;
  bool inserted_;
  BeamSplitterConvention conv_;
};

// Multiplies every ket by exp(i n phi) with n the occupation of `mode`.
PureState phase_shift(const PureState& state, std::string_view mode, double phi);

// Born decomposition by photon count in `mode`, outcomes 0..n_max.
std::vector<Branch> detect(const PureState& state, std::string_view mode);

// Unit-efficiency absorber on `mode`: when `gate` holds and `flag` is clear,
// one photon is removed and the flag is set. Kets with the flag already set
// pass unchanged. Norm-preserving.
PureState absorb_photon(const PureState& state, std::string_view mode, std::string_view flag,
                        const std::function<bool(const BasisKet&)>& gate);

// Drops kets holding more than n_max photons in total and returns the
// dropped weight.
struct Truncation {
  PureState state;
  double dropped_probability;
};
Truncation truncate_photon_number(const PureState& state);

}  // namespace rpesim
