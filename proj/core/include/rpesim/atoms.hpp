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

#include <string>
#include <string_view>
#include <vector>

#include "rpesim/fockspace.hpp"

namespace rpesim {

// Which box of a split spin-1/2 atom. Matches the atom2 level index.
enum class Box : std::uint8_t { z_up = 0, z_down = 1 };

std::string_view to_string(Box box);

// Relative phase produced by the splitting field. `up_phase_i` yields
// (i z+ + z-)/sqrt(2), `down_phase_i` yields (z+ + i z-)/sqrt(2); both come
// from the spin-x up state.
enum class AtomPrep { up_phase_i, down_phase_i };

std::string_view to_string(AtomPrep prep);

// One box of `atom` lies across `mode`; a photon passing while the atom sits
// in that box is absorbed and recorded in `flag`.
struct BoxGeometry {
  std::string atom;
  Box intersecting_box = Box::z_up;
  std::string mode;
  std::string flag;
};

PureState prepare_atom(std::string id, AtomPrep prep);

PureState interact_absorb(const PureState& state, const BoxGeometry& geometry);

struct Discarded {
  PureState remainder;  // all flags clear, not renormalized
  double discard_probability;
};
// Keeps only the histories in which no absorption happened. Throws
// PhysicsError when nothing survives.
Discarded discard_absorption(const PureState& state);

// Inverse of the splitting isometry for `prep`: maps the box pair back onto a
// reunited spin qubit (level 0 = spin z up). When `flag` is nonempty every
// ket must have it clear.
PureState unite_boxes(const PureState& state, std::string_view atom, AtomPrep prep, std::string_view flag = {});

// 2x2 matrix of the splitting isometry, columns indexed by spin z up/down.
Eigen::Matrix2cd splitting_isometry(AtomPrep prep);

// Born decomposition over the two boxes; branch outcome is a Box value.
std::vector<Branch> measure_box_position(const PureState& state, std::string_view atom);

// Three-level emitter used in the incoherent scheme.
PureState prepare_three_level(std::string id);
// |0> -> sqrt(1 - eps^2)|0> + eps|2>, completed to a rotation on {|0>, |2>}.
PureState weak_excite(const PureState& state, std::string_view atom, double epsilon);
// |2>|0_mode> -> |1>|1_mode>, completed to a swap on that pair of kets.
PureState decay_emit(const PureState& state, std::string_view atom, std::string_view mode);

}  // namespace rpesim
