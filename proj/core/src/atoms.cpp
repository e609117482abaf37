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

#include "rpesim/atoms.hpp"

#include <cmath>
#include <numbers>

#include "rpesim/error.hpp"
#include "rpesim/optics.hpp"

namespace rpesim {

std::string_view to_string(Box box) { return box == Box::z_up ? "z+" : "z-"; }

std::string_view to_string(AtomPrep prep) {
  return prep == AtomPrep::up_phase_i ? "up_phase_i" : "down_phase_i";
}

Eigen::Matrix2cd splitting_isometry(AtomPrep prep) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  if (prep == AtomPrep::up_phase_i) {
    m(0, 0) = i;
    m(1, 1) = 1.0;
  } else {
    m(0, 0) = 1.0;
    m(1, 1) = i;
  }
  return m;
}

PureState prepare_atom(std::string id, AtomPrep prep) {
  const double h = std::numbers::sqrt2 / 2.0;
  // The spin-x up state (|up> + |down>)/sqrt(2) pushed through the splitter.
  const Eigen::Vector2cd x_up(h, h);
  const Eigen::Vector2cd boxed = splitting_isometry(prep) * x_up;
  return PureState::local(SubsystemLabel::atom2(std::move(id)), {boxed(0), boxed(1)});
}

PureState interact_absorb(const PureState& state, const BoxGeometry& geometry) {
  const std::size_t ia = state.space().index_of(geometry.atom, SubsystemKind::atom2);
  const auto box = static_cast<std::uint8_t>(geometry.intersecting_box);
  return absorb_photon(state, geometry.mode, geometry.flag,
                       [ia, box](const BasisKet& k) { return k[ia] == box; });
}

Discarded discard_absorption(const PureState& state) {
  const StateSpace& space = state.space();
  auto clear = [&](const BasisKet& k) { return space.flags_set(k) == 0; };
  double discarded = 0.0;
  for (const auto& [ket, amp] : state.terms()) {
    if (!clear(ket)) discarded += std::norm(amp);
  }
  PureState kept = project(state, clear);
  if (kept.empty()) throw PhysicsError("every history ended in absorption; nothing remains");
  return {kept, discarded};
}

PureState unite_boxes(const PureState& state, std::string_view atom, AtomPrep prep, std::string_view flag) {
  const StateSpace& space = state.space();
  const std::size_t ia = space.index_of(atom, SubsystemKind::atom2);
  if (!flag.empty()) {
    const std::size_t iflag = space.index_of(flag, SubsystemKind::flag);
    for (const auto& [ket, amp] : state.terms()) {
      if (ket[iflag] != 0) {
        throw PhysicsError("atom '" + std::string(atom) + "' absorbed a photon in a retained branch; cannot reunite");
      }
    }
  }
  const Eigen::Matrix2cd inverse = splitting_isometry(prep).adjoint();
  return map_kets(state, [&](const BasisKet& ket) {
    KetImage image;
    for (std::uint8_t out = 0; out < 2; ++out) {
      const Complex c = inverse(out, ket[ia]);
      if (c == Complex{}) continue;
      BasisKet k = ket;
      k[ia] = out;
      image.emplace_back(std::move(k), c);
    }
    return image;
  });
}

std::vector<Branch> measure_box_position(const PureState& state, std::string_view atom) {
  state.space().index_of(atom, SubsystemKind::atom2);
  return measure_subsystem(state, atom);
}

PureState prepare_three_level(std::string id) {
  return PureState::local(SubsystemLabel::atom3(std::move(id)), {1.0, 0.0, 0.0});
}

PureState weak_excite(const PureState& state, std::string_view atom, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("excitation amplitude must lie in [0, 1]");
  const std::size_t ia = state.space().index_of(atom, SubsystemKind::atom3);
  const double keep = std::sqrt(1.0 - epsilon * epsilon);
  return map_kets(state, [&](const BasisKet& ket) {
    if (ket[ia] == 1) return KetImage{{ket, Complex{1.0, 0.0}}};
    BasisKet ground = ket;
    BasisKet excited = ket;
    ground[ia] = 0;
    excited[ia] = 2;
    if (ket[ia] == 0) return KetImage{{ground, Complex{keep, 0.0}}, {excited, Complex{epsilon, 0.0}}};
    return KetImage{{ground, Complex{-epsilon, 0.0}}, {excited, Complex{keep, 0.0}}};
  });
}

PureState decay_emit(const PureState& state, std::string_view atom, std::string_view mode) {
  const StateSpace& space = state.space();
  const std::size_t ia = space.index_of(atom, SubsystemKind::atom3);
  const std::size_t im = space.index_of(mode, SubsystemKind::photon_mode);
  const auto cap = static_cast<unsigned>(space.n_max());
  return map_kets(state, [&](const BasisKet& ket) {
    BasisKet k = ket;
    if (ket[ia] == 2) {
      if (ket[im] != 0) throw PhysicsError("emission mode '" + std::string(mode) + "' is already occupied");
      if (space.total_photons(ket) + 1 > cap) {
        throw PhysicsError("emission would exceed the photon truncation n_max = " + std::to_string(cap));
      }
      k[ia] = 1;
      k[im] = 1;
    } else if (ket[ia] == 1 && ket[im] == 1) {
      k[ia] = 2;
      k[im] = 0;
    }
    return KetImage{{std::move(k), Complex{1.0, 0.0}}};
  });
}

}  // namespace rpesim
