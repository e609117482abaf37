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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "rpesim/atoms.hpp"
#include "rpesim/error.hpp"
#include "rpesim/measurement.hpp"
#include "rpesim/optics.hpp"
#include "test_util.hpp"

namespace rpesim {
namespace {

using testing::cdist;
using testing::kI;
using testing::kRt2;

PureState flag_clear(const std::string& name) { return PureState::local(SubsystemLabel::flag(name), {1.0, 0.0}); }

PureState photon_modes(std::vector<std::string> names) {
  std::vector<SubsystemLabel> labels;
  for (auto& n : names) labels.push_back(SubsystemLabel::photon_mode(n));
  return PureState::vacuum(new_space(labels));
}

const BoxGeometry kGeo1{"z1", Box::z_up, "v", "abs1"};
const BoxGeometry kGeo2{"z2", Box::z_down, "u", "abs2"};

// Single photon split onto u, v with both atoms prepared and flags clear.
PureState hardy_after_interaction(AtomPrep prep = AtomPrep::up_phase_i) {
  const PureState vac = photon_modes({"src", "u", "v", "c", "d"});
  PureState s = beam_splitter(single_photon(vac.space(), "src"), SplitterPorts{"src", "", "v", "u"});
  s = tensor(s, prepare_atom("z1", prep));
  s = tensor(s, prepare_atom("z2", prep));
  s = tensor(tensor(s, flag_clear("abs1")), flag_clear("abs2"));
  s = interact_absorb(s, kGeo1);
  return interact_absorb(s, kGeo2);
}

TEST(PrepareAtom, UpPhaseI) {
  const PureState a = prepare_atom("z1", AtomPrep::up_phase_i);
  EXPECT_LT(cdist(a.amplitude({{"z1", 0}}), kI / kRt2), 1e-12);
  EXPECT_LT(cdist(a.amplitude({{"z1", 1}}), 1.0 / kRt2), 1e-12);
  EXPECT_NEAR(norm_sq(a), 1.0, 1e-12);
}

TEST(PrepareAtom, DownPhaseI) {
  const PureState a = prepare_atom("z1", AtomPrep::down_phase_i);
  EXPECT_LT(cdist(a.amplitude({{"z1", 1}}), kI / kRt2), 1e-12);
  EXPECT_LT(cdist(a.amplitude({{"z1", 0}}), 1.0 / kRt2), 1e-12);
  EXPECT_NEAR(norm_sq(a), 1.0, 1e-12);
}

TEST(InteractAbsorb, DiscardLeavesPublishedFourTerms) {
  const PureState s = hardy_after_interaction();
  EXPECT_NEAR(norm_sq(s), 1.0, 1e-12);
  const Discarded d = discard_absorption(s);
  EXPECT_NEAR(d.discard_probability, 0.5, 1e-12);
  EXPECT_NEAR(norm_sq(d.remainder), 0.5, 1e-12);
  const double k = 1.0 / std::sqrt(8.0);
  const PureState& r = d.remainder;
  ASSERT_EQ(r.terms().size(), 4u);
  EXPECT_LT(cdist(r.amplitude({{"u", 1}, {"z1", 0}, {"z2", 0}}), -kI * k), 1e-12);
  EXPECT_LT(cdist(r.amplitude({{"u", 1}, {"z1", 1}, {"z2", 0}}), -k), 1e-12);
  EXPECT_LT(cdist(r.amplitude({{"v", 1}, {"z1", 1}, {"z2", 0}}), kI * k), 1e-12);
  EXPECT_LT(cdist(r.amplitude({{"v", 1}, {"z1", 1}, {"z2", 1}}), k), 1e-12);
}

TEST(InteractAbsorb, SurvivorsNeverCrossTheBlockedPath) {
  const PureState r = discard_absorption(hardy_after_interaction()).remainder;
  const StateSpace& sp = r.space();
  const std::size_t u = sp.index_of("u"), v = sp.index_of("v"), z1 = sp.index_of("z1"), z2 = sp.index_of("z2");
  for (const auto& [k, amp] : r.terms()) {
    EXPECT_FALSE(k[v] == 1 && k[z1] == 0);
    EXPECT_FALSE(k[u] == 1 && k[z2] == 1);
  }
}

TEST(InteractAbsorb, NonIntersectingBoxIsIdentity) {
  const PureState vac = photon_modes({"v"});
  PureState s = tensor(single_photon(vac.space(), "v"), PureState::local(SubsystemLabel::atom2("z1"), {0.0, 1.0}));
  s = tensor(s, flag_clear("abs1"));
  const PureState out = interact_absorb(s, kGeo1);
  EXPECT_LT(phase_aligned_distance(out, s), 1e-15);
  EXPECT_NEAR(discard_absorption(out).discard_probability, 0.0, 1e-15);
}

TEST(InteractAbsorb, UnknownNamesThrow) {
  const PureState s = hardy_after_interaction();
  EXPECT_THROW(interact_absorb(s, BoxGeometry{"z9", Box::z_up, "v", "abs1"}), ConfigError);
  EXPECT_THROW(interact_absorb(s, BoxGeometry{"z1", Box::z_up, "w", "abs1"}), ConfigError);
}

TEST(Discard, FullyBlockedThrows) {
  std::vector<SubsystemLabel> labels{SubsystemLabel::flag("f")};
  const StateSpace sp = new_space(labels);
  EXPECT_THROW(discard_absorption(PureState::basis(sp, sp.ket({{"f", 1}}))), PhysicsError);
}

TEST(UniteBoxes, RecoversSpinXUp) {
  for (AtomPrep prep : {AtomPrep::up_phase_i, AtomPrep::down_phase_i}) {
    const PureState back = unite_boxes(prepare_atom("z1", prep), "z1", prep);
    EXPECT_LT(cdist(back.amplitude({{"z1", 0}}), 1.0 / kRt2), 1e-15);
    EXPECT_LT(cdist(back.amplitude({{"z1", 1}}), 1.0 / kRt2), 1e-15);
  }
}

TEST(UniteBoxes, BellPairStaysMaximallyEntangled) {
  const StateSpace sp = new_space({SubsystemLabel::atom2("z1"), SubsystemLabel::atom2("z2")});
  const PureState phi(sp, {{sp.ket(), 1.0 / kRt2}, {sp.ket({{"z1", 1}, {"z2", 1}}), 1.0 / kRt2}});
  PureState u = unite_boxes(phi, "z1", AtomPrep::up_phase_i);
  u = unite_boxes(u, "z2", AtomPrep::up_phase_i);
  const std::vector<std::string> atoms{"z1", "z2"};
  EXPECT_NEAR(concurrence(partial_trace(u, atoms)), 1.0, 1e-10);
  // diag(-i, 1) on both qubits: z+z+ picks up -1.
  EXPECT_LT(cdist(u.amplitude({}), -1.0 / kRt2), 1e-12);
  EXPECT_LT(cdist(u.amplitude({{"z1", 1}, {"z2", 1}}), 1.0 / kRt2), 1e-12);
}

TEST(UniteBoxes, AbsorbedBranchThrows) {
  const PureState s = hardy_after_interaction();
  EXPECT_THROW(unite_boxes(s, "z1", AtomPrep::up_phase_i, "abs1"), PhysicsError);
  const PureState clear = discard_absorption(s).remainder;
  EXPECT_NO_THROW(unite_boxes(clear, "z1", AtomPrep::up_phase_i, "abs1"));
}

TEST(SplittingIsometry, IsUnitary) {
  for (AtomPrep prep : {AtomPrep::up_phase_i, AtomPrep::down_phase_i}) {
    const Eigen::Matrix2cd m = splitting_isometry(prep);
    EXPECT_LT((m.adjoint() * m - Eigen::Matrix2cd::Identity()).norm(), 1e-15);
  }
}

TEST(MeasureBoxPosition, OnPostSelectedBellPair) {
  PureState s = discard_absorption(hardy_after_interaction()).remainder;
  s = beam_splitter(s, SplitterPorts{"u", "v", "c", "d"});
  const PureState on_d = project(s, [&](const BasisKet& k) { return k[s.space().index_of("d")] == 1; });
  const Normalized n = normalize(on_d);
  const auto first = measure_box_position(n.state, "z1");
  ASSERT_EQ(first.size(), 2u);
  EXPECT_NEAR(first[0].probability, 0.5, 1e-12);
  // Atom 1 in its intersecting box z+ leaves atom 2 in z+, away from path u.
  const auto second = measure_box_position(first[0].conditional(), "z2");
  EXPECT_NEAR(second[static_cast<int>(Box::z_up)].probability, 1.0, 1e-12);
  EXPECT_NEAR(second[static_cast<int>(Box::z_down)].probability, 0.0, 1e-12);
  // Both-intersecting (z1+, z2-) and neither (z1-, z2+) never occur.
  const auto after_down = measure_box_position(first[1].conditional(), "z2");
  EXPECT_NEAR(second[1].probability * first[0].probability, 0.0, 1e-12);
  EXPECT_NEAR(after_down[0].probability * first[1].probability, 0.0, 1e-12);
}

TEST(MeasureBoxPosition, ProductIsDeterministic) {
  const PureState a = PureState::local(SubsystemLabel::atom2("z1"), {1.0, 0.0});
  const auto b = measure_box_position(a, "z1");
  EXPECT_NEAR(b[0].probability, 1.0, 1e-15);
  EXPECT_NEAR(b[1].probability, 0.0, 1e-15);
  EXPECT_THROW(measure_box_position(a, "z2"), ConfigError);
}

TEST(ThreeLevel, WeakExcitationAmplitude) {
  const PureState a = weak_excite(prepare_three_level("a1"), "a1", 0.1);
  EXPECT_LT(cdist(a.amplitude({{"a1", 2}}), 0.1), 1e-15);
  EXPECT_LT(cdist(a.amplitude({{"a1", 0}}), std::sqrt(0.99)), 1e-15);
  EXPECT_NEAR(norm_sq(a), 1.0, 1e-15);
}

PureState cabrillo_after_splitter(double eps) {
  PureState s = tensor(prepare_three_level("a1"), prepare_three_level("a2"));
  s = tensor(s, photon_modes({"e1", "e2", "c", "d"}));
  s = weak_excite(weak_excite(s, "a1", eps), "a2", eps);
  s = truncate_photon_number(
          project(s, [](const BasisKet& k) { return !(k[0] == 2 && k[1] == 2); }))
          .state;
  s = decay_emit(s, "a1", "e1");
  s = decay_emit(s, "a2", "e2");
  return beam_splitter(s, SplitterPorts{"e1", "e2", "c", "d"});
}

TEST(ThreeLevel, HeraldedStateIsWhichAtomSuperposition) {
  const PureState s = cabrillo_after_splitter(0.1);
  const std::size_t d = s.space().index_of("d");
  const Postselection sel = postselect(s, [&](const BasisKet& k) { return k[d] == 1; });
  const double eps2 = 0.01;
  EXPECT_NEAR(sel.probability, eps2 * (1 - eps2), 1e-12);
  // The emitting atom drops to |1>, the other stays in |0>.
  const Complex a10 = sel.state.amplitude({{"a1", 1}, {"a2", 0}, {"d", 1}});
  const Complex a01 = sel.state.amplitude({{"a1", 0}, {"a2", 1}, {"d", 1}});
  EXPECT_NEAR(std::abs(a10), 1.0 / kRt2, 1e-12);
  EXPECT_NEAR(std::abs(a01), 1.0 / kRt2, 1e-12);
  EXPECT_LT(cdist(a10 / a01, kI), 1e-12);
  const std::vector<std::string> atoms{"a1", "a2"};
  EXPECT_NEAR(concurrence(restrict_to_qubits(partial_trace(sel.state, atoms))), 1.0, 1e-10);
}

TEST(ThreeLevel, NoExcitationNoPhoton) {
  const PureState s = cabrillo_after_splitter(0.0);
  const std::size_t d = s.space().index_of("d");
  EXPECT_THROW(postselect(s, [&](const BasisKet& k) { return k[d] == 1; }), PhysicsError);
}

TEST(ThreeLevel, DecayIntoOccupiedModeThrows) {
  PureState s = tensor(PureState::local(SubsystemLabel::atom3("a"), {0.0, 0.0, 1.0}), photon_modes({"e"}));
  s = decay_emit(s, "a", "e");
  EXPECT_LT(cdist(s.amplitude({{"a", 1}, {"e", 1}}), 1.0), 1e-15);
  PureState again = tensor(PureState::local(SubsystemLabel::atom3("b"), {0.0, 0.0, 1.0}), s);
  EXPECT_THROW(decay_emit(again, "b", "e"), PhysicsError);
}

}  // namespace
}  // namespace rpesim
