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

#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rpesim/atoms.hpp"
#include "rpesim/measurement.hpp"
#include "rpesim/optics.hpp"
#include "test_util.hpp"

namespace rpesim {
namespace {

using testing::kRt2;
using testing::random_unitary;

constexpr double kPi = std::numbers::pi;
constexpr double kTsirelson = 2.0 * 1.41421356237309504880;

// Random normalized state on photons u, v (n_max = 2), split atoms z1, z2 and clear flags.
PureState random_state(std::mt19937_64& rng) {
  std::vector<SubsystemLabel> labels{SubsystemLabel::photon_mode("u", 2), SubsystemLabel::photon_mode("v", 2),
                                     SubsystemLabel::atom2("z1"), SubsystemLabel::atom2("z2"),
                                     SubsystemLabel::flag("f1"), SubsystemLabel::flag("f2")};
  const StateSpace sp = new_space(labels, 2);
  std::normal_distribution<double> n;
  PureState::Terms terms;
  double norm = 0.0;
  for (unsigned u = 0; u <= 2; ++u) {
    for (unsigned v = 0; u + v <= 2; ++v) {
      for (unsigned a = 0; a < 2; ++a) {
        for (unsigned b = 0; b < 2; ++b) {
          const Complex amp(n(rng), n(rng));
          terms[sp.ket({{"u", u}, {"v", v}, {"z1", a}, {"z2", b}})] = amp;
          norm += std::norm(amp);
        }
      }
    }
  }
  for (auto& [k, a] : terms) a /= std::sqrt(norm);
  return PureState(sp, terms);
}

TEST(Property, NormConservedUnderRandomPipelines) {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    PureState s = random_state(rng);
    // Uniting first while every flag is clear keeps the operation well defined.
    if (trial % 3 == 0) s = unite_boxes(s, "z1", AtomPrep::up_phase_i);
    // A one-bit flag records a single absorption, so each absorber acts once.
    bool absorbed = false;
    for (int step = 0; step < 8; ++step) {
      switch (static_cast<int>(unit(rng) * 4)) {
        case 0: {
          BeamSplitterConvention conv{unit(rng), Complex(0.0, unit(rng) < 0.5 ? 1.0 : -1.0)};
          s = beam_splitter(s, "u", "v", conv);
          break;
        }
        case 1: s = phase_shift(s, unit(rng) < 0.5 ? "u" : "v", 2 * kPi * unit(rng)); break;
        case 2:
          if (absorbed) break;
          absorbed = true;
          s = interact_absorb(s, BoxGeometry{"z1", Box::z_up, "v", "f1"});
          s = interact_absorb(s, BoxGeometry{"z2", Box::z_down, "u", "f2"});
          break;
        default: s = beam_splitter(s, "v", "u"); break;
      }
      ASSERT_NEAR(norm_sq(s), 1.0, 1e-12);
    }
  }
}

TEST(Property, PartialTracesArePhysical) {
  std::mt19937_64 rng(2718);
  const std::vector<std::vector<std::string>> keeps{{"z1", "z2"}, {"u"}, {"z2", "u", "f1"}, {"v", "z1"}};
  for (int trial = 0; trial < 100; ++trial) {
    PureState s = random_state(rng);
    s = interact_absorb(s, BoxGeometry{"z1", Box::z_up, "v", "f1"});
    // Sub-normalized inputs are legal.
    if (trial % 2) s = discard_absorption(s).remainder;
    for (const auto& keep : keeps) {
      const DensityMatrix rho = partial_trace(s, keep);
      EXPECT_LT(rho.hermiticity_error(), 1e-10);
      EXPECT_GT(rho.min_eigenvalue(), -1e-10);
      EXPECT_NEAR(rho.trace(), norm_sq(s), 1e-10);
    }
  }
}

TEST(Property, TsirelsonBoundHolds) {
  std::mt19937_64 rng(1618);
  std::normal_distribution<double> n;
  auto dir = [&] { return SpinDirection::from_vector({n(rng), n(rng), n(rng)}); };
  const StateSpace sp = new_space({SubsystemLabel::atom2("z1"), SubsystemLabel::atom2("z2")});
  double best = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    Eigen::Matrix4cd g;
    const int rank = 1 + trial % 4;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = j < rank ? Complex(n(rng), n(rng)) : Complex(0.0);
    Eigen::Matrix4cd m = g * g.adjoint();
    const DensityMatrix rho(sp, m / m.trace());
    const double s = chsh(rho, ChshSetting{dir(), dir(), dir(), dir()});
    best = std::max(best, std::abs(s));
    ASSERT_LE(std::abs(s), kTsirelson + 1e-9);
    if (trial % 100 == 0) ASSERT_LE(max_chsh(rho), kTsirelson + 1e-9);
  }
  EXPECT_GT(best, 2.0);
}

TEST(Property, ConcurrenceInvariantUnderLocalUnitaries) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n;
  const StateSpace sp = new_space({SubsystemLabel::atom2("z1"), SubsystemLabel::atom2("z2")});
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::Matrix4cd g;
    const int rank = 1 + trial % 4;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = j < rank ? Complex(n(rng), n(rng)) : Complex(0.0);
    Eigen::Matrix4cd m = g * g.adjoint();
    const DensityMatrix rho(sp, m / m.trace());
    const DensityMatrix moved = apply_local(apply_local(rho, "z1", random_unitary(rng)), "z2", random_unitary(rng));
    EXPECT_NEAR(concurrence(moved), concurrence(rho), 1e-10);
  }
}

TEST(Property, MaxChshInvariantUnderLocalUnitaries) {
  std::mt19937_64 rng(8);
  const StateSpace sp = new_space({SubsystemLabel::atom2("z1"), SubsystemLabel::atom2("z2")});
  Eigen::Matrix4cd phi = Eigen::Matrix4cd::Zero();
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  for (int trial = 0; trial < 50; ++trial) {
    const DensityMatrix moved =
        apply_local(apply_local(DensityMatrix(sp, phi), "z1", random_unitary(rng)), "z2", random_unitary(rng));
    EXPECT_NEAR(max_chsh(moved), 2 * kRt2, 1e-10);
  }
}

}  // namespace
}  // namespace rpesim
