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

#include "rpesim/optics.hpp"

#include <cmath>
#include <iostream>

#include "rpesim/error.hpp"

namespace rpesim {

namespace {

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(unsigned n, unsigned k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

Complex ipow(Complex z, unsigned k) {
  Complex out{1.0, 0.0};
  for (unsigned i = 0; i < k; ++i) out *= z;
  return out;
}

// Coefficients of A^k B^(n-k) in (x A + y B)^n.
std::vector<Complex> binomial_expand(unsigned n, Complex x, Complex y) {
  std::vector<Complex> c(n + 1);
  for (unsigned k = 0; k <= n; ++k) c[k] = binomial(n, k) * ipow(x, k) * ipow(y, n - k);
  return c;
}

void require_photon_mode(const StateSpace& space, std::string_view mode) {
  space.index_of(mode, SubsystemKind::photon_mode);
}

}  // namespace

Complex BeamSplitterConvention::r() const {
  const double mag = std::sqrt(std::max(0.0, 1.0 - transmission * transmission));
  return mag * reflection_phase;
}

void BeamSplitterConvention::validate() const {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw ConfigError("beam splitter transmission must lie in [0, 1]");
  }
  if (std::abs(std::abs(reflection_phase) - 1.0) > 1e-12) {
    throw ConfigError("beam splitter reflection phase must be a unit complex number");
  }
  // t r* + r t* = 0 is needed for the symmetric rule to be unitary.
  if (transmission > 0.0 && transmission < 1.0 && std::abs(reflection_phase.real()) > 1e-12) {
    throw ConfigError("a partially reflecting symmetric splitter needs reflection phase +i or -i");
  }
}

WeakSourceParams WeakSourceParams::from_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("weak source amplitude p must lie in (0, 1]");
  return {p, std::sqrt(1.0 - p * p)};
}

void WeakSourceParams::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("weak source amplitude p must lie in (0, 1]");
  if (!(q >= 0.0)) throw ConfigError("weak source vacuum amplitude q must be non-negative");
  if (std::abs(p * p + q * q - 1.0) > 1e-12) throw ConfigError("weak source requires p^2 + q^2 = 1");
}

PureState single_photon(const StateSpace& space, std::string_view mode) {
  require_photon_mode(space, mode);
  return PureState::basis(space, space.ket({{mode, 1}}));
}

PureState weak_source(const StateSpace& space, std::string_view mode, const WeakSourceParams& params) {
  require_photon_mode(space, mode);
  params.validate();
  if (params.p == 1.0) {
    std::cerr << "warning: weak source on '" << mode << "' has p = 1; it always emits\n";
  }
  return PureState(space, {{space.ket(), Complex{params.q, 0.0}}, {space.ket({{mode, 1}}), Complex{params.p, 0.0}}});
}

PureState beam_splitter(const PureState& state, std::string_view mode_a, std::string_view mode_b,
                        const BeamSplitterConvention& conv) {
  return beam_splitter(state, SplitterPorts{std::string(mode_a), std::string(mode_b), std::string(mode_a),
                                            std::string(mode_b)},
                       conv);
}

PureState beam_splitter(const PureState& state, const SplitterPorts& ports, const BeamSplitterConvention& conv) {
  conv.validate();
  const StateSpace& space = state.space();
  const std::size_t ia = space.index_of(ports.in_a, SubsystemKind::photon_mode);
  const std::optional<std::size_t> ib =
      ports.in_b.empty() ? std::nullopt : std::optional(space.index_of(ports.in_b, SubsystemKind::photon_mode));
  const std::size_t oa = space.index_of(ports.out_a, SubsystemKind::photon_mode);
  const std::size_t ob = space.index_of(ports.out_b, SubsystemKind::photon_mode);
  if (oa == ob) throw ConfigError("splitter outputs must be distinct modes");
  if (ib && *ib == ia) throw ConfigError("splitter inputs must be distinct modes");
  const unsigned cap = static_cast<unsigned>(space.n_max());
  const Complex t = conv.t();
  const Complex r = conv.r();

  return map_kets(state, [&](const BasisKet& ket) {
    if (space.total_photons(ket) > cap) {
      throw PhysicsError("state holds more photons than the truncation n_max = " + std::to_string(cap));
    }
    const unsigned na = ket[ia];
    const unsigned nb = ib ? ket[*ib] : 0u;
    BasisKet base = ket;
    base[ia] = 0;
    if (ib) base[*ib] = 0;
    if (base[oa] != 0 || base[ob] != 0) {
      throw PhysicsError("splitter output mode is already occupied");
    }
    // a^dag^na b^dag^nb / sqrt(na! nb!) with a^dag -> t A + r B, b^dag -> r A + t B.
    const auto pa = binomial_expand(na, t, r);
    const auto pb = binomial_expand(nb, r, t);
    const unsigned n = na + nb;
    std::vector<Complex> coeff(n + 1);
    for (unsigned i = 0; i <= na; ++i) {
      for (unsigned j = 0; j <= nb; ++j) coeff[i + j] += pa[i] * pb[j];
    }
    const double inv_norm = 1.0 / std::sqrt(factorial(na) * factorial(nb));
    KetImage image;
    for (unsigned k = 0; k <= n; ++k) {
      const Complex c = coeff[k] * std::sqrt(factorial(k) * factorial(n - k)) * inv_norm;
      if (std::abs(c) < kPruneThreshold) continue;
      if (k > cap || n - k > cap) throw PhysicsError("splitter output exceeds the photon truncation");
      BasisKet out = base;
      out[oa] = static_cast<std::uint8_t>(k);
      out[ob] = static_cast<std::uint8_t>(n - k);
      image.emplace_back(std::move(out), c);
    }
    return image;
  });
}

PureState pass_through(const PureState& state, const SplitterPorts& ports) {
  const StateSpace& space = state.space();
  const std::size_t ia = space.index_of(ports.in_a, SubsystemKind::photon_mode);
  const std::optional<std::size_t> ib =
      ports.in_b.empty() ? std::nullopt : std::optional(space.index_of(ports.in_b, SubsystemKind::photon_mode));
  const std::size_t oa = space.index_of(ports.out_a, SubsystemKind::photon_mode);
  const std::size_t ob = space.index_of(ports.out_b, SubsystemKind::photon_mode);
  if (oa == ob) throw ConfigError("splitter outputs must be distinct modes");
  return map_kets(state, [&](const BasisKet& ket) {
    BasisKet out = ket;
    const std::uint8_t na = ket[ia];
    const std::uint8_t nb = ib ? ket[*ib] : 0;
    out[ia] = 0;
    if (ib) out[*ib] = 0;
    if (out[oa] != 0 || out[ob] != 0) throw PhysicsError("output mode is already occupied");
    out[oa] = na;
    out[ob] = nb;
    return KetImage{{std::move(out), Complex{1.0, 0.0}}};
  });
}

SplitterStage::SplitterStage(SplitterPorts ports, bool inserted, BeamSplitterConvention conv)
    : ports_(std::move(ports)), inserted_(inserted), conv_(conv) {
  conv_.validate();
}

SplitterStage SplitterStage::removed() const { return SplitterStage(ports_, false, conv_); }
SplitterStage SplitterStage::with_splitter() const { return SplitterStage(ports_, true, conv_); }

PureState SplitterStage::apply(const PureState& state) const {
  return inserted_ ? beam_splitter(state, ports_, conv_) : pass_through(state, ports_);
}

PureState phase_shift(const PureState& state, std::string_view mode, double phi) {
  const std::size_t i = state.space().index_of(mode, SubsystemKind::photon_mode);
  return map_kets(state, [&](const BasisKet& ket) {
    return KetImage{{ket, std::polar(1.0, phi * ket[i])}};
  });
}

std::vector<Branch> detect(const PureState& state, std::string_view mode) {
  require_photon_mode(state.space(), mode);
  return measure_subsystem(state, mode);
}

PureState absorb_photon(const PureState& state, std::string_view mode, std::string_view flag,
                        const std::function<bool(const BasisKet&)>& gate) {
  const StateSpace& space = state.space();
  const std::size_t im = space.index_of(mode, SubsystemKind::photon_mode);
  const std::size_t iflag = space.index_of(flag, SubsystemKind::flag);
  PureState out = map_kets(state, [&](const BasisKet& ket) {
    if (ket[im] == 0 || ket[iflag] != 0 || !gate(ket)) return KetImage{{ket, Complex{1.0, 0.0}}};
    BasisKet k = ket;
    k[im] = static_cast<std::uint8_t>(k[im] - 1);
    k[iflag] = 1;
    return KetImage{{std::move(k), Complex{1.0, 0.0}}};
  });
  // Two kets merging onto one image would mean the flag was set by something
  // other than this absorber.
  if (std::abs(out.norm_sq() - state.norm_sq()) > 1e-12) {
    throw PhysicsError("absorption on '" + std::string(mode) + "' is not isometric on this state");
  }
  return out;
}

Truncation truncate_photon_number(const PureState& state) {
  const StateSpace& space = state.space();
  const auto cap = static_cast<unsigned>(space.n_max());
  auto fits = [&](const BasisKet& k) { return space.total_photons(k) <= cap; };
  double dropped = 0.0;
  for (const auto& [ket, amp] : state.terms()) {
    if (!fits(ket)) dropped += std::norm(amp);
  }
  return {project(state, fits), dropped};
}

}  // namespace rpesim
