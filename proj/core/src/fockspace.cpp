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

#include "rpesim/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "rpesim/error.hpp"

namespace rpesim {

namespace {

void require_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw PhysicsError("non-finite amplitude");
  }
}

void prune(PureState::Terms& terms) {
  std::erase_if(terms, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
}

}  // namespace

std::string_view to_string(SubsystemKind kind) {
  switch (kind) {
    case SubsystemKind::photon_mode: return "photon_mode";
    case SubsystemKind::atom2: return "atom2";
    case SubsystemKind::atom3: return "atom3";
    case SubsystemKind::flag: return "flag";
  }
  return "?";
}

SubsystemLabel SubsystemLabel::photon_mode(std::string name, int n_max) {
  if (n_max < 1) throw ConfigError("photon truncation n_max must be >= 1");
  return {std::move(name), SubsystemKind::photon_mode, static_cast<std::size_t>(n_max) + 1};
}
SubsystemLabel SubsystemLabel::atom2(std::string name) {
  return {std::move(name), SubsystemKind::atom2, 2};
}
SubsystemLabel SubsystemLabel::atom3(std::string name) {
  return {std::move(name), SubsystemKind::atom3, 3};
}
SubsystemLabel SubsystemLabel::flag(std::string name) {
  return {std::move(name), SubsystemKind::flag, 2};
}

// ---------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(std::vector<SubsystemLabel> labels, int n_max) : n_max_(n_max) {
  if (labels.empty()) throw ConfigError("a state space needs at least one subsystem");
  if (n_max < 1) throw ConfigError("photon truncation n_max must be >= 1");
  std::set<std::string_view> seen;
  for (const auto& l : labels) {
    if (l.name.empty()) throw ConfigError("subsystem names must be nonempty");
    if (!seen.insert(l.name).second) throw ConfigError("duplicate subsystem name '" + l.name + "'");
    if (l.dim < 2) throw ConfigError("subsystem '" + l.name + "' must have dimension >= 2");
    std::size_t expected = 0;
    switch (l.kind) {
      case SubsystemKind::photon_mode: expected = static_cast<std::size_t>(n_max) + 1; break;
      case SubsystemKind::atom2: expected = 2; break;
      case SubsystemKind::atom3: expected = 3; break;
      case SubsystemKind::flag: expected = 2; break;
    }
    if (l.dim != expected) {
      throw ConfigError("subsystem '" + l.name + "' of kind " + std::string(to_string(l.kind)) +
                        " must have dimension " + std::to_string(expected));
    }
    if (l.dim > 256) throw ConfigError("subsystem '" + l.name + "' is too large");
  }
  labels_ = std::make_shared<const std::vector<SubsystemLabel>>(std::move(labels));
}

StateSpace new_space(std::vector<SubsystemLabel> labels, int n_max) {
  return StateSpace(std::move(labels), n_max);
}

std::optional<std::size_t> StateSpace::find(std::string_view name) const {
  for (std::size_t i = 0; i < labels_->size(); ++i) {
    if ((*labels_)[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t StateSpace::index_of(std::string_view name) const {
  auto i = find(name);
  if (!i) throw ConfigError("unknown subsystem '" + std::string(name) + "'");
  return *i;
}

std::size_t StateSpace::index_of(std::string_view name, SubsystemKind expected) const {
  std::size_t i = index_of(name);
  if ((*labels_)[i].kind != expected) {
    throw ConfigError("subsystem '" + std::string(name) + "' is a " +
                      std::string(to_string((*labels_)[i].kind)) + ", expected " +
                      std::string(to_string(expected)));
  }
  return i;
}

std::size_t StateSpace::total_dim() const {
  std::size_t d = 1;
  for (const auto& l : *labels_) d *= l.dim;
  return d;
}

bool StateSpace::has_photon_modes() const {
  return std::any_of(labels_->begin(), labels_->end(),
                     [](const auto& l) { return l.kind == SubsystemKind::photon_mode; });
}

StateSpace StateSpace::concat(const StateSpace& other) const {
  for (const auto& l : other.labels()) {
    if (contains(l.name)) throw ConfigError("subsystem '" + l.name + "' appears in both factors");
  }
  int n_max = std::max(n_max_, other.n_max_);
  if (has_photon_modes() && other.has_photon_modes() && n_max_ != other.n_max_) {
    throw ConfigError("cannot combine spaces with different photon truncations");
  }
  if (has_photon_modes() && !other.has_photon_modes()) n_max = n_max_;
  if (other.has_photon_modes() && !has_photon_modes()) n_max = other.n_max_;
  std::vector<SubsystemLabel> all(labels_->begin(), labels_->end());
  all.insert(all.end(), other.labels().begin(), other.labels().end());
  return StateSpace(std::move(all), n_max);
}

StateSpace StateSpace::select(std::span<const std::string> names) const {
  std::vector<SubsystemLabel> picked;
  picked.reserve(names.size());
  for (const auto& n : names) picked.push_back((*labels_)[index_of(n)]);
  return StateSpace(std::move(picked), n_max_);
}

BasisKet StateSpace::ket(std::initializer_list<std::pair<std::string_view, unsigned>> levels) const {
  BasisKet k{std::vector<std::uint8_t>(size(), 0)};
  for (const auto& [name, level] : levels) {
    std::size_t i = index_of(name);
    if (level >= (*labels_)[i].dim) {
      throw ConfigError("level " + std::to_string(level) + " out of range for '" + std::string(name) + "'");
    }
    k[i] = static_cast<std::uint8_t>(level);
  }
  return k;
}

void StateSpace::check_ket(const BasisKet& ket) const {
  if (ket.size() != size()) throw ConfigError("ket length does not match the state space");
  for (std::size_t i = 0; i < size(); ++i) {
    if (ket[i] >= (*labels_)[i].dim) {
      throw ConfigError("ket level out of range for '" + (*labels_)[i].name + "'");
    }
  }
}

std::string StateSpace::describe(const BasisKet& ket) const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const std::string& name, const std::string& value) {
    if (!first) os << ' ';
    os << name << '=' << value;
    first = false;
  };
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& l = (*labels_)[i];
    unsigned v = ket[i];
    switch (l.kind) {
      case SubsystemKind::photon_mode:
        if (v > 0) emit(l.name, std::to_string(v));
        break;
      case SubsystemKind::atom2: emit(l.name, v == 0 ? "+" : "-"); break;
      case SubsystemKind::atom3: emit(l.name, std::to_string(v)); break;
      case SubsystemKind::flag:
        if (v > 0) emit(l.name, "absorbed");
        break;
    }
  }
  return first ? std::string("vac") : os.str();
}

unsigned StateSpace::total_photons(const BasisKet& ket) const {
  unsigned n = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if ((*labels_)[i].kind == SubsystemKind::photon_mode) n += ket[i];
  }
  return n;
}

unsigned StateSpace::flags_set(const BasisKet& ket) const {
  unsigned n = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if ((*labels_)[i].kind == SubsystemKind::flag && ket[i] != 0) ++n;
  }
  return n;
}

bool StateSpace::operator==(const StateSpace& other) const {
  if (labels_ == other.labels_) return n_max_ == other.n_max_;
  return n_max_ == other.n_max_ && *labels_ == *other.labels_;
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(StateSpace space, Terms terms) : space_(std::move(space)), terms_(std::move(terms)) {
  for (const auto& [ket, amp] : terms_) {
    space_.check_ket(ket);
    require_finite(amp);
  }
  prune(terms_);
  if (norm_sq() > 1.0 + kNormSlack) {
    throw PhysicsError("state norm exceeds 1 (" + std::to_string(norm_sq()) + ")");
  }
}

PureState PureState::basis(const StateSpace& space, const BasisKet& ket) {
  return PureState(space, Terms{{ket, Complex{1.0, 0.0}}});
}

PureState PureState::vacuum(const StateSpace& space) {
  return basis(space, BasisKet{std::vector<std::uint8_t>(space.size(), 0)});
}

PureState PureState::local(const SubsystemLabel& label, std::vector<Complex> amplitudes, int n_max) {
  StateSpace space({label}, n_max);
  if (amplitudes.size() != label.dim) {
    throw ConfigError("expected " + std::to_string(label.dim) + " amplitudes for '" + label.name + "'");
  }
  Terms terms;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    terms.emplace(BasisKet{{static_cast<std::uint8_t>(i)}}, amplitudes[i]);
  }
  return PureState(std::move(space), std::move(terms));
}

Complex PureState::amplitude(const BasisKet& ket) const {
  auto it = terms_.find(ket);
  return it == terms_.end() ? Complex{} : it->second;
}

double PureState::norm_sq() const {
  double s = 0.0;
  for (const auto& [ket, amp] : terms_) s += std::norm(amp);
  return s;
}

PureState map_kets(const PureState& state, const std::function<KetImage(const BasisKet&)>& image) {
  PureState::Terms out;
  for (const auto& [ket, amp] : state.terms()) {
    for (auto& [k, c] : image(ket)) out[std::move(k)] += amp * c;
  }
  return PureState(state.space(), std::move(out));
}

PureState project(const PureState& state, const std::function<bool(const BasisKet&)>& keep) {
  PureState::Terms out;
  for (const auto& [ket, amp] : state.terms()) {
    if (keep(ket)) out.emplace(ket, amp);
  }
  return PureState(state.space(), std::move(out));
}

PureState tensor(const PureState& a, const PureState& b) {
  StateSpace space = a.space().concat(b.space());
  PureState::Terms out;
  for (const auto& [ka, va] : a.terms()) {
    for (const auto& [kb, vb] : b.terms()) {
      BasisKet k = ka;
      k.levels.insert(k.levels.end(), kb.levels.begin(), kb.levels.end());
      out.emplace(std::move(k), va * vb);
    }
  }
  return PureState(std::move(space), std::move(out));
}

double norm_sq(const PureState& state) { return state.norm_sq(); }

Normalized normalize(const PureState& state) {
  const double p = state.norm_sq();
  if (!(p > 0.0)) throw PhysicsError("cannot normalize the zero state");
  const double scale = 1.0 / std::sqrt(p);
  PureState::Terms out;
  for (const auto& [ket, amp] : state.terms()) out.emplace(ket, amp * scale);
  // Rescaling can push the norm a few ulps above 1; the constructor slack covers it.
  return {PureState(state.space(), std::move(out)), p};
}

PureState reorder(const PureState& state, std::span<const std::string> order) {
  const StateSpace& from = state.space();
  if (order.size() != from.size()) throw ConfigError("reorder must name every subsystem exactly once");
  StateSpace to = from.select(order);
  std::vector<std::size_t> src(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) src[i] = from.index_of(order[i]);
  PureState::Terms out;
  for (const auto& [ket, amp] : state.terms()) {
    BasisKet k{std::vector<std::uint8_t>(order.size())};
    for (std::size_t i = 0; i < order.size(); ++i) k[i] = ket[src[i]];
    out.emplace(std::move(k), amp);
  }
  return PureState(std::move(to), std::move(out));
}

PureState Branch::conditional() const { return normalize(state).state; }

std::vector<Branch> measure_subsystem(const PureState& state, std::string_view name) {
  const std::size_t idx = state.space().index_of(name);
  const std::size_t dim = state.space()[idx].dim;
  std::vector<PureState::Terms> parts(dim);
  for (const auto& [ket, amp] : state.terms()) parts[ket[idx]].emplace(ket, amp);
  std::vector<Branch> out;
  out.reserve(dim);
  for (std::size_t level = 0; level < dim; ++level) {
    PureState s(state.space(), std::move(parts[level]));
    const double p = s.norm_sq();
    out.push_back({static_cast<unsigned>(level), p, std::move(s)});
  }
  return out;
}

namespace {

Complex inner(const PureState& a, const PureState& b) {
  if (!(a.space() == b.space())) throw ConfigError("states live in different spaces");
  Complex s{};
  for (const auto& [ket, amp] : a.terms()) s += std::conj(amp) * b.amplitude(ket);
  return s;
}

}  // namespace

double overlap_fidelity(const PureState& a, const PureState& b) {
  return std::norm(inner(a, b)) / (a.norm_sq() * b.norm_sq());
}

double phase_aligned_distance(const PureState& a, const PureState& b) {
  const Complex ov = inner(a, b);
  const Complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex{1.0, 0.0};
  // || phase * a - b ||
  double d = 0.0;
  std::set<BasisKet> keys;
  for (const auto& [k, v] : a.terms()) keys.insert(k);
  for (const auto& [k, v] : b.terms()) keys.insert(k);
  for (const auto& k : keys) d += std::norm(phase * a.amplitude(k) - b.amplitude(k));
  return std::sqrt(d);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(StateSpace space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw ConfigError("density matrix shape does not match its space");
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  std::vector<std::string> all;
  for (const auto& l : state.space().labels()) all.push_back(l.name);
  return partial_trace(state, all);
}

std::size_t DensityMatrix::index_of(const BasisKet& ket) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < space_.size(); ++i) idx = idx * space_[i].dim + ket[i];
  return idx;
}

BasisKet DensityMatrix::ket_at(std::size_t index) const {
  BasisKet k{std::vector<std::uint8_t>(space_.size())};
  for (std::size_t i = space_.size(); i-- > 0;) {
    k[i] = static_cast<std::uint8_t>(index % space_[i].dim);
    index /= space_[i].dim;
  }
  return k;
}

double DensityMatrix::hermiticity_error() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::check_physical(double hermitian_tol, double eigen_tol) const {
  if (hermiticity_error() > hermitian_tol) throw PhysicsError("density matrix is not Hermitian");
  const double tr = trace();
  if (!(tr > 0.0) || tr > 1.0 + eigen_tol) throw PhysicsError("density matrix trace out of range");
  if (min_eigenvalue() < -eigen_tol) throw PhysicsError("density matrix is not positive semidefinite");
}

namespace {

// Splits each ket into (kept index, traced-out remainder).
struct TraceSplit {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> traced;
};

TraceSplit split_for_trace(const StateSpace& space, std::span<const std::string> keep) {
  TraceSplit s;
  std::vector<bool> is_kept(space.size(), false);
  for (const auto& name : keep) {
    std::size_t i = space.index_of(name);
    if (is_kept[i]) throw ConfigError("subsystem '" + name + "' listed twice");
    is_kept[i] = true;
    s.kept.push_back(i);
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!is_kept[i]) s.traced.push_back(i);
  }
  return s;
}

}  // namespace

DensityMatrix partial_trace(const PureState& state, std::span<const std::string> keep) {
  if (keep.empty()) throw ConfigError("partial trace must keep at least one subsystem");
  const StateSpace& space = state.space();
  const TraceSplit split = split_for_trace(space, keep);
  StateSpace kept_space = space.select(keep);

  // Group amplitudes by the traced-out configuration; each group is one
  // unnormalized vector on the kept subsystems.
  std::map<std::vector<std::uint8_t>, std::vector<std::pair<std::size_t, Complex>>> groups;
  for (const auto& [ket, amp] : state.terms()) {
    std::vector<std::uint8_t> env;
    env.reserve(split.traced.size());
    for (std::size_t i : split.traced) env.push_back(ket[i]);
    std::size_t idx = 0;
    for (std::size_t i : split.kept) idx = idx * space[i].dim + ket[i];
    groups[env].emplace_back(idx, amp);
  }

  const auto d = static_cast<Eigen::Index>(kept_space.total_dim());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [env, vec] : groups) {
    for (const auto& [i, ai] : vec) {
      for (const auto& [j, aj] : vec) {
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += ai * std::conj(aj);
      }
    }
  }
  return DensityMatrix(std::move(kept_space), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  if (keep.empty()) throw ConfigError("partial trace must keep at least one subsystem");
  const StateSpace& space = rho.space();
  const TraceSplit split = split_for_trace(space, keep);
  StateSpace kept_space = space.select(keep);
  const auto d = static_cast<Eigen::Index>(kept_space.total_dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);

  const std::size_t n = rho.dim();
  std::vector<std::size_t> kept_idx(n);
  std::vector<std::size_t> env_idx(n);
  for (std::size_t a = 0; a < n; ++a) {
    const BasisKet k = rho.ket_at(a);
    std::size_t ki = 0;
    std::size_t ei = 0;
    for (std::size_t i : split.kept) ki = ki * space[i].dim + k[i];
    for (std::size_t i : split.traced) ei = ei * space[i].dim + k[i];
    kept_idx[a] = ki;
    env_idx[a] = ei;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (env_idx[a] != env_idx[b]) continue;
      out(static_cast<Eigen::Index>(kept_idx[a]), static_cast<Eigen::Index>(kept_idx[b])) +=
          rho.matrix()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return DensityMatrix(std::move(kept_space), std::move(out));
}

}  // namespace rpesim
