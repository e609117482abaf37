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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <compare>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rpesim {

using Complex = std::complex<double>;

// Amplitudes smaller than this are dropped after every operation.
inline constexpr double kPruneThreshold = 1e-15;
// Slack allowed above unit norm for accumulated rounding.
inline constexpr double kNormSlack = 1e-12;
inline constexpr int kDefaultMaxPhotons = 1;

enum class SubsystemKind { photon_mode, atom2, atom3, flag };

std::string_view to_string(SubsystemKind kind);

struct SubsystemLabel {
  std::string name;
  SubsystemKind kind = SubsystemKind::flag;
  std::size_t dim = 2;

  static SubsystemLabel photon_mode(std::string name, int n_max = kDefaultMaxPhotons);
  // Spin-1/2 atom held in two boxes; level 0 is the z+ box, level 1 the z- box.
  static SubsystemLabel atom2(std::string name);
  // Three-level atom with ground states |0>, |1> and excited state |2>.
  static SubsystemLabel atom3(std::string name);
  // Absorption record; level 0 is clear, level 1 is absorbed.
  static SubsystemLabel flag(std::string name);

  bool operator==(const SubsystemLabel&) const = default;
};

// One classical configuration: a local level index per registered subsystem.
struct BasisKet {
  std::vector<std::uint8_t> levels;

  std::size_t size() const { return levels.size(); }
  std::uint8_t operator[](std::size_t i) const { return levels[i]; }
  std::uint8_t& operator[](std::size_t i) { return levels[i]; }

  auto operator<=>(const BasisKet&) const = default;
  bool operator==(const BasisKet&) const = default;
};

// Ordered registry of subsystems. Cheap to copy; the label list is shared
// and never mutated.
class StateSpace {
 public:
  StateSpace(std::vector<SubsystemLabel> labels, int n_max = kDefaultMaxPhotons);

  std::size_t size() const { return labels_->size(); }
  const SubsystemLabel& operator[](std::size_t i) const { return (*labels_)[i]; }
  std::span<const SubsystemLabel> labels() const { return *labels_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws ConfigError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  std::size_t index_of(std::string_view name, SubsystemKind expected) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  std::size_t total_dim() const;
  int n_max() const { return n_max_; }
  bool has_photon_modes() const;

  // Subsystems of `other` appended after ours. Names must be disjoint.
  StateSpace concat(const StateSpace& other) const;
  // The named subsystems, in the order given.
  StateSpace select(std::span<const std::string> names) const;

  // Ket with the given levels and zero everywhere else.
  BasisKet ket(std::initializer_list<std::pair<std::string_view, unsigned>> levels = {}) const;
  void check_ket(const BasisKet& ket) const;

  // Human-readable label, e.g. "d=1 z1=+ z2=+". Empty photon modes and clear
  // flags are omitted; a ket with nothing to show prints as "vac".
  std::string describe(const BasisKet& ket) const;

  unsigned total_photons(const BasisKet& ket) const;
  unsigned flags_set(const BasisKet& ket) const;

  bool operator==(const StateSpace& other) const;

 private:
  std::shared_ptr<const std::vector<SubsystemLabel>> labels_;
  int n_max_;
};

StateSpace new_space(std::vector<SubsystemLabel> labels, int n_max = kDefaultMaxPhotons);

// Sparse pure state. Sub-normalized states are legal: the missing weight is
// the probability of branches that were discarded upstream.
class PureState {
 public:
  using Terms = std::map<BasisKet, Complex>;

  PureState(StateSpace space, Terms terms);

  static PureState basis(const StateSpace& space, const BasisKet& ket);
  static PureState vacuum(const StateSpace& space);
  // State of a single subsystem with the given amplitudes per level.
  static PureState local(const SubsystemLabel& label, std::vector<Complex> amplitudes,
                         int n_max = kDefaultMaxPhotons);

  const StateSpace& space() const { return space_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  Complex amplitude(const BasisKet& ket) const;
  Complex amplitude(std::initializer_list<std::pair<std::string_view, unsigned>> levels) const {
    return amplitude(space_.ket(levels));
  }

  double norm_sq() const;

 private:
  StateSpace space_;
  Terms terms_;
};

using KetImage = std::vector<std::pair<BasisKet, Complex>>;

// Applies a linear map given by its action on basis kets, accumulating the
// images and pruning tiny amplitudes.
PureState map_kets(const PureState& state, const std::function<KetImage(const BasisKet&)>& image);

// Keeps the kets satisfying `keep`. The result is not renormalized.
PureState project(const PureState& state, const std::function<bool(const BasisKet&)>& keep);

PureState tensor(const PureState& a, const PureState& b);

double norm_sq(const PureState& state);

struct Normalized {
  PureState state;
  double probability;  // squared norm before normalization
};
Normalized normalize(const PureState& state);

// Same state with subsystems permuted into `order`, which must name every
// subsystem exactly once.
PureState reorder(const PureState& state, std::span<const std::string> order);

// Born decomposition over the levels of one subsystem.
struct Branch {
  unsigned outcome;
  double probability;
  PureState state;  // unnormalized projection onto this outcome

  PureState conditional() const;
};
std::vector<Branch> measure_subsystem(const PureState& state, std::string_view name);

// Amplitude distance after removing the best global phase, and fidelity
// |<a|b>|^2 for unit vectors. Both spaces must match.
double overlap_fidelity(const PureState& a, const PureState& b);
double phase_aligned_distance(const PureState& a, const PureState& b);

class DensityMatrix {
 public:
  DensityMatrix(StateSpace space, Eigen::MatrixXcd matrix);

  static DensityMatrix from_pure(const PureState& state);

  const StateSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  // Row-major mixed-radix index; the first subsystem is most significant.
  std::size_t index_of(const BasisKet& ket) const;
  BasisKet ket_at(std::size_t index) const;

  double trace() const { return matrix_.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

  // Throws PhysicsError unless Hermitian to `hermitian_tol`, eigenvalues are
  // above -`eigen_tol` and the trace lies in (0, 1 + eigen_tol].
  void check_physical(double hermitian_tol = 1e-12, double eigen_tol = 1e-10) const;

 private:
  StateSpace space_;
  Eigen::MatrixXcd matrix_;
};

DensityMatrix partial_trace(const PureState& state, std::span<const std::string> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);

}  // namespace rpesim
