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

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "rpesim/fockspace.hpp"

namespace rpesim {

// Measurement axis on the Bloch sphere: theta in [0, pi], phi in [0, 2 pi).
class SpinDirection {
 public:
  SpinDirection() = default;
  // Throws ConfigError outside the stated ranges.
  SpinDirection(double theta, double phi);

  // Axis in the x-z plane at signed angle `alpha` from +z towards +x.
  static SpinDirection in_xz_plane(double alpha);
  static SpinDirection from_vector(const std::array<double, 3>& v);

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  std::array<double, 3> bloch() const;

  // Same axis rotated about z by `angle`.
  SpinDirection rotated_about_z(double angle) const;

 private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

struct ChshSetting {
  SpinDirection a;
  SpinDirection a2;
  SpinDirection b;
  SpinDirection b2;

  // x-z plane quadruple (0, pi/2) for the first atom and (pi/4, -pi/4) for
  // the second; maximal for (z+z+ + z-z-)/sqrt(2).
  static ChshSetting standard();
};

struct Postselection {
  PureState state;     // normalized
  double probability;  // squared norm of the selected branch
};

// Throws PhysicsError for a zero-probability event.
Postselection postselect(const PureState& state, const std::function<bool(const BasisKet&)>& predicate);

// Up/down probabilities for `atom` (an atom2 subsystem of rho) along `dir`.
// They sum to trace(rho).
std::pair<double, double> spin_probabilities(const DensityMatrix& rho, std::string_view atom, const SpinDirection& dir);

// P(same) - P(different) for spin outcomes along a on atom1 and b on atom2,
// normalized by the trace of rho.
double correlation(const DensityMatrix& rho, std::string_view atom1, const SpinDirection& a, std::string_view atom2,
                   const SpinDirection& b);

// rho must be exactly two atom2 subsystems; the first takes a/a2.
double chsh(const DensityMatrix& rho, const ChshSetting& setting);

// 3x3 correlation tensor T_ij = tr(rho sigma_i x sigma_j) / tr(rho).
Eigen::Matrix3d correlation_tensor(const DensityMatrix& rho);

// Largest CHSH value over all settings, 2 sqrt(s1^2 + s2^2) from the two
// largest singular values of the correlation tensor.
double max_chsh(const DensityMatrix& rho);
// A setting attaining max_chsh.
ChshSetting optimal_chsh_setting(const DensityMatrix& rho);

// Wootters concurrence of a two-qubit state (normalized by its trace).
// Throws PhysicsError for a non-PSD or non-Hermitian input.
double concurrence(const DensityMatrix& rho);

// Restricts each atom3 subsystem of rho to levels {0, 1}, relabelled as
// atom2. Throws PhysicsError when weight outside that block exceeds `tol`.
DensityMatrix restrict_to_qubits(const DensityMatrix& rho, double tol = 1e-12);

// Applies a local 2x2 unitary to an atom2 subsystem: rho -> U rho U^dag.
DensityMatrix apply_local(const DensityMatrix& rho, std::string_view atom, const Eigen::Matrix2cd& u);

}  // namespace rpesim
