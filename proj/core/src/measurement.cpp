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

#include "rpesim/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rpesim/error.hpp"

namespace rpesim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Matrix2cd pauli(int axis) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd m;
  switch (axis) {
    case 0: m << 0.0, 1.0, 1.0, 0.0; break;
    case 1: m << 0.0, -i, i, 0.0; break;
    default: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

// Projector onto spin up (sign = +1) or down (sign = -1) along dir.
Eigen::Matrix2cd spin_projector(const SpinDirection& dir, int sign) {
  const auto n = dir.bloch();
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (int k = 0; k < 3; ++k) m += static_cast<double>(sign) * n[k] * pauli(k);
  return 0.5 * m;
}

DensityMatrix two_atom_block(const DensityMatrix& rho, std::string_view atom1, std::string_view atom2) {
  const StateSpace& space = rho.space();
  space.index_of(atom1, SubsystemKind::atom2);
  space.index_of(atom2, SubsystemKind::atom2);
  if (atom1 == atom2) throw ConfigError("correlation needs two distinct atoms");
  const std::vector<std::string> keep{std::string(atom1), std::string(atom2)};
  return partial_trace(rho, keep);
}

void require_two_qubits(const DensityMatrix& rho) {
  if (rho.space().size() != 2 || rho.space()[0].kind != SubsystemKind::atom2 ||
      rho.space()[1].kind != SubsystemKind::atom2) {
    throw ConfigError("expected a density matrix of exactly two spin-1/2 atoms");
  }
}

Eigen::Matrix4cd normalized_4x4(const DensityMatrix& rho) {
  require_two_qubits(rho);
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw PhysicsError("density matrix has zero trace");
  return rho.matrix() / tr;
}

}  // namespace

SpinDirection::SpinDirection(double theta, double phi) : theta_(theta), phi_(phi) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ConfigError("spin direction theta must lie in [0, pi]");
  if (!(phi >= 0.0 && phi < kTwoPi)) throw ConfigError("spin direction phi must lie in [0, 2 pi)");
}

SpinDirection SpinDirection::in_xz_plane(double alpha) {
  const double x = std::sin(alpha);
  const double z = std::cos(alpha);
  return from_vector({x, 0.0, z});
}

SpinDirection SpinDirection::from_vector(const std::array<double, 3>& v) {
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(len > 0.0)) throw ConfigError("spin direction needs a nonzero vector");
  const double theta = std::acos(std::clamp(v[2] / len, -1.0, 1.0));
  double phi = std::atan2(v[1], v[0]);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return SpinDirection(theta, phi);
}

std::array<double, 3> SpinDirection::bloch() const {
  return {std::sin(theta_) * std::cos(phi_), std::sin(theta_) * std::sin(phi_), std::cos(theta_)};
}

SpinDirection SpinDirection::rotated_about_z(double angle) const {
  double phi = std::fmod(phi_ + angle, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return SpinDirection(theta_, phi);
}

ChshSetting ChshSetting::standard() {
  const double pi = std::numbers::pi;
  return {SpinDirection::in_xz_plane(0.0), SpinDirection::in_xz_plane(pi / 2.0), SpinDirection::in_xz_plane(pi / 4.0),
          SpinDirection::in_xz_plane(-pi / 4.0)};
}

Postselection postselect(const PureState& state, const std::function<bool(const BasisKet&)>& predicate) {
  PureState kept = project(state, predicate);
  const double p = kept.norm_sq();
  if (!(p > 0.0)) throw PhysicsError("post-selected event has zero probability");
  return {normalize(kept).state, p};
}

std::pair<double, double> spin_probabilities(const DensityMatrix& rho, std::string_view atom,
                                             const SpinDirection& dir) {
  rho.space().index_of(atom, SubsystemKind::atom2);
  const std::vector<std::string> keep{std::string(atom)};
  const DensityMatrix single = partial_trace(rho, keep);
  const Eigen::Matrix2cd m = single.matrix();
  const double up = (m * spin_projector(dir, +1)).trace().real();
  const double down = (m * spin_projector(dir, -1)).trace().real();
  return {up, down};
}

double correlation(const DensityMatrix& rho, std::string_view atom1, const SpinDirection& a, std::string_view atom2,
                   const SpinDirection& b) {
  const Eigen::Matrix4cd m = normalized_4x4(two_atom_block(rho, atom1, atom2));
  double e = 0.0;
  for (int s : {+1, -1}) {
    for (int t : {+1, -1}) {
      Eigen::Matrix4cd proj;
      const Eigen::Matrix2cd pa = spin_projector(a, s);
      const Eigen::Matrix2cd pb = spin_projector(b, t);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) proj(2 * i + k, 2 * j + l) = pa(i, j) * pb(k, l);
      e += s * t * (m * proj).trace().real();
    }
  }
  return e;
}

double chsh(const DensityMatrix& rho, const ChshSetting& setting) {
  require_two_qubits(rho);
  const std::string& x = rho.space()[0].name;
  const std::string& y = rho.space()[1].name;
  return correlation(rho, x, setting.a, y, setting.b) + correlation(rho, x, setting.a, y, setting.b2) +
         correlation(rho, x, setting.a2, y, setting.b) - correlation(rho, x, setting.a2, y, setting.b2);
}

Eigen::Matrix3d correlation_tensor(const DensityMatrix& rho) {
  const Eigen::Matrix4cd m = normalized_4x4(rho);
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Eigen::Matrix2cd si = pauli(i);
      const Eigen::Matrix2cd sj = pauli(j);
      Eigen::Matrix4cd op;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d) op(2 * a + c, 2 * b + d) = si(a, b) * sj(c, d);
      t(i, j) = (m * op).trace().real();
    }
  }
  return t;
}

double max_chsh(const DensityMatrix& rho) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(correlation_tensor(rho));
  const auto s = svd.singularValues();
  return 2.0 * std::sqrt(s(0) * s(0) + s(1) * s(1));
}

ChshSetting optimal_chsh_setting(const DensityMatrix& rho) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(correlation_tensor(rho), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  // T v_k = s_k u_k. Alice measures u_1, u_2; Bob splits the angle between
  // v_1 and v_2 in proportion to the singular values.
  const double alpha = std::atan2(s(1), s(0));
  const Eigen::Vector3d b = std::cos(alpha) * v.col(0) + std::sin(alpha) * v.col(1);
  const Eigen::Vector3d b2 = std::cos(alpha) * v.col(0) - std::sin(alpha) * v.col(1);
  auto dir = [](const Eigen::Vector3d& w) { return SpinDirection::from_vector({w(0), w(1), w(2)}); };
  return {dir(u.col(0)), dir(u.col(1)), dir(b), dir(b2)};
}

double concurrence(const DensityMatrix& rho) {
  rho.check_physical();
  const Eigen::Matrix4cd m = normalized_4x4(rho);
  Eigen::Matrix4cd yy;
  yy.setZero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;

  // rho = W W^dag over its numerical support; the square roots of the
  // eigenvalues of rho rho~ are the singular values of W^T (sy x sy) W.
  // Dropping round-off eigenvalues keeps their square roots (~1e-8) out.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (m + m.adjoint()));
  const Eigen::Vector4d ev = es.eigenvalues();
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(ev.maxCoeff(), 0.0);
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < 4; ++i) {
    if (ev(i) > floor) support.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd w(4, k);
  for (Eigen::Index j = 0; j < k; ++j) w.col(j) = es.eigenvectors().col(support[j]) * std::sqrt(ev(support[j]));
  const Eigen::MatrixXcd tau = w.transpose() * yy * w;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
  const Eigen::VectorXd s = svd.singularValues();  // descending
  double c = s.size() > 0 ? s(0) : 0.0;
  for (Eigen::Index i = 1; i < s.size(); ++i) c -= s(i);
  return std::max(0.0, c);
}

DensityMatrix restrict_to_qubits(const DensityMatrix& rho, double tol) {
  const StateSpace& space = rho.space();
  std::vector<SubsystemLabel> labels;
  for (const auto& l : space.labels()) {
    labels.push_back(l.kind == SubsystemKind::atom3 ? SubsystemLabel::atom2(l.name) : l);
  }
  StateSpace qspace(std::move(labels), space.n_max());
  const auto d = static_cast<Eigen::Index>(qspace.total_dim());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  DensityMatrix shell(qspace, out);

  std::vector<std::pair<std::size_t, std::size_t>> keep;  // (old index, new index)
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    const BasisKet k = rho.ket_at(i);
    bool inside = true;
    for (std::size_t s = 0; s < space.size(); ++s) {
      if (space[s].kind == SubsystemKind::atom3 && k[s] > 1) inside = false;
    }
    if (inside) keep.emplace_back(i, shell.index_of(k));
  }
  for (const auto& [oi, ni] : keep) {
    for (const auto& [oj, nj] : keep) {
      out(static_cast<Eigen::Index>(ni), static_cast<Eigen::Index>(nj)) =
          rho.matrix()(static_cast<Eigen::Index>(oi), static_cast<Eigen::Index>(oj));
    }
  }
  const double lost = rho.trace() - out.trace().real();
  if (lost > tol) throw PhysicsError("state has weight outside the two lowest atomic levels");
  return DensityMatrix(std::move(qspace), std::move(out));
}

DensityMatrix apply_local(const DensityMatrix& rho, std::string_view atom, const Eigen::Matrix2cd& u) {
  const std::size_t ia = rho.space().index_of(atom, SubsystemKind::atom2);
  const auto n = static_cast<Eigen::Index>(rho.dim());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const BasisKet k = rho.ket_at(static_cast<std::size_t>(col));
    for (std::uint8_t out = 0; out < 2; ++out) {
      BasisKet img = k;
      img[ia] = out;
      full(static_cast<Eigen::Index>(rho.index_of(img)), col) += u(out, k[ia]);
    }
  }
  return DensityMatrix(rho.space(), full * rho.matrix() * full.adjoint());
}

}  // namespace rpesim
