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

// Dense brute-force reference for the canned scenarios at n_max = 1.
//
// Each photon lives in a one-hot "path" register instead of Fock modes, every
// element is an explicit unitary matrix on the full (<= 256 dimensional)
// space, and states are advanced by plain matrix-vector products. Nothing
// here calls into the rpesim library.

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rpesim::oracle {

using Complex = std::complex<double>;
using Probabilities = std::map<std::string, double>;

class DenseSystem {
 public:
  explicit DenseSystem(std::vector<std::pair<std::string, int>> registers);

  int dim() const { return dim_; }
  int reg(const std::string& name) const;
  int index(const std::vector<int>& levels) const;
  std::vector<int> levels(int index) const;

  // Operator acting as `local` on register `name` and as identity elsewhere.
  Eigen::MatrixXcd lift(const std::string& name, const Eigen::MatrixXcd& local) const;
  // Permutation matrix sending basis state `levels` to f(levels); f must be a bijection.
  Eigen::MatrixXcd permutation(const std::function<std::vector<int>(std::vector<int>)>& f) const;
  // Total weight of basis states satisfying pred.
  double weight(const Eigen::VectorXcd& psi, const std::function<bool(const std::vector<int>&)>& pred) const;

 private:
  std::vector<std::pair<std::string, int>> regs_;
  int dim_ = 1;
};

// 2x2 block on levels (x, y) of a register of size n: x -> t x + r y, y -> r x + t y.
Eigen::MatrixXcd splitter_block(int n, int x, int y);
// Swaps levels (x, y) of a register of size n.
Eigen::MatrixXcd swap_levels(int n, int x, int y);

Probabilities mzi(bool bs_present, double phase);
Probabilities hardy(bool bs_present, bool prep_up_phase_i, double phase);
Probabilities two_source(bool bs_present, bool ifm, bool blocker, double p, double phase);
Probabilities rpe_coherent(bool bs_present, bool prep_up_phase_i, double p, double phase);
Probabilities rpe_incoherent(bool bs_present, double epsilon, double phase);

}  // namespace rpesim::oracle
