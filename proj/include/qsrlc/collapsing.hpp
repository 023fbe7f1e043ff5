// Copyright 2026 The qsrlc Authors
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

// Dephasing in the computational basis and the collapsing-map abstraction it
// instantiates. Split out of coherence.hpp so the entropy layer can use it.

#pragma once

#include <functional>
#include <string>

#include "qsrlc/qmat.hpp"

namespace qsrlc {

// Zeroes every entry whose row and column indices differ on a register in
// `labels`. Works on any operator, so it doubles as the adjoint map.
inline Matrix dephase_matrix(const RegisterSystem &sys, const Matrix &m, const LabelSet &labels) {
  auto split = detail::split_index(sys, labels);
  std::vector<std::size_t> key(sys.dim());
  for (std::size_t t = 0; t < split.target_dim; ++t)
    for (std::size_t r = 0; r < split.rest_dim; ++r) key[split(t, r)] = t;
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (key[static_cast<std::size_t>(i)] != key[static_cast<std::size_t>(j)]) out(i, j) = 0;
  return out;
}

inline DensityOperator dephase(const DensityOperator &rho, const LabelSet &labels) {
  return DensityOperator::trusted(rho.system(), dephase_matrix(rho.system(), rho.matrix(), labels),
                                  rho.subnormalized());
}

// Complete dephasing of every register.
inline DensityOperator dephase(const DensityOperator &rho) {
  Matrix d = rho.matrix().diagonal().asDiagonal();
  return DensityOperator::trusted(rho.system(), std::move(d), rho.subnormalized());
}

inline bool is_diagonal(const Matrix &m, double tolerance = tol::herm) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > tolerance) return false;
  return true;
}

// A trace-preserving map Delta with Delta_RS = Delta_R (x) Delta_S whose
// adjoint sends every 0 <= O <= I into the free measurement operators.
struct CollapsingMap {
  std::string name;
  // Delta applied to the registers `labels` of an operator on `sys`.
  std::function<Matrix(const RegisterSystem &, const Matrix &, const LabelSet &)> apply;
  // Delta^dagger, same signature.
  std::function<Matrix(const RegisterSystem &, const Matrix &, const LabelSet &)> apply_adjoint;
  bool surjective_wrt_free_ops = false;

  DensityOperator operator()(const DensityOperator &rho, const LabelSet &labels) const {
    return DensityOperator::trusted(rho.system(), apply(rho.system(), rho.matrix(), labels),
                                    rho.subnormalized());
  }

  DensityOperator operator()(const DensityOperator &rho) const { return (*this)(rho, rho.system().labels()); }

  // Complete dephasing; self-adjoint, idempotent, surjective onto the diagonal
  // tests.
  static CollapsingMap dephasing() {
    return {"dephasing", dephase_matrix, dephase_matrix, true};
  }
};

}  // namespace qsrlc
