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

// Seeded random instances. Pure states are Haar distributed (normalized
// complex Gaussian amplitudes); mixed states are marginals of a seeded pure
// state on system (x) environment. Given the same seed and call sequence the
// instances are identical, so oracles can regenerate them.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include "qsrlc/qmat.hpp"

namespace qsrlc {

using Rng = std::mt19937_64;

inline Vector random_gaussian_vector(std::size_t d, Rng &rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  for (auto &x : v) {
    double re = n01(rng);
    double im = n01(rng);
    x = Complex(re, im);
  }
  return v;
}

inline StateVector random_state_vector(const RegisterSystem &system, Rng &rng) {
  return StateVector::normalized(system, random_gaussian_vector(system.dim(), rng));
}

// Marginal of a Haar-random pure state on system (x) C^env_dim.
inline DensityOperator random_density(const RegisterSystem &system, Rng &rng, std::size_t env_dim = 0) {
  const std::size_t d = system.dim();
  if (env_dim == 0) env_dim = d;
  Vector v = random_gaussian_vector(d * env_dim, rng);
  v /= v.norm();
  Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
      v.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(env_dim));
  Matrix rho = a * a.adjoint();
  return DensityOperator::trusted(system, rho / rho.trace().real());
}

// Haar-random unitary: QR of a Ginibre matrix with the R-diagonal phases
// absorbed.
inline Matrix random_unitary(std::size_t d, Rng &rng) {
  Vector g = random_gaussian_vector(d * d, rng);
  Eigen::MatrixXcd m = Eigen::Map<Eigen::MatrixXcd>(g.data(), static_cast<Eigen::Index>(d),
                                                    static_cast<Eigen::Index>(d));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(d); ++i) {
    double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

// Random CPTP map with at least `num_kraus` Kraus operators, cut from a random
// isometry.
inline KrausChannel random_channel(const RegisterSystem &in, const RegisterSystem &out,
                                   std::size_t num_kraus, Rng &rng) {
  const std::size_t di = in.dim(), dout = out.dim();
  // A trace-preserving map needs at least ceil(di / dout) Kraus operators.
  num_kraus = std::max(num_kraus, (di + dout - 1) / dout);
  Matrix u = random_unitary(dout * num_kraus, rng);
  std::vector<Matrix> ks;
  for (std::size_t k = 0; k < num_kraus; ++k)
    ks.push_back(u.block(static_cast<Eigen::Index>(k * dout), 0, static_cast<Eigen::Index>(dout),
                         static_cast<Eigen::Index>(di)));
  return KrausChannel(in, out, std::move(ks));
}

// Rank-r orthogonal projector in a Haar-random basis.
inline Matrix random_projector(std::size_t d, std::size_t rank, Rng &rng) {
  Matrix u = random_unitary(d, rng);
  auto r = static_cast<Eigen::Index>(rank);
  return u.leftCols(r) * u.leftCols(r).adjoint();
}

// Random operator with 0 <= A <= I.
inline Matrix random_effect(std::size_t d, Rng &rng) {
  Matrix u = random_unitary(d, rng);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::VectorXcd ev(static_cast<Eigen::Index>(d));
  for (auto &x : ev) x = u01(rng);
  return u * ev.asDiagonal() * u.adjoint();
}

inline std::vector<double> random_probabilities(std::size_t d, Rng &rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(d);
  double s = 0;
  for (auto &x : p) s += (x = ex(rng));
  for (auto &x : p) x /= s;
  return p;
}

// A pair of commuting states: diagonal in a shared random basis.
inline std::pair<DensityOperator, DensityOperator> random_commuting_pair(const RegisterSystem &system,
                                                                         Rng &rng) {
  const std::size_t d = system.dim();
  Matrix u = random_unitary(d, rng);
  auto p = random_probabilities(d, rng);
  auto q = random_probabilities(d, rng);
  Eigen::VectorXcd pv(static_cast<Eigen::Index>(d)), qv(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    pv[static_cast<Eigen::Index>(i)] = p[i];
    qv[static_cast<Eigen::Index>(i)] = q[i];
  }
  return {DensityOperator::trusted(system, u * pv.asDiagonal() * u.adjoint()),
          DensityOperator::trusted(system, u * qv.asDiagonal() * u.adjoint())};
}

// Incoherent Kraus set: K_i = sum_j c_ij |pi_i(j)><j| for random permutations
// pi_i and columns c_.j of unit norm, so each column of each K_i has a single
// nonzero entry and sum_i K_i^dagger K_i = I.
inline KrausChannel random_incoherent_channel(const RegisterSystem &system, std::size_t num_kraus, Rng &rng) {
  const auto d = static_cast<Eigen::Index>(system.dim());
  std::vector<std::vector<Eigen::Index>> perms(num_kraus);
  for (auto &p : perms) {
    p.resize(static_cast<std::size_t>(d));
    std::iota(p.begin(), p.end(), Eigen::Index{0});
    std::shuffle(p.begin(), p.end(), rng);
  }
  std::vector<Matrix> ks(num_kraus, Matrix::Zero(d, d));
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector c = random_gaussian_vector(num_kraus, rng);
    c /= c.norm();
    for (std::size_t i = 0; i < num_kraus; ++i)
      ks[i](perms[i][static_cast<std::size_t>(j)], j) = c[static_cast<Eigen::Index>(i)];
  }
  return KrausChannel(system, system, std::move(ks));
}

}  // namespace qsrlc
