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

// Convex-split states
//
//   tau_{P Q_1..Q_n} = (1/n) sum_j rho_{P Q_j} (x) sigma^{(x)(n-1)} on the other Q's
//
// and their fidelity with rho_P (x) sigma^{(x)n}. Two routes:
//
//  * dense: materialize tau (any dimensions, small n);
//  * symmetric: for a qubit Q both operators are invariant under permutations
//    of Q_1..Q_n, so by Schur-Weyl duality they are block diagonal over the
//    irreps J of GL(2), with blocks of dimension d_P (2J+1) repeated mult_J
//    times. The tau block is (1/n) sum_ab |a><b| (x) dpi_J(sigma; R_ab), the
//    derivative of pi_J at sigma in direction R_ab = <a|rho_PQ|b>.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qsrlc/entropy.hpp"
#include "qsrlc/qmat.hpp"

namespace qsrlc {

inline constexpr std::size_t kDefaultDensityBudget = std::size_t{1} << 10;

inline RegisterSystem convex_split_system(const DensityOperator &rho_pq, const std::string &q_label,
                                          std::size_t n) {
  auto p_labels = rho_pq.system().complement({q_label});
  std::vector<Register> regs;
  for (const auto &l : p_labels) regs.push_back({l, rho_pq.system().dim_of(l)});
  for (std::size_t j = 0; j < n; ++j) regs.push_back({q_label + std::to_string(j + 1), rho_pq.system().dim_of(q_label)});
  return RegisterSystem(std::move(regs));
}

namespace detail {

inline void require_convex_split_inputs(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                        const std::string &q_label, std::size_t n) {
  if (n == 0) throw InputError("convex split needs n >= 1");
  if (!rho_pq.system().contains(q_label)) throw InputError("convex split: no register '" + q_label + "'");
  if (sigma_q.dim() != rho_pq.system().dim_of(q_label))
    throw InputError("convex split: sigma_Q dimension does not match register " + q_label);
  if (!relative_entropy(partial_trace(rho_pq, {q_label}), sigma_q).finite)
    throw InputError("convex split: supp(rho_Q) is not contained in supp(sigma_Q)");
}

inline Matrix tensor_power(const Matrix &m, std::size_t n) {
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t i = 0; i < n; ++i) out = kron(out, m);
  return out;
}

}  // namespace detail

// The convex-split mixture on P, Q1..Qn (P registers keep their labels; Q
// copies are named q_label1..q_labeln).
inline DensityOperator convex_split_state(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                          std::size_t n, const std::string &q_label = "Q",
                                          std::size_t density_budget = kDefaultDensityBudget) {
  detail::require_convex_split_inputs(rho_pq, sigma_q, q_label, n);
  auto sys = convex_split_system(rho_pq, q_label, n);
  if (sys.dim() > density_budget)
    throw BudgetError("convex split state of dimension " + std::to_string(sys.dim()) + " exceeds density budget " +
                      std::to_string(density_budget));
  auto p_labels = rho_pq.system().complement({q_label});
  // rho_PQ with P registers first and Q last.
  LabelSet pq_order = p_labels;
  pq_order.push_back(q_label);
  Matrix base = reorder(rho_pq, pq_order).matrix();
  Matrix rest = detail::tensor_power(sigma_q.matrix(), n - 1);
  Matrix term_first = detail::kron(base, rest);  // order P, Q_j, others

  const auto d = static_cast<Eigen::Index>(sys.dim());
  Matrix acc = Matrix::Zero(d, d);
  // Term j: place the correlated copy at position j by permuting registers.
  std::vector<Register> regs;
  for (const auto &l : p_labels) regs.push_back({l, rho_pq.system().dim_of(l)});
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Register> term_regs = regs;
    term_regs.push_back({q_label + std::to_string(j + 1), sigma_q.dim()});
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) term_regs.push_back({q_label + std::to_string(i + 1), sigma_q.dim()});
    auto term = DensityOperator::trusted(RegisterSystem(term_regs), term_first);
    acc += reorder(term, sys.labels()).matrix();
  }
  return DensityOperator::trusted(sys, acc / static_cast<double>(n));
}

inline DensityOperator convex_split_reference(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                              std::size_t n, const std::string &q_label = "Q") {
  auto sys = convex_split_system(rho_pq, q_label, n);
  auto p_labels = rho_pq.system().complement({q_label});
  Matrix rho_p = partial_trace(rho_pq, p_labels).matrix();
  return DensityOperator::trusted(sys, detail::kron(rho_p, detail::tensor_power(sigma_q.matrix(), n)));
}

namespace detail {

// Polynomials in (x, y) of fixed total degree, stored by power of y.
using Poly = std::vector<Complex>;

inline Poly poly_mul(const Poly &a, const Poly &b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Poly poly_pow(const Poly &a, std::size_t e) {
  Poly out{1.0};
  for (std::size_t i = 0; i < e; ++i) out = poly_mul(out, a);
  return out;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

// Image of X (2x2) acting on the k-th symmetric power, in the normalized
// Dicke basis |D_m>, m = number of ones. With r = 0 this is Sym^k(X); with
// r = R it is the derivative of Sym^k at X in direction R.
inline Matrix symmetric_power(const Matrix &x, std::size_t k, const Matrix *direction = nullptr) {
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix out = Matrix::Zero(kk + 1, kk + 1);
  // X|0> = x00 |0> + x10 |1>  <->  x00 x + x10 y.
  Poly u{x(0, 0), x(1, 0)}, v{x(0, 1), x(1, 1)};
  for (std::size_t l = 0; l <= k; ++l) {
    Poly c;
    if (!direction) {
      c = poly_mul(poly_pow(u, k - l), poly_pow(v, l));
    } else {
      const Matrix &r = *direction;
      Poly du{r(0, 0), r(1, 0)}, dv{r(0, 1), r(1, 1)};
      c.assign(k + 1, 0.0);
      if (k - l > 0) {
        Poly t = poly_mul(poly_mul(poly_pow(u, k - l - 1), du), poly_pow(v, l));
        for (std::size_t m = 0; m <= k; ++m) c[m] += static_cast<double>(k - l) * t[m];
      }
      if (l > 0) {
        Poly t = poly_mul(poly_mul(poly_pow(u, k - l), poly_pow(v, l - 1)), dv);
        for (std::size_t m = 0; m <= k; ++m) c[m] += static_cast<double>(l) * t[m];
      }
    }
    for (std::size_t m = 0; m <= k; ++m)
      out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) =
          c[m] * std::sqrt(binomial(k, l) / binomial(k, m));
  }
  return out;
}

inline Complex det2(const Matrix &x) { return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0); }

// z^e with 0^0 = 1.
inline Complex ipow(Complex z, std::size_t e) {
  Complex out = 1.0;
  for (std::size_t i = 0; i < e; ++i) out *= z;
  return out;
}

// pi_J(X) = det(X)^a Sym^k(X) with k = 2J, a = n/2 - J.
inline Matrix gl2_irrep(const Matrix &x, std::size_t a, std::size_t k) {
  return ipow(det2(x), a) * symmetric_power(x, k);
}

// d/dt pi_J(X + tR) at t = 0.
inline Matrix gl2_irrep_derivative(const Matrix &x, const Matrix &r, std::size_t a, std::size_t k) {
  Complex det = det2(x);
  Matrix out = ipow(det, a) * symmetric_power(x, k, &r);
  if (a > 0) {
    // d det(X)[R] = tr(adj(X) R).
    Complex ddet = x(1, 1) * r(0, 0) - x(0, 1) * r(1, 0) - x(1, 0) * r(0, 1) + x(0, 0) * r(1, 1);
    out += static_cast<double>(a) * ipow(det, a - 1) * ddet * symmetric_power(x, k);
  }
  return out;
}

}  // namespace detail

struct SymmetricBlock {
  std::size_t k = 0;  // 2J
  double multiplicity = 0;
  Matrix tau;
  Matrix omega;
  Matrix omega_sqrt;
};

inline constexpr std::size_t kMaxSymmetricCopies = 512;

// Blocks of tau and rho_P (x) sigma^{(x)n} over the irreps of GL(2). Requires a
// qubit Q.
inline std::vector<SymmetricBlock> convex_split_blocks(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                                       std::size_t n, const std::string &q_label = "Q") {
  detail::require_convex_split_inputs(rho_pq, sigma_q, q_label, n);
  if (sigma_q.dim() != 2) throw InputError("symmetric convex split route needs a qubit Q");
  if (n > kMaxSymmetricCopies)
    throw BudgetError("symmetric convex split limited to n <= " + std::to_string(kMaxSymmetricCopies));
  auto p_labels = rho_pq.system().complement({q_label});
  LabelSet pq_order = p_labels;
  pq_order.push_back(q_label);
  Matrix m = reorder(rho_pq, pq_order).matrix();
  const auto dp = m.rows() / 2;
  Matrix rho_p = Matrix::Zero(dp, dp);
  for (Eigen::Index a = 0; a < dp; ++a)
    for (Eigen::Index b = 0; b < dp; ++b) rho_p(a, b) = m(2 * a, 2 * b) + m(2 * a + 1, 2 * b + 1);
  const Matrix &s = sigma_q.matrix();
  // pi_J is multiplicative, so pi_J(sqrt(sigma)) is the square root of pi_J(sigma).
  const Matrix rho_p_sqrt = detail::psd_sqrt(rho_p), s_sqrt = detail::psd_sqrt(s);

  std::vector<SymmetricBlock> blocks;
  for (std::size_t a = 0; 2 * a <= n; ++a) {
    const std::size_t k = n - 2 * a;
    SymmetricBlock blk;
    blk.k = k;
    blk.multiplicity = detail::binomial(n, a) - (a > 0 ? detail::binomial(n, a - 1) : 0.0);
    const auto dj = static_cast<Eigen::Index>(k + 1);
    blk.tau = Matrix::Zero(dp * dj, dp * dj);
    for (Eigen::Index i = 0; i < dp; ++i)
      for (Eigen::Index j = 0; j < dp; ++j) {
        Matrix r = m.block(2 * i, 2 * j, 2, 2);
        blk.tau.block(i * dj, j * dj, dj, dj) = detail::gl2_irrep_derivative(s, r, a, k) / static_cast<double>(n);
      }
    blk.omega = detail::kron(rho_p, detail::gl2_irrep(s, a, k));
    blk.omega_sqrt = detail::kron(rho_p_sqrt, detail::gl2_irrep(s_sqrt, a, k));
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

inline double convex_split_fidelity_symmetric(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                              std::size_t n, const std::string &q_label = "Q") {
  double f = 0;
  for (const auto &blk : convex_split_blocks(rho_pq, sigma_q, n, q_label)) {
    // ||sqrt(tau) sqrt(omega)||_1 = Tr sqrt(sqrt(omega) tau sqrt(omega)).
    Matrix m = blk.omega_sqrt * blk.tau * blk.omega_sqrt;
    double block = 0;
    for (double x : detail::hermitian_eigenvalues(m)) block += std::sqrt(std::max(x, 0.0));
    f += blk.multiplicity * block;
  }
  return std::clamp(f, 0.0, 1.0);
}

inline double convex_split_fidelity_dense(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                          std::size_t n, const std::string &q_label = "Q",
                                          std::size_t density_budget = kDefaultDensityBudget) {
  return fidelity(convex_split_state(rho_pq, sigma_q, n, q_label, density_budget),
                  convex_split_reference(rho_pq, sigma_q, n, q_label));
}

// Symmetric route for a qubit Q, dense otherwise.
inline double convex_split_fidelity(const DensityOperator &rho_pq, const DensityOperator &sigma_q, std::size_t n,
                                    const std::string &q_label = "Q") {
  if (sigma_q.dim() == 2) return convex_split_fidelity_symmetric(rho_pq, sigma_q, n, q_label);
  return convex_split_fidelity_dense(rho_pq, sigma_q, n, q_label);
}

struct ConvexSplitCheck {
  EntropicValue k;  // D_max(rho_PQ || rho_P (x) sigma_Q), unsmoothed
  double delta = 0;
  std::size_t n = 0;
  double fidelity_sq = 0;
  double bound = 0;  // 1 - (sqrt(delta) + 2 eps)^2 with eps = 0
  bool holds = false;
};

// n = ceil(2^k / delta).
inline std::size_t convex_split_copies(double k, double delta) {
  if (!(delta > 0 && delta < 1)) throw InputError("delta must lie in (0,1)");
  double n = std::ceil(std::exp2(k) / delta - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, n));
}

inline ConvexSplitCheck convex_split_bound_check(const DensityOperator &rho_pq, const DensityOperator &sigma_q,
                                                 double delta, const std::string &q_label = "Q",
                                                 bool throw_on_violation = true) {
  detail::require_convex_split_inputs(rho_pq, sigma_q, q_label, 1);
  auto p_labels = rho_pq.system().complement({q_label});
  auto reference = tensor(partial_trace(rho_pq, p_labels), sigma_q.relabeled(RegisterSystem{{q_label, sigma_q.dim()}}));
  auto ordered_rho = reorder(rho_pq, reference.system().labels());
  ConvexSplitCheck out;
  out.k = max_relative_entropy(ordered_rho, reference);
  if (!out.k.finite) throw InputError("convex split: D_max is infinite");
  out.delta = delta;
  out.n = convex_split_copies(out.k.value, delta);
  double f = convex_split_fidelity(rho_pq, sigma_q, out.n, q_label);
  out.fidelity_sq = f * f;
  out.bound = 1.0 - delta;
  out.holds = out.fidelity_sq >= out.bound - 1e-8;
  if (!out.holds && throw_on_violation)
    throw BoundViolation("convex split: F^2 = " + std::to_string(out.fidelity_sq) + " below bound " +
                         std::to_string(out.bound));
  return out;
}

}  // namespace qsrlc
