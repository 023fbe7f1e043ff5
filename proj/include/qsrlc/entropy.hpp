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

// Scalar information quantities. All logarithms are base 2.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "qsrlc/collapsing.hpp"
#include "qsrlc/qmat.hpp"

namespace qsrlc {

// A real value in bits, or +infinity when a support condition fails.
struct EntropicValue {
  double value = 0.0;
  bool finite = true;

  static EntropicValue infinite() { return {std::numeric_limits<double>::infinity(), false}; }
  explicit operator double() const { return value; }
};

class ClassicalDistribution {
 public:
  explicit ClassicalDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InputError("empty distribution");
    double s = 0;
    for (double p : probs_) {
      if (p < 0 || !std::isfinite(p)) throw InputError("distribution has a negative or non-finite entry");
      s += p;
    }
    if (std::abs(s - 1.0) > tol::norm) throw InputError("distribution does not sum to 1");
  }

  static ClassicalDistribution from_diagonal(const DensityOperator &rho) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = std::max(0.0, rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
    return ClassicalDistribution(std::move(p));
  }

  const std::vector<double> &probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  ClassicalDistribution tensor(const ClassicalDistribution &other) const {
    std::vector<double> out;
    out.reserve(probs_.size() * other.size());
    for (double a : probs_)
      for (double b : other.probs_) out.push_back(a * b);
    return ClassicalDistribution(std::move(out));
  }

  ClassicalDistribution power(std::size_t n) const {
    if (n == 0) throw InputError("power: n must be positive");
    ClassicalDistribution out = *this;
    for (std::size_t k = 1; k < n; ++k) out = out.tensor(*this);
    return out;
  }

 private:
  std::vector<double> probs_;
};

namespace detail {

inline double entropy_of_spectrum(const RealVector &ev) {
  double s = 0;
  for (double l : ev)
    if (l > tol::rank) s -= l * std::log2(l);
  return s;
}

// Projector onto eigenvectors of `es` with eigenvalue <= tol::rank.
inline Matrix kernel_projector(const Eigensystem &es) {
  const auto d = es.values.size();
  Matrix p = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    if (es.values[i] <= tol::rank) p += es.vectors.col(i) * es.vectors.col(i).adjoint();
  return p;
}

// supp(rho) is not contained in supp(sigma): the projection of rho onto
// ker(sigma) has an eigenvalue above 1e-10.
inline bool support_violation(const Matrix &rho, const Eigensystem &sigma_es) {
  Matrix p0 = kernel_projector(sigma_es);
  if (p0.cwiseAbs().maxCoeff() == 0.0) return false;
  Matrix proj = p0 * rho * p0;
  return hermitian_eigenvalues(proj).maxCoeff() > 1e-10;
}

// Common eigenbasis of two commuting Hermitian matrices: diagonalize `a`,
// then diagonalize `b` inside each (near-)degenerate eigenspace of `a`.
inline Eigen::MatrixXcd common_eigenbasis(const Matrix &a, const Matrix &b) {
  auto es = hermitian_eig(a);
  const auto d = es.values.size();
  Eigen::MatrixXcd basis(d, d);
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index end = start + 1;
    while (end < d && es.values[end] - es.values[end - 1] <= 1e-9) ++end;
    Eigen::MatrixXcd v = es.vectors.middleCols(start, end - start);
    Eigen::MatrixXcd bb = v.adjoint() * b * v;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sub(0.5 * (bb + bb.adjoint()));
    basis.middleCols(start, end - start) = v * sub.eigenvectors();
    start = end;
  }
  return basis;
}

}  // namespace detail

inline double von_neumann_entropy(const DensityOperator &rho) {
  return detail::entropy_of_spectrum(rho.eigenvalues());
}

inline double shannon_entropy(const ClassicalDistribution &p) {
  double s = 0;
  for (double x : p.probs())
    if (x > tol::rank) s -= x * std::log2(x);
  return s;
}

// Entropy of the marginal on `labels`.
inline double entropy_of(const DensityOperator &rho, const LabelSet &labels) {
  if (labels.empty()) return 0.0;
  return von_neumann_entropy(partial_trace(rho, labels));
}

inline EntropicValue relative_entropy(const DensityOperator &rho, const DensityOperator &sigma) {
  require_same_system(rho, sigma, "relative_entropy");
  auto ses = detail::hermitian_eig(sigma.matrix());
  if (detail::support_violation(rho.matrix(), ses)) return EntropicValue::infinite();
  double cross = 0;
  for (Eigen::Index j = 0; j < ses.values.size(); ++j) {
    if (ses.values[j] <= tol::rank) continue;
    Complex w = ses.vectors.col(j).dot(rho.matrix() * ses.vectors.col(j));
    cross += w.real() * std::log2(ses.values[j]);
  }
  double d = -von_neumann_entropy(rho) - cross;
  return {std::max(0.0, d), true};
}

inline EntropicValue relative_entropy(const ClassicalDistribution &p, const ClassicalDistribution &q) {
  if (p.size() != q.size()) throw InputError("relative_entropy: length mismatch");
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= tol::rank) continue;
    if (q[i] <= tol::rank) return EntropicValue::infinite();
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return {std::max(0.0, d), true};
}

// log2 of the largest eigenvalue of sigma^{-1/2} rho sigma^{-1/2} on supp(sigma).
inline EntropicValue max_relative_entropy(const DensityOperator &rho, const DensityOperator &sigma) {
  require_same_system(rho, sigma, "max_relative_entropy");
  auto ses = detail::hermitian_eig(sigma.matrix());
  if (detail::support_violation(rho.matrix(), ses)) return EntropicValue::infinite();
  Matrix w = detail::hermitian_apply(ses, [](double x) { return x > tol::rank ? 1.0 / std::sqrt(x) : 0.0; });
  double lmax = detail::hermitian_eigenvalues(w * rho.matrix() * w).maxCoeff();
  if (lmax <= 0) return EntropicValue::infinite();  // zero rho; cannot happen for states
  return {std::log2(lmax), true};
}

//----------------------------------------------------------------------------
// Hypothesis testing
//----------------------------------------------------------------------------

// Optimal test for the classical problem: weights w_i in [0,1] with at most
// one fractional entry.
struct ClassicalTest {
  EntropicValue value;
  std::vector<double> weights;
  double type1_mass = 0;  // sum_i w_i p_i
  double type2_mass = 0;  // sum_i w_i q_i
};

// Neyman-Pearson: take outcomes by decreasing likelihood ratio p_i/q_i until
// the accepted p-mass reaches 1-eps, splitting the boundary outcome.
inline ClassicalTest neyman_pearson(const std::vector<double> &p, const std::vector<double> &q, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0,1)");
  if (p.size() != q.size()) throw InputError("hypothesis test: length mismatch");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0) order.push_back(i);
  // a/b > c/d without dividing; q = 0 sorts first.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] * q[b] > p[b] * q[a]; });
  const double target = 1.0 - eps;
  ClassicalTest t;
  t.weights.assign(p.size(), 0.0);
  double acc = 0, beta = 0;
  for (std::size_t i : order) {
    double need = target - acc;
    if (need <= 0) break;
    double w = p[i] >= need ? need / p[i] : 1.0;
    t.weights[i] = w;
    acc += w * p[i];
    beta += w * q[i];
    if (w < 1.0) break;
  }
  t.type1_mass = acc;
  t.type2_mass = beta;
  t.value = beta > 0 ? EntropicValue{-std::log2(beta), true} : EntropicValue::infinite();
  return t;
}

inline EntropicValue hypothesis_testing_relative_entropy(const ClassicalDistribution &p,
                                                         const ClassicalDistribution &q, double eps) {
  return neyman_pearson(p.probs(), q.probs(), eps).value;
}

struct HypothesisTest {
  EntropicValue value;
  Matrix test;  // the optimal 0 <= Pi <= I
  double type1_mass = 0;  // Tr(Pi rho)
  double type2_mass = 0;  // Tr(Pi sigma)
  bool commuting = false;
};

namespace detail {

inline double commutator_trace_norm(const Matrix &a, const Matrix &b) {
  return trace_norm(a * b - b * a);
}

inline HypothesisTest hypothesis_test_commuting(const Matrix &rho, const Matrix &sigma, double eps) {
  const auto d = rho.rows();
  Eigen::MatrixXcd basis;
  if (is_diagonal(rho, 0.0) && is_diagonal(sigma, 0.0))
    basis = Eigen::MatrixXcd::Identity(d, d);
  else
    basis = common_eigenbasis(rho, sigma);
  std::vector<double> p(d), q(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    p[i] = std::max(0.0, basis.col(i).dot(rho * basis.col(i)).real());
    q[i] = std::max(0.0, basis.col(i).dot(sigma * basis.col(i)).real());
  }
  auto np = neyman_pearson(p, q, eps);
  Eigen::VectorXcd w(d);
  for (Eigen::Index i = 0; i < d; ++i) w[i] = np.weights[i];
  HypothesisTest out;
  out.value = np.value;
  out.test = basis * w.asDiagonal() * basis.adjoint();
  out.type1_mass = np.type1_mass;
  out.type2_mass = np.type2_mass;
  out.commuting = true;
  return out;
}

inline Matrix positive_part_projector(const Matrix &m) {
  auto es = hermitian_eig(m);
  return hermitian_apply(es, [](double x) { return x > 0 ? 1.0 : 0.0; });
}

// Threshold characterization: Pi(mu) = {rho - mu sigma > 0}; Tr(Pi(mu) rho)
// is non-increasing in mu. Bisect for the jump through 1-eps and mix the two
// bracketing projectors so that Tr(Pi rho) = 1-eps exactly.
inline HypothesisTest hypothesis_test_bisection(const Matrix &rho, const Matrix &sigma, double eps) {
  const double target = 1.0 - eps;
  HypothesisTest out;
  out.commuting = false;

  auto ses = hermitian_eig(sigma);
  Matrix p0 = kernel_projector(ses);
  double in_kernel = (p0 * rho).trace().real();
  if (in_kernel >= target) {
    // A test inside ker(sigma) already meets the type-I constraint.
    out.test = p0 * (target / in_kernel);
    out.type1_mass = target;
    out.type2_mass = 0;
    out.value = EntropicValue::infinite();
    return out;
  }

  auto mass = [&](double mu) {
    Matrix pi = positive_part_projector(rho - mu * sigma);
    return std::pair{pi, (pi * rho).trace().real()};
  };

  double lo = 0.0, hi = 1.0;
  auto [pi_lo, a] = mass(lo);
  auto [pi_hi, c] = mass(hi);
  while (c >= target) {
    lo = hi;
    pi_lo = pi_hi;
    a = c;
    hi *= 2;
    std::tie(pi_hi, c) = mass(hi);
    if (hi > 1e300) throw BoundViolation("hypothesis test bisection failed to bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    auto [pm, m] = mass(mid);
    if (m >= target) {
      lo = mid;
      pi_lo = std::move(pm);
      a = m;
    } else {
      hi = mid;
      pi_hi = std::move(pm);
      c = m;
    }
  }
  double t = a - c > 0 ? (target - c) / (a - c) : 1.0;
  out.test = t * pi_lo + (1.0 - t) * pi_hi;
  out.type1_mass = (out.test * rho).trace().real();
  out.type2_mass = std::max(0.0, (out.test * sigma).trace().real());
  out.value = out.type2_mass > 0 ? EntropicValue{-std::log2(out.type2_mass), true} : EntropicValue::infinite();
  return out;
}

}  // namespace detail

enum class TestRoute { automatic, commuting, bisection };

// D_H^eps(rho || sigma) together with the test operator attaining it.
inline HypothesisTest hypothesis_test(const DensityOperator &rho, const DensityOperator &sigma, double eps,
                                      TestRoute route = TestRoute::automatic) {
  require_same_system(rho, sigma, "hypothesis_testing_relative_entropy");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0,1)");
  if (route == TestRoute::automatic)
    route = detail::commutator_trace_norm(rho.matrix(), sigma.matrix()) <= 1e-9 ? TestRoute::commuting
                                                                                 : TestRoute::bisection;
  if (route == TestRoute::commuting) return detail::hypothesis_test_commuting(rho.matrix(), sigma.matrix(), eps);
  return detail::hypothesis_test_bisection(rho.matrix(), sigma.matrix(), eps);
}

inline EntropicValue hypothesis_testing_relative_entropy(const DensityOperator &rho, const DensityOperator &sigma,
                                                         double eps) {
  return hypothesis_test(rho, sigma, eps).value;
}

// D_F^eps with F_E the image of the collapsing map's adjoint. Both arguments
// are collapsed and the (now commuting) pair goes to Neyman-Pearson. If
// Tr(rho) < 1-eps the test is the identity.
inline HypothesisTest restricted_hypothesis_test(const DensityOperator &rho, const DensityOperator &sigma,
                                                 double eps, const CollapsingMap &collapsing) {
  require_same_system(rho, sigma, "restricted_hypothesis_testing");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must lie in (0,1)");
  if (!collapsing.surjective_wrt_free_ops)
    throw InputError("restricted hypothesis testing needs a collapsing map surjective onto F_E");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  if (rho.trace() < 1.0 - eps) {
    HypothesisTest out;
    out.test = Matrix::Identity(d, d);
    out.type1_mass = rho.trace();
    out.type2_mass = sigma.trace();
    out.value = out.type2_mass > 0 ? EntropicValue{-std::log2(out.type2_mass), true} : EntropicValue::infinite();
    out.commuting = true;
    return out;
  }
  auto labels = rho.system().labels();
  Matrix r = collapsing.apply(rho.system(), rho.matrix(), labels);
  Matrix s = collapsing.apply(sigma.system(), sigma.matrix(), labels);
  // Subnormalized inputs are fine here; the test only needs the spectra.
  return detail::hypothesis_test_commuting(r, s, eps);
}

inline EntropicValue restricted_hypothesis_testing(const DensityOperator &rho, const DensityOperator &sigma,
                                                   double eps, const CollapsingMap &collapsing) {
  return restricted_hypothesis_test(rho, sigma, eps, collapsing).value;
}

//----------------------------------------------------------------------------
// Entropic combinations
//----------------------------------------------------------------------------

inline LabelSet label_union(const LabelSet &a, const LabelSet &b) {
  LabelSet out = a;
  for (const auto &l : b)
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

inline void require_disjoint(const LabelSet &a, const LabelSet &b) {
  for (const auto &l : a)
    if (std::find(b.begin(), b.end(), l) != b.end())
      throw InputError("label '" + l + "' appears in two parts");
}

inline double mutual_information(const DensityOperator &rho, const LabelSet &a, const LabelSet &b) {
  require_disjoint(a, b);
  return entropy_of(rho, a) + entropy_of(rho, b) - entropy_of(rho, label_union(a, b));
}

inline double conditional_entropy(const DensityOperator &rho, const LabelSet &a, const LabelSet &b) {
  require_disjoint(a, b);
  return entropy_of(rho, label_union(a, b)) - entropy_of(rho, b);
}

// I(A:B|C) = I(A:BC) - I(A:C), cross-checked against
// S(AC) + S(BC) - S(C) - S(ABC).
inline double conditional_mutual_information(const DensityOperator &rho, const LabelSet &a, const LabelSet &b,
                                             const LabelSet &c) {
  require_disjoint(a, b);
  require_disjoint(a, c);
  require_disjoint(b, c);
  double via_mi = mutual_information(rho, a, label_union(b, c)) - mutual_information(rho, a, c);
  double via_entropies = entropy_of(rho, label_union(a, c)) + entropy_of(rho, label_union(b, c)) -
                         entropy_of(rho, c) - entropy_of(rho, label_union(label_union(a, b), c));
  if (std::abs(via_mi - via_entropies) > 1e-10 * std::max(1.0, std::abs(via_mi)))
    throw BoundViolation("conditional mutual information: the two formulas disagree");
  return via_mi;
}

// R_c(rho) = S(Delta(rho)) - S(rho).
inline double relative_entropy_of_coherence(const DensityOperator &rho) {
  return std::max(0.0, von_neumann_entropy(dephase(rho)) - von_neumann_entropy(rho));
}

// R_c of the marginal on `labels`.
inline double relative_entropy_of_coherence(const DensityOperator &rho, const LabelSet &labels) {
  if (labels.empty()) return 0.0;
  return relative_entropy_of_coherence(partial_trace(rho, labels));
}

//----------------------------------------------------------------------------
// Second-order asymptotics
//----------------------------------------------------------------------------

// Inverse of the standard normal CDF: Acklam's rational approximation refined
// by one Halley step against erfc.
inline double gaussian_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("gaussian_quantile: p must lie in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  for (int i = 0; i < 2; ++i) {
    double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
  }
  return x;
}

// V(rho||sigma) = Tr rho (log rho - log sigma)^2 - D(rho||sigma)^2, bits^2.
inline EntropicValue relative_entropy_variance(const DensityOperator &rho, const DensityOperator &sigma) {
  require_same_system(rho, sigma, "relative_entropy_variance");
  auto d = relative_entropy(rho, sigma);
  if (!d.finite) return EntropicValue::infinite();
  auto log_support = [](double x) { return x > tol::rank ? std::log2(x) : 0.0; };
  Matrix l = detail::hermitian_apply(detail::hermitian_eig(rho.matrix()), log_support) -
             detail::hermitian_apply(detail::hermitian_eig(sigma.matrix()), log_support);
  double v = (rho.matrix() * l * l).trace().real() - d.value * d.value;
  return {std::max(0.0, v), true};
}

inline EntropicValue relative_entropy_variance(const ClassicalDistribution &p, const ClassicalDistribution &q) {
  auto d = relative_entropy(p, q);
  if (!d.finite) return EntropicValue::infinite();
  double m2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > tol::rank) {
      double l = std::log2(p[i] / q[i]);
      m2 += p[i] * l * l;
    }
  return {std::max(0.0, m2 - d.value * d.value), true};
}

// n D + sqrt(n V) Phi^{-1}(eps): the two-term expansion of D_H^eps and of
// the smoothed D_max on n copies.
inline double second_order_rate(double d, double v, std::size_t n, double eps) {
  const double nn = static_cast<double>(n);
  return nn * d + std::sqrt(nn * v) * gaussian_quantile(eps);
}

inline double second_order_rate(const DensityOperator &rho, const DensityOperator &sigma, std::size_t n,
                                double eps) {
  auto d = relative_entropy(rho, sigma);
  auto v = relative_entropy_variance(rho, sigma);
  if (!d.finite || !v.finite) return std::numeric_limits<double>::infinity();
  return second_order_rate(d.value, v.value, n, eps);
}

}  // namespace qsrlc
