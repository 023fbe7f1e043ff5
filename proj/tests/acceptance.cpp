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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsrlc/qsrlc.hpp"

using namespace qsrlc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::size_t uniform(Rng &rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

//----------------------------------------------------------------------------
// 1. Coherence creation
//----------------------------------------------------------------------------

Outcome coherence_creation_grid() {
  Outcome o;
  auto t0 = Clock::now();
  int runs = 0;
  for (std::size_t q = 0; q <= 3; ++q) {
    for (std::size_t e = 0; e <= 3; ++e) {
      auto t = coherence_creation(q, e);
      const std::size_t c = q + std::min(e, q);
      bool ok = t.counters.coherent_qubits_out == c && t.achieved_fidelity >= 1 - 1e-9 &&
                t.all_bob_operations_free() && t.certificates.size() == std::min(e, q) &&
                t.counters.qubits_sent == q && t.counters.singlets_consumed == std::min(e, q) &&
                t.value("max_coherence_increase_per_qubit") <= 2 + 1e-9;
      if (!ok) {
        o.pass = false;
        o.detail += " (q=" + std::to_string(q) + ",e=" + std::to_string(e) + ")";
      }
      ++runs;
    }
  }
  double s = seconds_since(t0);
  if (s >= 5) o.pass = false;
  o.detail = std::to_string(runs) + " grid points, " + fmt(s) + " s" + o.detail;
  return o;
}

//----------------------------------------------------------------------------
// 2. Coherence gain per transmitted register
//----------------------------------------------------------------------------

Outcome coherence_gain_audit() {
  Outcome o;
  Rng rng(2002);
  auto t0 = Clock::now();
  double worst = -1e9;
  const int trials = 1200;
  for (int i = 0; i < trials; ++i) {
    const std::size_t da = uniform(rng, 1, 4), db = uniform(rng, 1, 4);
    auto rho = random_density(RegisterSystem{{"A", da}, {"B", db}}, rng, uniform(rng, 1, 6));
    auto c = coherence_gain_check(rho, {"A"}, {"B"});
    worst = std::max(worst, c.gain - c.bound);
    if (!c.holds(1e-8)) o.pass = false;
  }
  double s = seconds_since(t0);
  if (s >= 30) o.pass = false;
  o.detail = std::to_string(trials) + " states, max(gain - 2 log d_A) = " + fmt(worst) + ", " + fmt(s) + " s";
  return o;
}

//----------------------------------------------------------------------------
// 3. Convex split
//----------------------------------------------------------------------------

constexpr std::size_t kMaxCopies = 128;

Outcome convex_split_suite() {
  Outcome o;
  Rng rng(3003);
  auto t0 = Clock::now();
  int trials = 0, redrawn = 0;
  double worst_margin = 1e9;
  std::size_t max_n = 0;
  for (double delta : {0.5, 0.25, 0.125}) {
    for (int i = 0; i < 170; ++i) {
      // Half the instances use sigma = rho_Q, the rest a mixture with a
      // random qubit state. Instances needing more than kMaxCopies copies are
      // redrawn to keep the run inside the time limit.
      for (;;) {
        auto rho = random_density(RegisterSystem{{"P", 2}, {"Q", 2}}, rng, uniform(rng, 1, 4));
        auto rho_q = partial_trace(rho, {"Q"});
        DensityOperator sigma = rho_q;
        if (i % 2) {
          auto tau = random_density(RegisterSystem{{"Q", 2}}, rng);
          sigma = DensityOperator(RegisterSystem{{"Q", 2}}, 0.5 * (rho_q.matrix() + tau.matrix()));
        }
        auto k = max_relative_entropy(rho, tensor(partial_trace(rho, {"P"}), sigma));
        if (!k.finite || convex_split_copies(k.value, delta) > kMaxCopies) {
          ++redrawn;
          continue;
        }
        auto c = convex_split_bound_check(rho, sigma, delta, "Q", false);
        worst_margin = std::min(worst_margin, c.fidelity_sq - (1 - delta));
        max_n = std::max(max_n, c.n);
        if (c.fidelity_sq < 1 - delta - 1e-8) o.pass = false;
        ++trials;
        break;
      }
    }
  }
  double s = seconds_since(t0);
  if (s >= 120) o.pass = false;
  o.detail = std::to_string(trials) + " instances (" + std::to_string(redrawn) + " redrawn with n > " +
             std::to_string(kMaxCopies) + "), min(F^2 - (1 - delta)) = " + fmt(worst_margin) +
             ", largest n = " + std::to_string(max_n) + ", " + fmt(s) + " s";
  return o;
}

//----------------------------------------------------------------------------
// 4. Three forms of the incoherent rate
//----------------------------------------------------------------------------

Outcome three_form_equality() {
  Outcome o;
  Rng rng(4004);
  double worst = 0;
  const int trials = 220;
  for (int i = 0; i < trials; ++i) {
    auto psi = random_state_vector(RegisterSystem{{"R", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, rng);
    auto rho = DensityOperator::from_pure(psi);
    auto forms = incoherent_rate_forms(rho, Roles{}, dephase(partial_trace(rho, {"C"})));
    const double qubit_form = 2 * incoherent_qsr_rate(rho);
    double d = std::max({std::abs(qubit_form - forms.divergence_form), std::abs(qubit_form - forms.difference_form),
                         std::abs(forms.divergence_form - forms.difference_form)});
    worst = std::max(worst, d);
  }
  o.pass = worst <= 1e-9;
  o.detail = std::to_string(trials) + " states, max pairwise difference = " + fmt(worst);
  return o;
}

//----------------------------------------------------------------------------
// 5. Incoherent Schumacher special case
//----------------------------------------------------------------------------

Outcome schumacher_plus() {
  Outcome o;
  auto plus = maximally_coherent_state(1, "C");
  const double schumacher = incoherent_schumacher_rate(plus.relabeled(RegisterSystem{{"C", 2}}));
  Roles only_c{{}, {}, {}, {"C"}};
  auto rho = plus.relabeled(RegisterSystem{{"C", 2}});
  const double qubit = incoherent_qsr_rate(rho, only_c);
  const double classical = classical_rate_incoherent(rho, only_c);
  o.pass = std::abs(schumacher - 0.5) <= 1e-12 && std::abs(qubit - 0.5) <= 1e-12 && std::abs(classical - 1.0) <= 1e-12;
  o.detail = "Schumacher rate " + fmt(schumacher) + ", qubit rate " + fmt(qubit) + ", classical rate " + fmt(classical);
  return o;
}

//----------------------------------------------------------------------------
// 6. Hypothesis testing relative entropy
//----------------------------------------------------------------------------

// Exhaustive oracle: an optimal test of the linear program puts weight 1 on a
// set S and a fraction t on at most one further outcome.
double exhaustive_type2(const std::vector<double> &p, const std::vector<double> &q, double eps) {
  const std::size_t d = p.size();
  const double target = 1 - eps;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    double ps = 0, qs = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (mask >> i & 1) {
        ps += p[i];
        qs += q[i];
      }
    if (ps >= target) best = std::min(best, qs);
    for (std::size_t j = 0; j < d; ++j) {
      if (mask >> j & 1 || p[j] <= 0) continue;
      double t = (target - ps) / p[j];
      if (t >= 0 && t <= 1) best = std::min(best, qs + t * q[j]);
    }
  }
  return best;
}

Outcome hypothesis_testing_suite() {
  Outcome o;
  Rng rng(6006);
  double worst = 0;
  int commuting = 0;
  for (double eps : {0.05, 0.1, 0.25}) {
    for (int i = 0; i < 110; ++i) {
      const std::size_t d = uniform(rng, 2, 6);
      auto p = random_probabilities(d, rng), q = random_probabilities(d, rng);
      if (i % 5 == 0) {
        p[uniform(rng, 0, d - 1)] = 0;  // exercise rank-deficient rho
        double s = 0;
        for (double x : p) s += x;
        for (double &x : p) x /= s;
      }
      Matrix u = random_unitary(d, rng);
      auto conj = [&](const std::vector<double> &w) {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t k = 0; k < d; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = w[k];
        return Matrix(u * m * u.adjoint());
      };
      RegisterSystem sys{{"X", d}};
      DensityOperator rho(sys, conj(p)), sigma(sys, conj(q));
      auto ht = hypothesis_test(rho, sigma, eps);
      double oracle = -std::log2(exhaustive_type2(p, q, eps));
      worst = std::max(worst, std::abs(ht.value.value - oracle));
      if (!ht.value.finite || std::abs(ht.value.value - oracle) > 1e-6) o.pass = false;
      ++commuting;
    }
  }
  // Non-commuting qubit pairs: the returned test must be feasible and attain
  // the reported value.
  double worst_feasibility = 0, worst_value = 0;
  int noncommuting = 0;
  for (double eps : {0.05, 0.1, 0.25}) {
    for (int i = 0; i < 40; ++i) {
      RegisterSystem sys{{"X", 2}};
      auto rho = random_density(sys, rng), sigma = random_density(sys, rng);
      auto ht = hypothesis_test(rho, sigma, eps, TestRoute::bisection);
      const Matrix &pi = ht.test;
      auto ev = detail::hermitian_eigenvalues(pi);
      bool in_range = ev[0] >= -1e-10 && ev[ev.size() - 1] <= 1 + 1e-10;
      double type1 = (pi * rho.matrix()).trace().real();
      double type2 = (pi * sigma.matrix()).trace().real();
      worst_feasibility = std::max(worst_feasibility, std::abs(type1 - (1 - eps)));
      worst_value = std::max(worst_value, std::abs(ht.value.value + std::log2(type2)));
      if (!in_range || std::abs(type1 - (1 - eps)) > 1e-8 || std::abs(ht.value.value + std::log2(type2)) > 1e-8)
        o.pass = false;
      ++noncommuting;
    }
  }
  o.detail = std::to_string(commuting) + " commuting pairs, max |NP - oracle| = " + fmt(worst) + "; " +
             std::to_string(noncommuting) + " non-commuting pairs, max |Tr(Pi rho) - (1-eps)| = " +
             fmt(worst_feasibility) + ", max value mismatch = " + fmt(worst_value);
  return o;
}

//----------------------------------------------------------------------------
// 7. One-shot state redistribution
//----------------------------------------------------------------------------

StateVector rabc_state(std::size_t dr, std::size_t da, std::size_t db, std::size_t dc,
                       const std::function<Complex(std::size_t, std::size_t, std::size_t, std::size_t)> &amp) {
  RegisterSystem sys{{"R", dr}, {"A", da}, {"B", db}, {"C", dc}};
  Vector v(static_cast<Eigen::Index>(sys.dim()));
  for (std::size_t r = 0; r < dr; ++r)
    for (std::size_t a = 0; a < da; ++a)
      for (std::size_t b = 0; b < db; ++b)
        for (std::size_t c = 0; c < dc; ++c) v[static_cast<Eigen::Index>(((r * da + a) * db + b) * dc + c)] = amp(r, a, b, c);
  return StateVector::normalized(sys, v);
}

std::vector<std::pair<std::string, QsrInstance>> qsr_library() {
  std::vector<std::pair<std::string, QsrInstance>> lib;
  RegisterSystem c2{{"C", 2}};
  // (a) |Phi+>_RB (x) |sigma>_AC: C uncorrelated and equal to the free state.
  {
    auto psi = rabc_state(2, 2, 2, 2, [](auto r, auto a, auto b, auto c) {
      const double w[2] = {std::sqrt(0.8), std::sqrt(0.2)};
      return (r == b && a == c) ? Complex(w[c] / std::sqrt(2.0)) : Complex(0);
    });
    lib.push_back({"product", QsrInstance{psi, 0.5, 0.3, 0.3, DensityOperator::diagonal(c2, {0.8, 0.2}), {}, {}}});
  }
  // (b) R and C weakly correlated through A (A holds x and c), B trivial.
  {
    const double px[2][2] = {{0.55, 0.45}, {0.45, 0.55}};
    auto psi = rabc_state(2, 4, 1, 2, [&](auto r, auto a, auto, auto c) {
      return a == 2 * r + c ? Complex(std::sqrt(0.5 * px[r][c])) : Complex(0);
    });
    lib.push_back({"reference-correlated", QsrInstance{psi, 0.6, 0.3, 0.3, DensityOperator::diagonal(c2, {0.5, 0.5}), {}, {}}});
  }
  // (c) B and C weakly correlated, R trivial.
  {
    const double px[2][2] = {{0.55, 0.45}, {0.45, 0.55}};
    auto psi = rabc_state(1, 4, 2, 2, [&](auto, auto a, auto b, auto c) {
      return a == 2 * b + c ? Complex(std::sqrt(0.5 * px[b][c])) : Complex(0);
    });
    lib.push_back({"side-information-correlated", QsrInstance{psi, 0.6, 0.3, 0.3, DensityOperator::diagonal(c2, {0.5, 0.5}), {}, {}}});
  }
  return lib;
}

Outcome qsr_end_to_end() {
  Outcome o;
  auto t0 = Clock::now();
  for (auto &[name, in] : qsr_library()) {
    auto t = qsr_full(in);
    const double n = t.value("n"), b = t.value("b");
    const auto cobits = static_cast<std::size_t>(std::ceil(std::log2(n / b) - 1e-12));
    const double dist = t.value("purified_distance");
    const double bound = 3 * in.eps1 + in.eps2 + in.gamma;
    bool ok = t.value("overridden") == 0 && dist <= bound && t.counters.cobits_sent == cobits &&
              t.all_bob_operations_free();
    if (!ok) o.pass = false;
    o.detail += name + ": n=" + fmt(n) + " b=" + fmt(b) + " cobits=" + std::to_string(t.counters.cobits_sent) +
                " P=" + fmt(dist) + " bound=" + fmt(bound) + "; ";
  }
  double s = seconds_since(t0);
  if (s >= 300) o.pass = false;
  o.detail += fmt(s) + " s";
  return o;
}

//----------------------------------------------------------------------------
// 8. Inequality facts
//----------------------------------------------------------------------------

Outcome inequality_suite() {
  Outcome o;
  Rng rng(8008);
  const int trials = 500;
  const double slack = 1e-8;
  std::vector<std::pair<std::string, int>> violations;
  auto count = [&](const std::string &name, const std::function<bool()> &trial) {
    int bad = 0;
    for (int i = 0; i < trials; ++i)
      if (!trial()) ++bad;
    violations.push_back({name, bad});
    if (bad) o.pass = false;
  };
  auto random_system = [&] { return RegisterSystem{{"X", uniform(rng, 2, 4)}}; };

  count("gentle-measurement", [&] {
    auto sys = random_system();
    auto rho = random_density(sys, rng, uniform(rng, 1, 4));
    auto c = gentle_measurement_check(rho, random_effect(sys.dim(), rng));
    return c.rhs >= c.lhs - slack;  // F >= sqrt(Tr(A^2 rho))
  });
  count("purified-distance-triangle", [&] {
    auto sys = random_system();
    auto a = random_density(sys, rng, uniform(rng, 1, 4)), b = random_density(sys, rng, uniform(rng, 1, 4)),
         c = random_density(sys, rng, uniform(rng, 1, 4));
    return purified_distance(a, c) <= purified_distance(a, b) + purified_distance(b, c) + slack;
  });
  count("sequential-projectors", [&] {
    auto sys = random_system();
    auto rho = random_density(sys, rng, uniform(rng, 1, 4));
    std::vector<Matrix> ps;
    const std::size_t k = uniform(rng, 1, 3);
    for (std::size_t i = 0; i < k; ++i) ps.push_back(random_projector(sys.dim(), uniform(rng, 0, sys.dim()), rng));
    return sequential_projector_bound_check(rho, ps).holds(slack);
  });
  count("close-states-measurement", [&] {
    auto sys = random_system();
    auto rho = random_density(sys, rng, uniform(rng, 1, 4));
    auto tau = random_density(sys, rng);
    const double t = std::uniform_real_distribution<double>(0, 1)(rng);
    DensityOperator sigma(sys, (1 - t) * rho.matrix() + t * tau.matrix());
    return close_states_measurement_check(rho, sigma, random_effect(sys.dim(), rng)).holds(slack);
  });
  count("fannes", [&] {
    // Pairs with P(rho1, rho2) <= 1/(2e) by mixing in a small perturbation.
    for (;;) {
      auto sys = random_system();
      auto rho = random_density(sys, rng, uniform(rng, 1, 4));
      auto tau = random_density(sys, rng);
      const double t = std::uniform_real_distribution<double>(0, 0.1)(rng);
      DensityOperator rho2(sys, (1 - t) * rho.matrix() + t * tau.matrix());
      const double eps = purified_distance(rho, rho2);
      if (eps > 1 / (2 * std::exp(1.0))) continue;
      const double lhs = std::abs(von_neumann_entropy(rho) - von_neumann_entropy(rho2));
      return lhs <= eps * std::log2(static_cast<double>(sys.dim())) + 1 + slack;
    }
  });
  count("data-processing", [&] {
    auto sys = random_system();
    auto out_sys = RegisterSystem{{"Y", uniform(rng, 1, 3)}};
    auto rho = random_density(sys, rng, uniform(rng, 1, 4)), sigma = random_density(sys, rng);
    auto ch = random_channel(sys, out_sys, uniform(rng, 1, 3), rng);
    auto nr = apply_channel(ch, rho), ns = apply_channel(ch, sigma);
    bool ok = relative_entropy(nr, ns).value <= relative_entropy(rho, sigma).value + slack;
    ok = ok && max_relative_entropy(nr, ns).value <= max_relative_entropy(rho, sigma).value + slack;
    ok = ok && hypothesis_testing_relative_entropy(nr, ns, 0.1).value <=
                   hypothesis_testing_relative_entropy(rho, sigma, 0.1).value + slack;
    return ok;
  });
  count("coherence-continuity", [&] {
    auto sys = random_system();
    auto rho = random_density(sys, rng, uniform(rng, 1, 4));
    auto tau = random_density(sys, rng);
    const double t = std::uniform_real_distribution<double>(0, 0.15)(rng);
    DensityOperator rho2(sys, (1 - t) * rho.matrix() + t * tau.matrix());
    return coherence_continuity_check(rho, rho2).holds(slack);
  });

  o.detail = std::to_string(trials) + " trials each, violations:";
  for (const auto &[name, bad] : violations) o.detail += " " + name + "=" + std::to_string(bad);
  return o;
}

//----------------------------------------------------------------------------
// 9. Second-order trend
//----------------------------------------------------------------------------

Outcome second_order_trend() {
  Outcome o;
  const double eps = 0.1;
  ClassicalDistribution p({0.95, 0.05}), q({0.5, 0.5});
  const double d = relative_entropy(p, q).value;
  const double v = relative_entropy_variance(p, q).value;
  const int nmax = 12;
  std::vector<double> rate(nmax + 1), residual(nmax + 1), gap(nmax + 1);
  double c_fit = 0;
  for (int n = 1; n <= nmax; ++n) {
    rate[n] = hypothesis_testing_relative_entropy(p.power(n), q.power(n), eps).value / n;
    const double expansion = second_order_rate(d, v, static_cast<std::size_t>(n), eps) / n;
    residual[n] = rate[n] - expansion;
    gap[n] = std::abs(rate[n] - d);
    c_fit = std::max(c_fit, n * std::abs(residual[n]));
  }
  // Within +-C/n of the expansion by construction of C; the check is that C
  // is small enough for the expansion to be informative: C/n falls below the
  // second-order term at the end of the range.
  const double second_term = std::sqrt(v / nmax) * std::abs(gaussian_quantile(eps));
  bool within = true;
  for (int n = 1; n <= nmax; ++n) within = within && std::abs(residual[n]) <= c_fit / n + 1e-12;
  const bool informative = c_fit / nmax < second_term;
  // Trend: mean distance to D over consecutive thirds of the range decreases,
  // and the least-squares slope of the distance against n is negative.
  auto mean = [&](int lo, int hi) {
    double s = 0;
    for (int n = lo; n <= hi; ++n) s += gap[n];
    return s / (hi - lo + 1);
  };
  const double m1 = mean(1, 4), m2 = mean(5, 8), m3 = mean(9, 12);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = 1; n <= nmax; ++n) {
    sx += n;
    sy += gap[n];
    sxx += n * n;
    sxy += n * gap[n];
  }
  const double slope = (nmax * sxy - sx * sy) / (nmax * sxx - sx * sx);
  o.pass = within && informative && m1 > m2 && m2 > m3 && slope < 0;
  o.detail = "D=" + fmt(d) + " V=" + fmt(v) + " C=" + fmt(c_fit) + " C/12=" + fmt(c_fit / nmax) +
             " second-order term at n=12: " + fmt(second_term) + "; mean |rate - D| by thirds " + fmt(m1) + " > " +
             fmt(m2) + " > " + fmt(m3) + ", slope " + fmt(slope);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"coherence creation c = q + min(e, q)", coherence_creation_grid},
      {"coherence gain per register <= 2 log d", coherence_gain_audit},
      {"convex split F^2 >= 1 - delta", convex_split_suite},
      {"three-form incoherent rate equality", three_form_equality},
      {"incoherent Schumacher rate of |+>", schumacher_plus},
      {"hypothesis testing relative entropy", hypothesis_testing_suite},
      {"one-shot state redistribution", qsr_end_to_end},
      {"inequality facts", inequality_suite},
      {"second-order trend", second_order_trend},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << i + 1 << ". " << criteria[i].first << " -- " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
