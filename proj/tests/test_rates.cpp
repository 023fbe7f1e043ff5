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

#include <gtest/gtest.h>

#include <cmath>

#include "qsrlc/random.hpp"
#include "qsrlc/rates.hpp"

namespace qsrlc {
namespace {

const RegisterSystem kRabc{{"R", 2}, {"A", 2}, {"B", 2}, {"C", 2}};

DensityOperator ghz_rbc() {
  RegisterSystem s{{"R", 2}, {"A", 1}, {"B", 2}, {"C", 2}};
  Vector v = Vector::Zero(8);
  v[0] = v[7] = 1.0;
  return DensityOperator::from_pure(StateVector::normalized(s, v));
}

// Entropy of the diagonal of a marginal, computed directly.
double dephased_entropy_oracle(const DensityOperator &rho, const LabelSet &labels) {
  auto m = partial_trace(rho, labels).matrix();
  double s = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double p = m(i, i).real();
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return s;
}

double coherence_oracle(const DensityOperator &rho, const LabelSet &labels) {
  return dephased_entropy_oracle(rho, labels) - entropy_of(rho, labels);
}

TEST(StandardRates, Ghz) {
  auto rho = ghz_rbc();
  auto r = standard_qsr_rates(rho);
  EXPECT_NEAR(r.q, 0.5, 1e-12);
  EXPECT_NEAR(r.q_plus_e, 0.0, 1e-12);
}

TEST(IncoherentRates, GhzMarginalsAreDiagonal) {
  // Phi_BC and Phi_B are diagonal, so only the conditional mutual information
  // contributes.
  auto rho = ghz_rbc();
  EXPECT_NEAR(incoherent_qsr_rate(rho), 0.5, 1e-12);
  EXPECT_NEAR(classical_rate_incoherent(rho), 1.0, 1e-12);
  EXPECT_NEAR(slepian_wolf_sum_bound(rho), 0.0, 1e-12);
}

TEST(IncoherentRates, MatchesEntropyOracle) {
  Rng rng(61);
  for (int t = 0; t < 20; ++t) {
    auto rho = DensityOperator::from_pure(random_state_vector(kRabc, rng));
    const double cmi = entropy_of(rho, {"R", "B"}) + entropy_of(rho, {"B", "C"}) - entropy_of(rho, {"B"}) -
                       entropy_of(rho, {"R", "B", "C"});
    const double oracle = 0.5 * (cmi + coherence_oracle(rho, {"B", "C"}) - coherence_oracle(rho, {"B"}));
    EXPECT_NEAR(incoherent_qsr_rate(rho), oracle, 1e-10);
    EXPECT_NEAR(slepian_wolf_sum_bound(rho),
                dephased_entropy_oracle(rho, {"B", "C"}) - dephased_entropy_oracle(rho, {"B"}), 1e-10);
    // Restricting Bob cannot lower the rate.
    EXPECT_GE(incoherent_qsr_rate(rho), standard_qsr_rates(rho).q - 1e-10);
  }
}

TEST(IncoherentRates, ThreeFormsAgreeForAnyFullRankFreeState) {
  Rng rng(62);
  for (int t = 0; t < 20; ++t) {
    auto rho = DensityOperator::from_pure(random_state_vector(kRabc, rng));
    auto forms = incoherent_rate_forms(rho);
    EXPECT_LT(forms.max_disagreement(), 1e-9);
    auto other = incoherent_rate_forms(rho, Roles{}, DensityOperator::diagonal(RegisterSystem{{"C", 2}}, {0.3, 0.7}));
    EXPECT_LT(other.max_disagreement(), 1e-9);
    EXPECT_NEAR(other.difference_form, forms.difference_form, 1e-9);
  }
}

TEST(IncoherentRates, FreeStateValidation) {
  Rng rng(63);
  auto rho = DensityOperator::from_pure(random_state_vector(kRabc, rng));
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  m(0, 1) = m(1, 0) = 0.1;
  EXPECT_THROW(incoherent_rate_forms(rho, Roles{}, DensityOperator(RegisterSystem{{"C", 2}}, m)), InputError);
  EXPECT_THROW(incoherent_rate_forms(rho, Roles{}, DensityOperator::maximally_mixed(RegisterSystem{{"X", 2}})),
               InputError);
  EXPECT_THROW(incoherent_qsr_rate(rho, Roles{{"R"}, {"A"}, {"B"}, {"Z"}}), InputError);
}

TEST(IncoherentRates, SchumacherOfPlusAndOfDiagonal) {
  auto plus = maximally_coherent_state(1, "C").relabeled(RegisterSystem{{"C", 2}});
  EXPECT_NEAR(incoherent_schumacher_rate(plus), 0.5, 1e-12);
  auto diag = DensityOperator::diagonal(RegisterSystem{{"C", 2}}, {0.5, 0.5});
  EXPECT_NEAR(incoherent_schumacher_rate(diag), 1.0, 1e-12);
  Roles only_c{{}, {}, {}, {"C"}};
  EXPECT_NEAR(classical_rate_incoherent(plus, only_c), 1.0, 1e-12);
}

TEST(IncoherentRates, ProductStateNeedsOnlyCoherence) {
  Rng rng(64);
  auto rb = random_density(RegisterSystem{{"R", 2}, {"B", 2}}, rng);
  auto ac = purify(random_density(RegisterSystem{{"C", 2}}, rng), "A");
  auto rho = reorder(tensor(rb, DensityOperator::from_pure(ac)), {"R", "A", "B", "C"});
  EXPECT_NEAR(standard_qsr_rates(rho).q, 0.0, 1e-10);
  EXPECT_NEAR(incoherent_qsr_rate(rho), 0.5 * relative_entropy_of_coherence(partial_trace(rho, {"C"})), 1e-10);
}

TEST(SpecialCases, SlepianWolfAndSplitting) {
  Rng rng(65);
  auto rho = DensityOperator::from_pure(random_state_vector(RegisterSystem{{"R", 2}, {"B", 2}, {"C", 2}}, rng));
  EXPECT_NEAR(incoherent_slepian_wolf_rate(rho),
              0.5 * (mutual_information(rho, {"C"}, {"R"}) + coherence_oracle(rho, {"B", "C"}) -
                     coherence_oracle(rho, {"B"})),
              1e-10);
  auto rac = DensityOperator::from_pure(random_state_vector(RegisterSystem{{"R", 2}, {"A", 2}, {"C", 2}}, rng));
  const double split = incoherent_splitting_rate(rac);
  EXPECT_NEAR(split, 0.5 * (mutual_information(rac, {"C"}, {"R"}) + coherence_oracle(rac, {"C"})), 1e-10);
  auto general = splitting_rate_general(rac, coherence_theory());
  EXPECT_TRUE(general.regularized);
  EXPECT_NEAR(general.value, 2 * split, 1e-10);
}

TEST(SpecialCases, GeneralSplittingFallsBackToFreeFamily) {
  Rng rng(66);
  auto rac = DensityOperator::from_pure(random_state_vector(RegisterSystem{{"R", 2}, {"A", 2}, {"C", 2}}, rng));
  auto theory = coherence_theory();
  theory.name = "coherence-like";
  auto s = splitting_rate_general(rac, theory);
  EXPECT_FALSE(s.regularized);
  EXPECT_FALSE(s.note.empty());
  // The maximally mixed candidate gives I(R:C) + log d - S(C).
  EXPECT_NEAR(s.value, mutual_information(rac, {"R"}, {"C"}) + 1 - entropy_of(rac, {"C"}), 1e-10);
}

TEST(ConverseAudit, AgreesOnRandomStates) {
  Rng rng(67);
  for (int t = 0; t < 10; ++t) {
    auto rho = DensityOperator::from_pure(random_state_vector(kRabc, rng));
    auto a = audit_converse_equals_achievability(rho);
    EXPECT_TRUE(a.agree(1e-9)) << a.achievability << " vs " << a.converse;
  }
}

TEST(Report, UnitsAndSerialization) {
  auto rho = ghz_rbc();
  auto q = rate_report(rho);
  auto c = q.in_units(RateUnit::cobits);
  EXPECT_NEAR(c.value("q_min_std"), 2 * q.value("q_min_std"), 1e-15);
  EXPECT_NEAR(c.value("sum_bound_slepian_wolf"), q.value("sum_bound_slepian_wolf"), 1e-15);
  EXPECT_NEAR(c.value("classical_rate_incoherent"), q.value("classical_rate_incoherent"), 1e-15);
  EXPECT_EQ(c.unit_of("classical_rate_incoherent"), "bits");
  EXPECT_EQ(c.unit_of("q_min_incoherent"), "cobits");
  EXPECT_THROW(q.value("nope"), InputError);
  EXPECT_THROW(parse_rate_unit("ebits"), InputError);

  auto header = rate_csv_header(), row = rate_csv_row(c);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("cobits,", 0), 0u);
  auto j = to_json(q);
  EXPECT_EQ(j["rates"].size(), rate_report_keys().size());
  EXPECT_EQ(j["unit"], "qubits");
}

TEST(Report, NumberFormatting) {
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(OneShot, BoundComponents) {
  RegisterSystem s{{"R", 2}, {"A", 2}, {"B", 2}, {"C", 2}};
  Vector v = Vector::Zero(16);
  for (int r = 0; r < 2; ++r) {
    v[((r * 2 + 0) * 2 + r) * 2 + 0] = std::sqrt(0.4);
    v[((r * 2 + 1) * 2 + r) * 2 + 1] = std::sqrt(0.1);
  }
  QsrInstance in{StateVector(s, v), 0.5, 0.3, 0.3, DensityOperator::diagonal(RegisterSystem{{"C", 2}}, {0.8, 0.2}),
                 {}, {}};
  auto b = one_shot_achievability_bound(in);
  EXPECT_NEAR(b.d_max.value, 0.0, 1e-9);
  EXPECT_NEAR(b.constant, 2 * std::log2(2 / (0.5 * 0.09)), 1e-12);
  EXPECT_NEAR(b.value, b.d_max.value - b.d_f.value + b.constant, 1e-12);
  EXPECT_TRUE(b.unsmoothed);
}

TEST(Audits, CoherenceGainAndContinuity) {
  Rng rng(68);
  for (int t = 0; t < 50; ++t) {
    auto rho = random_density(RegisterSystem{{"A", 2}, {"B", 3}}, rng);
    EXPECT_TRUE(coherence_gain_check(rho, {"A"}, {"B"}).holds());
    auto tau = random_density(RegisterSystem{{"A", 2}, {"B", 3}}, rng);
    DensityOperator near(rho.system(), 0.95 * rho.matrix() + 0.05 * tau.matrix());
    auto c = coherence_continuity_check(rho, near);
    EXPECT_TRUE(c.applicable);
    EXPECT_TRUE(c.holds());
  }
  // |++>: A carries one bit of coherence on top of B.
  RegisterSystem s{{"A", 2}, {"B", 2}};
  Vector v = Vector::Constant(4, 0.5);  // |++>
  auto c = coherence_gain_check(DensityOperator::from_pure(StateVector(s, v)), {"A"}, {"B"});
  EXPECT_NEAR(c.gain, 1.0, 1e-12);
  EXPECT_NEAR(c.bound, 2.0, 1e-12);
}

}  // namespace
}  // namespace qsrlc
