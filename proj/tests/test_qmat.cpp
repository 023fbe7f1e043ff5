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

#include "qsrlc/qmat.hpp"
#include "qsrlc/random.hpp"

namespace qsrlc {
namespace {

double max_abs(const Matrix &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Partial trace over the last factor of a d1 x d2 matrix, written out by hand.
Matrix trace_out_second(const Matrix &m, Eigen::Index d1, Eigen::Index d2) {
  Matrix out = Matrix::Zero(d1, d1);
  for (Eigen::Index i = 0; i < d1; ++i)
    for (Eigen::Index j = 0; j < d1; ++j)
      for (Eigen::Index k = 0; k < d2; ++k) out(i, j) += m(i * d2 + k, j * d2 + k);
  return out;
}

Matrix trace_out_first(const Matrix &m, Eigen::Index d1, Eigen::Index d2) {
  Matrix out = Matrix::Zero(d2, d2);
  for (Eigen::Index i = 0; i < d2; ++i)
    for (Eigen::Index j = 0; j < d2; ++j)
      for (Eigen::Index k = 0; k < d1; ++k) out(i, j) += m(k * d2 + i, k * d2 + j);
  return out;
}

TEST(RegisterSystem, RejectsBadLabels) {
  EXPECT_THROW(RegisterSystem({{"A", 2}, {"A", 3}}), InputError);
  EXPECT_THROW(RegisterSystem({{"", 2}}), InputError);
  EXPECT_THROW(RegisterSystem({{"A", 0}}), InputError);
  RegisterSystem s{{"A", 2}, {"B", 3}};
  EXPECT_EQ(s.dim(), 6u);
  EXPECT_EQ(s.dim_of("B"), 3u);
  EXPECT_THROW(s.position("C"), InputError);
}

TEST(StateVector, RejectsUnnormalized) {
  RegisterSystem s{{"A", 2}};
  Vector v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(StateVector(s, v), InputError);
  EXPECT_NO_THROW(StateVector::normalized(s, v));
  EXPECT_THROW(StateVector(s, Vector::Zero(3)), InputError);
}

TEST(DensityOperator, Validation) {
  RegisterSystem s{{"A", 2}};
  Matrix m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityOperator(s, m), InputError);  // not Hermitian
  m << 0.7, 0, 0, 0.7;
  EXPECT_THROW(DensityOperator(s, m), InputError);  // trace
  m << 1.2, 0, 0, -0.2;
  EXPECT_THROW(DensityOperator(s, m), InputError);  // negative eigenvalue
  m << 0.3, 0, 0, 0.2;
  EXPECT_NO_THROW(DensityOperator(s, m, true));
  EXPECT_THROW(DensityOperator(RegisterSystem{{"A", 3}}, Matrix::Identity(2, 2) / 2.0), InputError);
}

TEST(PartialTrace, MatchesHandWrittenTraceOnRandomStates) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const std::size_t da = 1 + rng() % 3, db = 1 + rng() % 3;
    auto rho = random_density(RegisterSystem{{"A", da}, {"B", db}}, rng);
    const auto a = static_cast<Eigen::Index>(da), b = static_cast<Eigen::Index>(db);
    EXPECT_LT(max_abs(partial_trace(rho, {"A"}).matrix() - trace_out_second(rho.matrix(), a, b)), 1e-12);
    EXPECT_LT(max_abs(partial_trace(rho, {"B"}).matrix() - trace_out_first(rho.matrix(), a, b)), 1e-12);
  }
}

TEST(PartialTrace, ProductStateFactors) {
  Rng rng(12);
  auto a = random_density(RegisterSystem{{"A", 2}}, rng);
  auto b = random_density(RegisterSystem{{"B", 3}}, rng);
  auto c = random_density(RegisterSystem{{"C", 2}}, rng);
  auto abc = tensor(tensor(a, b), c);
  EXPECT_LT(max_abs(partial_trace(abc, {"B"}).matrix() - b.matrix()), 1e-12);
  auto ac = partial_trace(abc, {"A", "C"});
  EXPECT_LT(max_abs(ac.matrix() - detail::kron(a.matrix(), c.matrix())), 1e-12);
  // Keep order given out of system order still yields canonical order.
  auto ca = partial_trace(abc, {"C", "A"});
  EXPECT_EQ(ca.system().labels(), (LabelSet{"A", "C"}));
}

TEST(PartialTrace, PureStateRouteAgreesWithDensityRoute) {
  Rng rng(13);
  auto psi = random_state_vector(RegisterSystem{{"A", 2}, {"B", 3}, {"C", 2}}, rng);
  auto rho = DensityOperator::from_pure(psi);
  for (LabelSet keep : {LabelSet{"A"}, LabelSet{"B", "C"}, LabelSet{"A", "C"}})
    EXPECT_LT(max_abs(partial_trace(psi, keep).matrix() - partial_trace(rho, keep).matrix()), 1e-12);
}

TEST(Reorder, SwapOfTwoRegistersMatchesSwapOperator) {
  Rng rng(14);
  auto rho = random_density(RegisterSystem{{"A", 2}, {"B", 3}}, rng);
  Matrix swap = Matrix::Zero(6, 6);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) swap(j * 2 + i, i * 3 + j) = 1;
  auto r = reorder(rho, {"B", "A"});
  EXPECT_LT(max_abs(r.matrix() - swap * rho.matrix() * swap.adjoint()), 1e-12);
  auto back = reorder(r, {"A", "B"});
  EXPECT_LT(max_abs(back.matrix() - rho.matrix()), 1e-12);
}

TEST(Operators, EmbedMatchesKronAndApplyLocal) {
  Rng rng(15);
  RegisterSystem s{{"A", 2}, {"B", 3}};
  Matrix u = random_unitary(3, rng);
  Matrix full = embed_operator(s, u, {"B"});
  EXPECT_LT(max_abs(full - detail::kron(Matrix::Identity(2, 2), u)), 1e-12);
  auto psi = random_state_vector(s, rng);
  EXPECT_LT((apply_local(s, psi.amplitudes(), u, {"B"}) - full * psi.amplitudes()).norm(), 1e-12);
  EXPECT_THROW(embed_operator(s, u, {"A"}), InputError);
}

TEST(Purify, MarginalIsRecovered) {
  Rng rng(16);
  for (std::size_t env : {1u, 2u, 4u}) {
    auto rho = random_density(RegisterSystem{{"A", 3}}, rng, env);
    auto psi = purify(rho, "P");
    EXPECT_EQ(psi.system().dim_of("P"), std::min<std::size_t>(env, 3));
    EXPECT_LT(max_abs(partial_trace(psi, {"A"}).matrix() - rho.matrix()), 1e-10);
  }
}

TEST(Fidelity, PureStatesGiveOverlap) {
  Rng rng(17);
  RegisterSystem s{{"A", 3}};
  for (int t = 0; t < 10; ++t) {
    auto a = random_state_vector(s, rng), b = random_state_vector(s, rng);
    double overlap = std::abs(a.amplitudes().dot(b.amplitudes()));
    EXPECT_NEAR(fidelity(DensityOperator::from_pure(a), DensityOperator::from_pure(b)), overlap, 1e-7);
  }
}

TEST(Fidelity, CommutingStatesGiveBhattacharyya) {
  RegisterSystem s{{"A", 3}};
  std::vector<double> p{0.5, 0.3, 0.2}, q{0.1, 0.1, 0.8};
  double bc = 0;
  for (int i = 0; i < 3; ++i) bc += std::sqrt(p[i] * q[i]);
  auto rho = DensityOperator::diagonal(s, p), sigma = DensityOperator::diagonal(s, q);
  EXPECT_NEAR(fidelity(rho, sigma), bc, 1e-12);
  EXPECT_NEAR(purified_distance(rho, sigma), std::sqrt(1 - bc * bc), 1e-12);
  EXPECT_NEAR(trace_norm_distance(rho, sigma), 0.4 + 0.2 + 0.6, 1e-12);
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-12);
}

TEST(Fidelity, SymmetricAndInvariantUnderUnitaries) {
  Rng rng(18);
  RegisterSystem s{{"A", 4}};
  for (int t = 0; t < 10; ++t) {
    auto a = random_density(s, rng, 2), b = random_density(s, rng);
    Matrix u = random_unitary(4, rng);
    DensityOperator ua = DensityOperator::trusted(s, u * a.matrix() * u.adjoint());
    DensityOperator ub = DensityOperator::trusted(s, u * b.matrix() * u.adjoint());
    EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-9);
    EXPECT_NEAR(fidelity(a, b), fidelity(ua, ub), 1e-7);  // a is rank deficient
    EXPECT_EQ(purified_distance(a, a), 0.0);
  }
}

TEST(Channel, ValidationAndStinespring) {
  Rng rng(19);
  RegisterSystem in{{"A", 2}}, out{{"B", 3}};
  EXPECT_THROW(KrausChannel(in, out, {Matrix(2.0 * Matrix::Identity(3, 2))}), InputError);  // not trace preserving
  auto ch = random_channel(in, out, 3, rng);
  auto rho = random_density(in, rng);
  auto d = stinespring_dilation(ch);
  const Matrix &v = d.isometry.matrix();
  DensityOperator big = DensityOperator::trusted(d.isometry.out_system(), v * rho.matrix() * v.adjoint());
  EXPECT_LT(max_abs(partial_trace(big, {"B"}).matrix() - apply_channel(ch, rho).matrix()), 1e-12);
  EXPECT_NEAR(apply_channel(ch, rho).trace(), 1.0, 1e-12);
  // Too few Kraus operators for a shrinking output are topped up.
  auto shrink = random_channel(RegisterSystem{{"A", 4}}, RegisterSystem{{"B", 1}}, 1, rng);
  EXPECT_EQ(shrink.kraus().size(), 4u);
  EXPECT_TRUE(shrink.trace_preserving());
}

TEST(Povm, SquareRootMeasurement) {
  Rng rng(20);
  RegisterSystem s{{"A", 3}};
  Matrix e = random_effect(3, rng);
  auto povm = Povm::from_effects(s, {e, Matrix::Identity(3, 3) - e});
  EXPECT_LT(max_abs(povm.effect(0) - e), 1e-10);
  EXPECT_THROW(Povm::from_effects(s, {e}), InputError);
  EXPECT_THROW(Povm::from_effects(s, {2.0 * Matrix::Identity(3, 3)}), InputError);
}

TEST(TraceNorm, MatchesSingularValueSum) {
  Rng rng(21);
  for (int t = 0; t < 5; ++t) {
    Matrix m = random_unitary(5, rng) * 0.3 + random_unitary(5, rng) * 0.7;
    Eigen::JacobiSVD<Matrix> svd(m);
    EXPECT_NEAR(detail::trace_norm(m), svd.singularValues().sum(), 1e-9);
  }
}

}  // namespace
}  // namespace qsrlc
