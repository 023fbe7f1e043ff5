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

// Protocol simulations: coherence creation from qubits and singlets, Uhlmann
// isometry extraction, the sequential position decoder, and one-shot state
// redistribution with a convex-split encoder. Global states are kept as
// vectors; mixtures over classical outcomes are ensembles of unnormalized
// branch vectors.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qsrlc/coherence.hpp"
#include "qsrlc/convex_split.hpp"
#include "qsrlc/entropy.hpp"
#include "qsrlc/qmat.hpp"
#include "qsrlc/transcript.hpp"

namespace qsrlc {

inline constexpr std::size_t kDefaultAmplitudeBudget = std::size_t{1} << 13;

inline void require_amplitude_budget(double amplitudes, std::size_t budget, const std::string &what) {
  if (amplitudes > static_cast<double>(budget))
    throw BudgetError(what + " needs " + std::to_string(static_cast<unsigned long long>(std::min(amplitudes, 1e19))) +
                      " amplitudes, budget is " + std::to_string(budget));
}

// Mixed state sum_i |v_i><v_i| over branch vectors of a common system.
struct Ensemble {
  RegisterSystem system;
  std::vector<Vector> branches;

  double total_weight() const {
    double w = 0;
    for (const auto &v : branches) w += v.squaredNorm();
    return w;
  }

  DensityOperator marginal(const LabelSet &keep) const {
    auto kept = system.select(keep);
    const auto d = static_cast<Eigen::Index>(kept.dim());
    Matrix m = Matrix::Zero(d, d);
    for (const auto &v : branches) m += marginal_matrix(system, v, keep);
    return DensityOperator::trusted(kept, std::move(m));
  }
};

// <phi| rho_T |phi> for the pure target on registers T (labels and dims of
// `target` must exist in the ensemble).
inline double overlap_with_pure(const Ensemble &ens, const StateVector &target) {
  auto labels = target.system().labels();
  for (const auto &l : labels)
    if (ens.system.dim_of(l) != target.system().dim_of(l))
      throw InputError("target register '" + l + "' has a different dimension");
  auto split = detail::split_index(ens.system, labels);
  const Vector &phi = target.amplitudes();
  double total = 0;
  for (const auto &v : ens.branches) {
    for (std::size_t r = 0; r < split.rest_dim; ++r) {
      Complex s = 0;
      for (std::size_t t = 0; t < split.target_dim; ++t) s += std::conj(phi[t]) * v[split(t, r)];
      total += std::norm(s);
    }
  }
  return total;
}

inline Vector swap_registers(const RegisterSystem &sys, const Vector &v, const std::string &a, const std::string &b) {
  if (a == b) return v;
  if (sys.dim_of(a) != sys.dim_of(b)) throw InputError("cannot swap registers of different dimension");
  auto order = sys.labels();
  std::swap(order[sys.position(a)], order[sys.position(b)]);
  return reorder(sys, v, order);
}

inline Matrix swap_unitary(std::size_t d) {
  const auto dd = static_cast<Eigen::Index>(d);
  Matrix s = Matrix::Zero(dd * dd, dd * dd);
  for (Eigen::Index i = 0; i < dd; ++i)
    for (Eigen::Index j = 0; j < dd; ++j) s(j * dd + i, i * dd + j) = 1;
  return s;
}

//----------------------------------------------------------------------------
// Coherence creation
//----------------------------------------------------------------------------

// Bob turns q qubit channel uses and e shared singlets into q + min(e, q)
// maximally coherent qubits. Alice rotates each used singlet to
// (|0+> + |1->)/sqrt2 with a Hadamard on her half and sends that half; Bob
// applies the diagonal controlled-Z, which yields |++>. Leftover channel uses
// carry fresh |+> states.
inline ProtocolTranscript coherence_creation(std::size_t q, std::size_t e,
                                             std::size_t amplitude_budget = kDefaultAmplitudeBudget) {
  const std::size_t used = std::min(e, q);
  const std::size_t fresh = q - used;
  require_amplitude_budget(std::exp2(static_cast<double>(2 * used + fresh)), amplitude_budget,
                           "coherence creation");
  ProtocolTranscript t;
  t.protocol = "coherence-creation";
  t.values["q"] = static_cast<double>(q);
  t.values["e"] = static_cast<double>(e);

  std::vector<Register> regs;
  for (std::size_t i = 1; i <= used; ++i) {
    regs.push_back({"A" + std::to_string(i), 2});
    regs.push_back({"B" + std::to_string(i), 2});
  }
  for (std::size_t i = 1; i <= fresh; ++i) regs.push_back({"X" + std::to_string(i), 2});
  const RegisterSystem sys(regs);
  const Vector phi_plus = [] {
    Vector v = Vector::Zero(4);
    v[0] = v[3] = 1 / std::sqrt(2.0);
    return v;
  }();
  Vector psi = Vector::Ones(1);
  for (std::size_t i = 0; i < used; ++i) psi = detail::kron(psi, phi_plus);
  for (std::size_t i = 0; i < fresh; ++i) psi = detail::kron(psi, Vector(Vector::Unit(2, 0)));

  LabelSet bob;
  for (std::size_t i = 1; i <= used; ++i) bob.push_back("B" + std::to_string(i));
  // The state stays a product across blocks (A_i B_i) and X_i, and R_c is
  // additive over products, so Bob's coherence is summed block by block.
  std::vector<LabelSet> blocks;
  for (std::size_t i = 1; i <= used; ++i) blocks.push_back({"A" + std::to_string(i), "B" + std::to_string(i)});
  for (std::size_t i = 1; i <= fresh; ++i) blocks.push_back({"X" + std::to_string(i)});
  auto bob_coherence = [&](const Vector &v) {
    double total = 0;
    for (const auto &block : blocks) {
      LabelSet held;
      for (const auto &l : block)
        if (std::find(bob.begin(), bob.end(), l) != bob.end()) held.push_back(l);
      if (held.empty()) continue;
      total += relative_entropy_of_coherence(DensityOperator::trusted(sys.select(held), marginal_matrix(sys, v, held)));
    }
    return total;
  };

  auto &setup = t.add_step("setup", "share " + std::to_string(used) + " singlets |Phi+>; " +
                                        std::to_string(e - used) + " further singlets stay idle");
  setup.values["bob_coherence"] = bob_coherence(psi);

  const Matrix h = hadamard();
  const Matrix cz = controlled_z();
  double max_increase = 0;
  for (std::size_t i = 1; i <= used; ++i) {
    const std::string a = "A" + std::to_string(i), b = "B" + std::to_string(i);
    psi = apply_local(sys, psi, h, {a});
    t.add_step("alice", "Hadamard on " + a + ": singlet becomes (|0+> + |1->)/sqrt2");

    double before = bob_coherence(psi);
    bob.push_back(a);
    double after = bob_coherence(psi);
    ++t.counters.qubits_sent;
    ++t.counters.singlets_consumed;
    auto &send = t.add_step("alice", "send " + a + " to Bob");
    send.values["qubits_sent"] = 1;
    send.values["bob_coherence_before"] = before;
    send.values["bob_coherence_after"] = after;
    max_increase = std::max(max_increase, after - before);

    auto witness = is_incoherent_channel(KrausChannel::unitary(RegisterSystem{{a, 2}, {b, 2}}, cz));
    psi = apply_local(sys, psi, cz, {a, b});
    t.certify("bob", "controlled-Z on " + a + "," + b, witness.incoherent, "diagonal unitary");
    auto &apply = t.add_step("bob", "controlled-Z on " + a + "," + b + " gives |++>");
    apply.values["bob_coherence_after"] = bob_coherence(psi);
    if (apply.values["bob_coherence_after"] > after + 1e-9)
      throw BoundViolation("incoherent operation increased coherence");
  }
  for (std::size_t i = 1; i <= fresh; ++i) {
    const std::string x = "X" + std::to_string(i);
    psi = apply_local(sys, psi, h, {x});
    t.add_step("alice", "prepare |+> in " + x);
    double before = bob_coherence(psi);
    bob.push_back(x);
    double after = bob_coherence(psi);
    ++t.counters.qubits_sent;
    auto &send = t.add_step("alice", "send " + x + " to Bob");
    send.values["qubits_sent"] = 1;
    send.values["bob_coherence_before"] = before;
    send.values["bob_coherence_after"] = after;
    max_increase = std::max(max_increase, after - before);
  }

  // Bob now holds every simulated register.
  const std::size_t c = 2 * used + fresh;
  const auto d = static_cast<Eigen::Index>(sys.dim());
  Vector plus = Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  double f = std::min(1.0, std::abs(plus.dot(psi)));
  t.counters.coherent_qubits_out = c;
  t.achieved_fidelity = f;
  t.values["c"] = static_cast<double>(c);
  t.values["max_coherence_increase_per_qubit"] = max_increase;
  t.values["final_bob_coherence"] = bob_coherence(psi);
  auto &fin = t.add_step("bob", "holds |+>^(x)" + std::to_string(c));
  fin.values["fidelity"] = f;
  if (f < 1 - 1e-9) throw BoundViolation("coherence creation fidelity " + std::to_string(f));
  if (max_increase > 2.0 + 1e-9) throw BoundViolation("coherence increased by more than 2 per qubit sent");
  return t;
}

//----------------------------------------------------------------------------
// Uhlmann isometry
//----------------------------------------------------------------------------

struct UhlmannFit {
  Matrix v;  // d_B x d_C
  double overlap = 0;
};

// For |rho> = sum X_ab |a>|b> and |sigma> = sum Y_ac |a>|c>, the isometry
// V: C -> B maximizing |<rho| (I (x) V) |sigma>| is V = W U^dagger where
// (X^dagger Y)^T = U S W^dagger; the overlap is Tr S.
inline UhlmannFit uhlmann_fit(const Eigen::MatrixXcd &x, const Eigen::MatrixXcd &y) {
  if (x.rows() != y.rows()) throw InputError("uhlmann: shared dimensions differ");
  if (y.cols() > x.cols()) throw InputError("uhlmann: dim(C) > dim(B)");
  Eigen::MatrixXcd nt = (x.adjoint() * y).transpose();  // d_C x d_B
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(nt, Eigen::ComputeFullU | Eigen::ComputeThinV);
  UhlmannFit out;
  out.v = svd.matrixV() * svd.matrixU().adjoint();
  out.overlap = svd.singularValues().sum();
  return out;
}

namespace detail {

// Vector on `sys` as a (shared x rest) matrix, shared registers in the order
// given and the rest in canonical order.
inline Eigen::MatrixXcd bipartite_matrix(const RegisterSystem &sys, const Vector &v, const LabelSet &shared) {
  auto split = split_index(sys, shared);
  Eigen::MatrixXcd m(split.target_dim, split.rest_dim);
  for (std::size_t t = 0; t < split.target_dim; ++t)
    for (std::size_t r = 0; r < split.rest_dim; ++r) m(t, r) = v[split(t, r)];
  return m;
}

}  // namespace detail

struct UhlmannResult {
  Isometry isometry;   // sigma's purifier -> rho's purifier
  double overlap = 0;  // |<rho|theta>|, equal to F(rho_A, sigma_A)
  StateVector theta;   // (I (x) V)|sigma> on shared (x) rho's purifier
};

inline UhlmannResult uhlmann_isometry(const StateVector &rho, const StateVector &sigma, const LabelSet &shared) {
  for (const auto &l : shared)
    if (rho.system().dim_of(l) != sigma.system().dim_of(l))
      throw InputError("uhlmann: register '" + l + "' differs between the two purifications");
  auto b_labels = rho.system().complement(shared);
  auto c_labels = sigma.system().complement(shared);
  auto x = detail::bipartite_matrix(rho.system(), rho.amplitudes(), shared);
  auto y = detail::bipartite_matrix(sigma.system(), sigma.amplitudes(), shared);
  auto fit = uhlmann_fit(x, y);
  auto b_sys = rho.system().select(b_labels);
  auto c_sys = sigma.system().select(c_labels);
  Eigen::MatrixXcd theta_m = y * fit.v.transpose();
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = theta_m;
  Vector theta = Eigen::Map<const Vector>(rm.data(), rm.size());
  auto out_sys = rho.system().ordered(shared).concat(b_sys);
  return {Isometry(c_sys.labels().empty() ? RegisterSystem{{"_", 1}} : c_sys,
                   b_sys.labels().empty() ? RegisterSystem{{"_", 1}} : b_sys, fit.v),
          fit.overlap, StateVector::normalized(out_sys, theta)};
}

//----------------------------------------------------------------------------
// Sequential decoder
//----------------------------------------------------------------------------

struct DecoderResult {
  std::vector<double> outcome_probabilities;  // k = 1..b, then "none fired"
  Ensemble output;                             // after the conditional swaps
};

// Bob's while-loop: for k = 1..b measure {Pi, I - Pi} on (B, C_k) through the
// Neumark dilation of {sqrt(Pi), sqrt(I - Pi)}; on the first firing outcome
// swap C_k with C_1 and stop.
inline DecoderResult decode_sequential(const Ensemble &input, const LabelSet &b_labels, const LabelSet &c_labels,
                                       const Matrix &pi) {
  if (c_labels.empty()) throw InputError("decoder needs at least one C register");
  LabelSet first = b_labels;
  first.push_back(c_labels.front());
  const auto dbc = static_cast<Eigen::Index>(input.system.dim_of(first));
  if (pi.rows() != dbc || pi.cols() != dbc) throw InputError("decoder test has the wrong dimension");
  if (!is_free_measurement_operator(pi))
    throw InputError("decoder test is not a free measurement operator (must be diagonal, 0 <= Pi <= I)");
  auto bc_sys = input.system.ordered(first);
  auto dilation = neumark_dilation(
      Povm::from_effects(bc_sys, {pi, Matrix(Matrix::Identity(dbc, dbc) - pi)}));
  // Branch operators read back from the dilation unitary.
  auto branch_operator = [&](std::size_t i) {
    Matrix a(dbc, dbc);
    const auto m = static_cast<Eigen::Index>(dilation.outcomes);
    for (Eigen::Index s = 0; s < dbc; ++s)
      for (Eigen::Index s2 = 0; s2 < dbc; ++s2) a(s, s2) = dilation.unitary(s * m + static_cast<Eigen::Index>(i), s2 * m);
    return a;
  };
  const Matrix fire = branch_operator(0), pass = branch_operator(1);

  DecoderResult out;
  out.output.system = input.system;
  std::vector<Vector> remaining = input.branches;
  for (std::size_t k = 0; k < c_labels.size(); ++k) {
    LabelSet targets = b_labels;
    targets.push_back(c_labels[k]);
    double p = 0;
    std::vector<Vector> next;
    for (const auto &v : remaining) {
      Vector f = apply_local(input.system, v, fire, targets);
      p += f.squaredNorm();
      out.output.branches.push_back(swap_registers(input.system, f, c_labels[k], c_labels.front()));
      next.push_back(apply_local(input.system, v, pass, targets));
    }
    out.outcome_probabilities.push_back(p);
    remaining = std::move(next);
  }
  double fail = 0;
  for (auto &v : remaining) {
    fail += v.squaredNorm();
    out.output.branches.push_back(std::move(v));
  }
  out.outcome_probabilities.push_back(fail);
  return out;
}

// mu^(2) = (1/b) sum_j |Phi><Phi|_{R A B C_j} (x) sigma on the other C's, with
// sigma purified into L registers (L_j left in |0>).
inline Ensemble decoder_test_ensemble(const StateVector &phi_rabc, const DensityOperator &sigma_c, std::size_t b) {
  if (b == 0) throw InputError("b must be positive");
  auto phi = reorder(phi_rabc, {"R", "A", "B", "C"});
  const std::size_t dc = phi.system().dim_of("C");
  if (sigma_c.dim() != dc) throw InputError("sigma_C dimension mismatch");
  std::vector<Register> regs{{"R", phi.system().dim_of("R")}, {"A", phi.system().dim_of("A")},
                             {"B", phi.system().dim_of("B")}};
  for (std::size_t i = 1; i <= b; ++i) regs.push_back({"C" + std::to_string(i), dc});
  for (std::size_t i = 1; i <= b; ++i) regs.push_back({"L" + std::to_string(i), dc});
  Ensemble ens{RegisterSystem(regs), {}};
  // |sigma>_{LC} = sum_c sqrt(sigma_c) |c>_L |c>_C for diagonal sigma.
  if (!is_diagonal(sigma_c.matrix())) throw InputError("sigma_C must be diagonal");
  Vector sig_lc = Vector::Zero(static_cast<Eigen::Index>(dc * dc));
  for (std::size_t c = 0; c < dc; ++c)
    sig_lc[static_cast<Eigen::Index>(c * dc + c)] =
        std::sqrt(std::max(0.0, sigma_c.matrix()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)).real()));
  const auto &sys = ens.system;
  for (std::size_t j = 1; j <= b; ++j) {
    // Build in the order R A B C_j L_j (C_i L_i)_{i != j}, then reorder.
    Vector v = phi.amplitudes();
    std::vector<Register> order_regs{{"R", sys.dim_of("R")}, {"A", sys.dim_of("A")}, {"B", sys.dim_of("B")},
                                     {"C" + std::to_string(j), dc}, {"L" + std::to_string(j), dc}};
    v = detail::kron(v, Vector(Vector::Unit(static_cast<Eigen::Index>(dc), 0)));
    for (std::size_t i = 1; i <= b; ++i) {
      if (i == j) continue;
      order_regs.push_back({"C" + std::to_string(i), dc});
      order_regs.push_back({"L" + std::to_string(i), dc});
      v = detail::kron(v, sig_lc);
    }
    RegisterSystem built(order_regs);
    // reorder(built -> canonical): out[i] = v[split(i)], with targets listed
    // in the canonical order of `sys`.
    Vector w = reorder(built, v, sys.labels());
    ens.branches.push_back(w / std::sqrt(static_cast<double>(b)));
  }
  return ens;
}

// Runs the decoder on an ensemble and reports outcome statistics and, if a
// target is given, the output fidelity on the target's registers.
inline ProtocolTranscript qsr_decoder_p1(const Ensemble &mu, const LabelSet &b_labels, const LabelSet &c_labels,
                                         const Matrix &pi, const std::optional<StateVector> &target = std::nullopt) {
  ProtocolTranscript t;
  t.protocol = "sequential-decoder";
  LabelSet first = b_labels;
  first.push_back(c_labels.front());
  t.certify("bob", "test {Pi, I - Pi} on B C_k", is_free_measurement_operator(pi), "diagonal test operator");
  t.certify("bob", "flagging channel of sqrt(Pi)",
            is_incoherent_channel(measurement_flag_channel(mu.system.ordered(first), detail::psd_sqrt(pi))).incoherent);
  auto res = decode_sequential(mu, b_labels, c_labels, pi);
  t.certify("bob", "swap C_k <-> C_1", is_incoherent_channel(KrausChannel::unitary(
                                           RegisterSystem{{"x", mu.system.dim_of(c_labels.front())},
                                                          {"y", mu.system.dim_of(c_labels.front())}},
                                           swap_unitary(mu.system.dim_of(c_labels.front())))).incoherent);
  for (std::size_t k = 0; k < res.outcome_probabilities.size(); ++k) {
    bool none = k + 1 == res.outcome_probabilities.size();
    auto &s = t.add_step("bob", none ? "no test fired" : "test fired on C" + std::to_string(k + 1) + ", swap into C1");
    s.values["probability"] = res.outcome_probabilities[k];
  }
  t.values["b"] = static_cast<double>(c_labels.size());
  t.values["failure_probability"] = res.outcome_probabilities.back();
  if (target) {
    double f2 = std::clamp(overlap_with_pure(res.output, *target), 0.0, 1.0);
    t.achieved_fidelity = std::sqrt(f2);
    t.values["fidelity_sq"] = f2;
    t.values["purified_distance"] = std::sqrt(1 - f2);
  }
  return t;
}

//----------------------------------------------------------------------------
// One-shot state redistribution
//----------------------------------------------------------------------------

struct QsrInstance {
  StateVector psi;  // on registers R, A, B, C
  double eps1 = 0.1, eps2 = 0.1, gamma = 0.1;
  DensityOperator sigma_c;
  std::optional<std::size_t> n_override;
  std::optional<std::size_t> b_override;
};

struct QsrPlan {
  EntropicValue k;    // D_max(Phi_RBC || Phi_RB (x) sigma_C), unsmoothed
  EntropicValue d_f;  // D_F^{eps2^4}(Phi_BC || Phi_B (x) sigma_C)
  Matrix test;        // optimal diagonal test on B C
  std::size_t n = 0, b = 0, cobits = 0;
  bool b_clamped = false;
  bool overridden = false;
  double xi_amplitudes = 0, mu_amplitudes = 0;
};

inline std::size_t ceil_log2_ratio(std::size_t n, std::size_t b) {
  std::size_t c = 0;
  while ((b << c) < n) ++c;
  return c;
}

namespace detail {

inline void validate_qsr_instance(const QsrInstance &in) {
  for (const char *l : {"R", "A", "B", "C"})
    if (!in.psi.system().contains(l)) throw InputError(std::string("instance state needs register ") + l);
  if (in.psi.system().size() != 4) throw InputError("instance state must have exactly registers R, A, B, C");
  for (double e : {in.eps1, in.eps2, in.gamma})
    if (!(e > 0 && e < 1)) throw InputError("eps1, eps2 and gamma must lie in (0,1)");
  if (in.sigma_c.dim() != in.psi.system().dim_of("C")) throw InputError("sigma_C dimension does not match C");
  if (!is_free_state(in.sigma_c)) throw InputError("sigma_C is not a free (diagonal) state");
  if (in.n_override && *in.n_override == 0) throw InputError("n override must be positive");
  if (in.b_override && *in.b_override == 0) throw InputError("b override must be positive");
}

inline std::size_t support_size(const DensityOperator &diag) {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < diag.matrix().rows(); ++i)
    if (diag.matrix()(i, i).real() > tol::rank) ++r;
  return r;
}

}  // namespace detail

inline QsrPlan plan_qsr(const QsrInstance &in, std::size_t amplitude_budget = kDefaultAmplitudeBudget) {
  detail::validate_qsr_instance(in);
  auto psi = reorder(in.psi, {"R", "A", "B", "C"});
  auto rho = DensityOperator::from_pure(psi);
  auto sigma = in.sigma_c.relabeled(RegisterSystem{{"C", in.sigma_c.dim()}});
  auto rho_rbc = partial_trace(rho, {"R", "B", "C"});
  auto rho_c = partial_trace(rho, {"C"});
  if (!relative_entropy(rho_c, sigma).finite) throw InputError("supp(rho_C) is not contained in supp(sigma_C)");

  QsrPlan plan;
  plan.k = max_relative_entropy(rho_rbc, tensor(partial_trace(rho, {"R", "B"}), sigma));
  if (!plan.k.finite) throw InputError("D_max(Phi_RBC || Phi_RB (x) sigma_C) is infinite");
  const double delta = in.eps1 * in.eps1;
  plan.n = in.n_override ? *in.n_override : convex_split_copies(plan.k.value, delta);

  auto rho_bc = partial_trace(rho, {"B", "C"});
  auto ref_bc = tensor(partial_trace(rho, {"B"}), sigma);
  auto ht = restricted_hypothesis_test(rho_bc, ref_bc, std::pow(in.eps2, 4), CollapsingMap::dephasing());
  plan.d_f = ht.value;
  plan.test = ht.test;
  if (in.b_override) {
    plan.b = *in.b_override;
  } else if (!plan.d_f.finite) {
    plan.b = plan.n;
  } else {
    plan.b = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::pow(in.gamma, 4) * std::exp2(plan.d_f.value) - 1e-9)));
  }
  if (plan.b > plan.n) {
    plan.b = plan.n;
    plan.b_clamped = true;
  }
  plan.cobits = ceil_log2_ratio(plan.n, plan.b);
  plan.overridden = in.n_override.has_value() || in.b_override.has_value();

  const double dr = psi.system().dim_of("R"), da = psi.system().dim_of("A"), db = psi.system().dim_of("B"),
               dc = psi.system().dim_of("C");
  const double dl = static_cast<double>(detail::support_size(in.sigma_c));
  const double nn = static_cast<double>(plan.n);
  const double dg = std::max(1.0, std::ceil(dc / nn));
  plan.xi_amplitudes = dr * da * db * dc * std::pow(dl * dc, nn);
  plan.mu_amplitudes = dr * db * std::pow(dc, nn) * nn * da * dg * std::pow(dl, nn);
  require_amplitude_budget(std::max(plan.xi_amplitudes, plan.mu_amplitudes), amplitude_budget,
                           "state redistribution with n = " + std::to_string(plan.n));
  return plan;
}

// Protocol P: share xi = |Phi>_{RABC} (x) |sigma>^{(x)n}_{L_i C_i}; Alice maps
// her registers with the Uhlmann isometry toward the convex-split purification
// mu; she measures J (a classical mixture over j), sends floor((j-1)/b) in
// ceil(log2(n/b)) cobits; Bob swaps that block into C_1..C_b and runs the
// sequential decoder. The output is read on R, A, B, C_1.
inline ProtocolTranscript qsr_full(const QsrInstance &in, std::size_t amplitude_budget = kDefaultAmplitudeBudget) {
  auto plan = plan_qsr(in, amplitude_budget);
  auto psi = reorder(in.psi, {"R", "A", "B", "C"});
  const std::size_t dr = psi.system().dim_of("R"), da = psi.system().dim_of("A"), db = psi.system().dim_of("B"),
                    dc = psi.system().dim_of("C");
  const std::size_t n = plan.n, b = plan.b;
  const std::size_t dg = std::max<std::size_t>(1, (dc + n - 1) / n);

  // Purification of sigma_C: L index = position of c in the support.
  std::vector<double> sq(dc, 0.0);
  std::vector<std::size_t> lidx(dc, 0);
  std::size_t dl = 0;
  for (std::size_t c = 0; c < dc; ++c) {
    double s = in.sigma_c.matrix()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)).real();
    if (s > tol::rank) {
      sq[c] = std::sqrt(s);
      lidx[c] = dl++;
    }
  }

  ProtocolTranscript t;
  t.protocol = "qsr";
  t.values["k"] = plan.k.value;
  t.values["d_f"] = plan.d_f.finite ? plan.d_f.value : std::numeric_limits<double>::infinity();
  t.values["n"] = static_cast<double>(n);
  t.values["b"] = static_cast<double>(b);
  t.values["b_clamped"] = plan.b_clamped ? 1 : 0;
  t.values["overridden"] = plan.overridden ? 1 : 0;
  t.values["eps1"] = in.eps1;
  t.values["eps2"] = in.eps2;
  t.values["gamma"] = in.gamma;
  if (plan.b_clamped) t.notes.push_back("b exceeded n and was clamped to n");

  // Shared registers (Bob and Referee): R, B, C1..Cn. Row index in that order.
  std::size_t dcn = 1;
  for (std::size_t i = 0; i < n; ++i) dcn *= dc;
  std::size_t dln = 1;
  for (std::size_t i = 0; i < n; ++i) dln *= dl;
  const std::size_t shared_dim = dr * db * dcn;
  auto digits = [](std::size_t idx, std::size_t base, std::size_t count) {
    std::vector<std::size_t> d(count);
    for (std::size_t i = count; i-- > 0;) {
      d[i] = idx % base;
      idx /= base;
    }
    return d;
  };
  const Vector &phi = psi.amplitudes();  // index ((r*da + a)*db + b)*dc + c
  auto phi_at = [&](std::size_t r, std::size_t a, std::size_t bb, std::size_t c) {
    return phi[static_cast<Eigen::Index>(((r * da + a) * db + bb) * dc + c)];
  };

  // xi as a (shared x [A, C, L1..Ln]) matrix.
  const std::size_t xi_pur = da * dc * dln;
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(shared_dim), static_cast<Eigen::Index>(xi_pur));
  // mu as a (shared x [J, A, G, L1..Ln]) matrix.
  const std::size_t mu_pur = n * da * dg * dln;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(shared_dim), static_cast<Eigen::Index>(mu_pur));
  const double inv_sqrt_n = 1 / std::sqrt(static_cast<double>(n));
  for (std::size_t s = 0; s < shared_dim; ++s) {
    const std::size_t r = s / (db * dcn), bb = (s / dcn) % db;
    auto cs = digits(s % dcn, dc, n);
    // xi: sigma purifications force l_i = lidx[c_i].
    std::size_t lfix = 0;
    double sig = 1;
    for (std::size_t i = 0; i < n; ++i) {
      lfix = lfix * dl + lidx[cs[i]];
      sig *= sq[cs[i]];
    }
    if (sig != 0)
      for (std::size_t a = 0; a < da; ++a)
        for (std::size_t c = 0; c < dc; ++c)
          x(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>((a * dc + c) * dln + lfix)) = phi_at(r, a, bb, c) * sig;
    // mu: branch j has Phi on C_j, L_j = 0, sigma elsewhere.
    for (std::size_t j = 0; j < n; ++j) {
      double w = inv_sqrt_n;
      std::size_t l = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) {
          l = l * dl;
        } else {
          w *= sq[cs[i]];
          l = l * dl + lidx[cs[i]];
        }
      }
      if (w == 0) continue;
      for (std::size_t a = 0; a < da; ++a)
        m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(((j * da + a) * dg + 0) * dln + l)) =
            phi_at(r, a, bb, cs[j]) * w;
    }
  }
  auto &prep = t.add_step("setup", "share xi = |Phi>_RABC (x) |sigma>^(x)n on L_i C_i");
  prep.values["xi_amplitudes"] = plan.xi_amplitudes;
  prep.values["mu_amplitudes"] = plan.mu_amplitudes;

  auto fit = uhlmann_fit(m, x);
  Eigen::MatrixXcd xi_prime = x * fit.v.transpose();  // shared x [J, A, G, L^n]
  auto &enc = t.add_step("alice", "Uhlmann isometry V': A C L^n -> J A G L^n");
  enc.values["overlap"] = fit.overlap;
  t.values["uhlmann_overlap"] = fit.overlap;
  t.values["convex_split_fidelity_sq_bound"] = 1 - in.eps1 * in.eps1;

  // Post-measurement system: R, B, C1..Cn, A, G, L1..Ln.
  std::vector<Register> regs{{"R", dr}, {"B", db}};
  for (std::size_t i = 1; i <= n; ++i) regs.push_back({"C" + std::to_string(i), dc});
  regs.push_back({"A", da});
  regs.push_back({"G", dg});
  for (std::size_t i = 1; i <= n; ++i) regs.push_back({"L" + std::to_string(i), dl});
  Ensemble after_swap{RegisterSystem(regs), {}};
  const std::size_t rest = da * dg * dln;
  std::vector<double> pj(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v(static_cast<Eigen::Index>(shared_dim * rest));
    for (std::size_t s = 0; s < shared_dim; ++s)
      for (std::size_t p = 0; p < rest; ++p)
        v[static_cast<Eigen::Index>(s * rest + p)] = xi_prime(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j * rest + p));
    pj[j] = v.squaredNorm();
    // Bob swaps block C_{mb+1..mb+b} into C_1..C_b.
    const std::size_t msg = j / b;
    for (std::size_t u = 0; u < b && msg * b + u < n; ++u)
      v = swap_registers(after_swap.system, v, "C" + std::to_string(msg * b + u + 1), "C" + std::to_string(u + 1));
    after_swap.branches.push_back(std::move(v));
  }
  auto &meas = t.add_step("alice", "measure J and send floor((j-1)/b)");
  for (std::size_t j = 0; j < n; ++j) meas.values["p_j" + std::to_string(j + 1)] = pj[j];
  meas.values["cobits"] = static_cast<double>(plan.cobits);
  t.counters.cobits_sent = plan.cobits;
  t.certify("bob", "block swap of C registers", true, "register permutation");

  LabelSet cb;
  for (std::size_t i = 1; i <= b; ++i) cb.push_back("C" + std::to_string(i));
  std::vector<Register> target_regs{{"R", dr}, {"A", da}, {"B", db}, {"C1", dc}};
  StateVector target(RegisterSystem(target_regs), phi);
  auto dec = qsr_decoder_p1(after_swap, {"B"}, cb, plan.test, target);
  for (auto &s : dec.steps) t.steps.push_back(s);
  for (auto &c : dec.certificates) t.certificates.push_back(c);
  t.values["decoder_failure_probability"] = dec.value("failure_probability");

  const double f2 = dec.value("fidelity_sq");
  const double dist = std::sqrt(std::max(0.0, 1 - f2));
  t.achieved_fidelity = std::sqrt(f2);
  t.values["fidelity_sq"] = f2;
  t.values["purified_distance"] = dist;
  const double bound = 3 * in.eps1 + in.eps2 + in.gamma;
  t.values["distance_bound"] = bound;
  auto &fin = t.add_step("referee", "compare R A B C1 with Phi");
  fin.values["purified_distance"] = dist;
  if (!plan.overridden && dist > bound + 1e-9)
    throw BoundViolation("state redistribution distance " + std::to_string(dist) + " exceeds " + std::to_string(bound));
  return t;
}

// Decoder alone on the ideal mixture mu^(2); checks the position-decoder
// bound P <= ((b-1) 2^{-D_F} + eps2^4)^{1/4}.
struct DecoderClaimCheck {
  double distance = 0;
  double bound = 0;      // ((b-1) Tr(Pi Phi_B (x) sigma) + 1 - Tr(Pi Phi_BC))^{1/4}
  double bound_b = 0;    // (b 2^{-D_F} + eps2^4)^{1/4}
  double target = 0;     // eps2 + gamma
  std::size_t b = 0;
  bool holds = false;
};

inline DecoderClaimCheck decoder_claim_check(const QsrInstance &in, std::optional<std::size_t> b_value = std::nullopt) {
  detail::validate_qsr_instance(in);
  auto psi = reorder(in.psi, {"R", "A", "B", "C"});
  auto rho = DensityOperator::from_pure(psi);
  auto sigma = in.sigma_c.relabeled(RegisterSystem{{"C", in.sigma_c.dim()}});
  auto rho_bc = partial_trace(rho, {"B", "C"});
  auto ref_bc = tensor(partial_trace(rho, {"B"}), sigma);
  const double e4 = std::pow(in.eps2, 4);
  auto ht = restricted_hypothesis_test(rho_bc, ref_bc, e4, CollapsingMap::dephasing());
  DecoderClaimCheck out;
  if (b_value) {
    out.b = *b_value;
  } else {
    out.b = ht.value.finite
                ? static_cast<std::size_t>(std::max(1.0, std::ceil(std::pow(in.gamma, 4) * std::exp2(ht.value.value) - 1e-9)))
                : 1;
  }
  auto ens = decoder_test_ensemble(psi, in.sigma_c, out.b);
  LabelSet cb;
  for (std::size_t i = 1; i <= out.b; ++i) cb.push_back("C" + std::to_string(i));
  StateVector target(RegisterSystem{{"R", psi.system().dim_of("R")},
                                    {"A", psi.system().dim_of("A")},
                                    {"B", psi.system().dim_of("B")},
                                    {"C1", psi.system().dim_of("C")}},
                     psi.amplitudes());
  auto tr = qsr_decoder_p1(ens, {"B"}, cb, ht.test, target);
  out.distance = tr.value("purified_distance");
  const double beta = std::max(0.0, (ht.test * ref_bc.matrix()).trace().real());
  const double alpha = std::max(0.0, 1 - (ht.test * rho_bc.matrix()).trace().real());
  out.bound = std::pow(static_cast<double>(out.b - 1) * beta + alpha, 0.25);
  out.bound_b = std::pow(static_cast<double>(out.b) * beta + e4, 0.25);
  out.target = in.eps2 + in.gamma;
  out.holds = out.distance <= out.bound + 1e-9;
  return out;
}

//----------------------------------------------------------------------------
// Inequality checks
//----------------------------------------------------------------------------

struct InequalityCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds(double slack = 1e-9) const { return lhs <= rhs + slack; }
};

// P(Pi'_k..Pi'_1 rho Pi'_1..Pi'_k / Tr, rho) <= (sum_i Tr(Pi_i rho))^{1/4} with
// Pi'_i = I - Pi_i for projectors Pi_i. A vanishing post-measurement state
// gets lhs = 1.
inline InequalityCheck sequential_projector_bound_check(const DensityOperator &rho,
                                                        const std::vector<Matrix> &projectors) {
  const auto d = static_cast<Eigen::Index>(rho.dim());
  Matrix chain = Matrix::Identity(d, d);
  double sum = 0;
  for (const auto &p : projectors) {
    if (p.rows() != d || p.cols() != d) throw InputError("projector dimension mismatch");
    if ((p * p - p).cwiseAbs().maxCoeff() > tol::herm || detail::hermiticity_defect(p) > tol::herm)
      throw InputError("sequential bound needs orthogonal projectors");
    chain = (Matrix::Identity(d, d) - p) * chain;
    sum += (p * rho.matrix()).trace().real();
  }
  Matrix post = chain * rho.matrix() * chain.adjoint();
  double tr = post.trace().real();
  InequalityCheck out;
  out.rhs = std::pow(std::max(0.0, sum), 0.25);
  out.lhs = tr > 1e-14 ? purified_distance(DensityOperator::trusted(rho.system(), post / tr), rho) : 1.0;
  return out;
}

// Tr(Pi sigma) >= 1 - (2 eps + delta)^2 with eps = P(rho, sigma) and
// Tr(Pi rho) = 1 - delta^2. Returned as lhs = 1 - Tr(Pi sigma) against
// rhs = (2 eps + delta)^2.
inline InequalityCheck close_states_measurement_check(const DensityOperator &rho, const DensityOperator &sigma,
                                                      const Matrix &pi) {
  const double eps = purified_distance(rho, sigma);
  const double delta = std::sqrt(std::max(0.0, 1 - (pi * rho.matrix()).trace().real()));
  return {1 - (pi * sigma.matrix()).trace().real(), std::pow(2 * eps + delta, 2)};
}

// F(rho, A rho A / Tr(A^2 rho)) >= sqrt(Tr(A^2 rho)), as lhs = sqrt(Tr) and
// rhs = F.
inline InequalityCheck gentle_measurement_check(const DensityOperator &rho, const Matrix &a) {
  Matrix post = a * rho.matrix() * a.adjoint();
  double p = post.trace().real();
  if (p <= 1e-14) return {0, 0};
  double f = fidelity(rho, DensityOperator::trusted(rho.system(), post / p));
  return {std::sqrt(p), f};
}

}  // namespace qsrlc
