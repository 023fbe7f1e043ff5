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

// Closed-form communication rates for state redistribution and its special
// cases, with and without the incoherent-operations restriction on Bob.
// Qubit rates carry the factor 1/2 relative to cobit rates.

#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsrlc/coherence.hpp"
#include "qsrlc/entropy.hpp"
#include "qsrlc/protocols.hpp"
#include "qsrlc/qmat.hpp"

namespace qsrlc {

// Which registers play reference, Alice's side information, Bob's side
// information and the transferred system.
struct Roles {
  LabelSet r{"R"}, a{"A"}, b{"B"}, c{"C"};

  LabelSet all() const {
    LabelSet out;
    for (const auto *s : {&r, &a, &b, &c}) out.insert(out.end(), s->begin(), s->end());
    return out;
  }
};

namespace detail {

inline void require_roles(const DensityOperator &rho, const Roles &roles) {
  for (const auto &l : roles.all())
    if (!rho.system().contains(l)) throw InputError("state has no register '" + l + "'");
  require_disjoint(roles.r, roles.b);
  require_disjoint(roles.r, roles.c);
  require_disjoint(roles.b, roles.c);
  require_disjoint(label_union(roles.r, roles.b), roles.a);
  require_disjoint(roles.a, roles.c);
}

// Entropy of a marginal; empty label sets have zero entropy.
inline double entropy_or_zero(const DensityOperator &rho, const LabelSet &labels) {
  return labels.empty() ? 0.0 : entropy_of(rho, labels);
}

inline double dephased_entropy(const DensityOperator &rho, const LabelSet &labels) {
  if (labels.empty()) return 0.0;
  return von_neumann_entropy(dephase(partial_trace(rho, labels)));
}

inline double coherence_or_zero(const DensityOperator &rho, const LabelSet &labels) {
  return labels.empty() ? 0.0 : relative_entropy_of_coherence(rho, labels);
}

inline double cmi_or_mi(const DensityOperator &rho, const LabelSet &a, const LabelSet &b, const LabelSet &c) {
  if (a.empty() || b.empty()) return 0.0;
  if (c.empty()) return mutual_information(rho, a, b);
  return conditional_mutual_information(rho, a, b, c);
}

}  // namespace detail

struct StandardRates {
  double q = 0;         // 1/2 I(C:R|B)
  double q_plus_e = 0;  // S(C|B)
};

inline StandardRates standard_qsr_rates(const DensityOperator &rho, const Roles &roles = {}) {
  detail::require_roles(rho, roles);
  StandardRates out;
  out.q = 0.5 * detail::cmi_or_mi(rho, roles.c, roles.r, roles.b);
  out.q_plus_e = detail::entropy_or_zero(rho, label_union(roles.b, roles.c)) - detail::entropy_or_zero(rho, roles.b);
  return out;
}

// Lower bound on Q + E + C: S(Delta(rho_BC)) - S(Delta(rho_B)).
inline double slepian_wolf_sum_bound(const DensityOperator &rho, const Roles &roles = {}) {
  detail::require_roles(rho, roles);
  return detail::dephased_entropy(rho, label_union(roles.b, roles.c)) - detail::dephased_entropy(rho, roles.b);
}

// The incoherent rate in its three equivalent forms, all in cobits (without
// the qubit factor 1/2).
struct IncoherentRateForms {
  double coherence_form = 0;  // I(C:R|B) + R_c(BC) - R_c(B)
  double divergence_form = 0;  // I(R:C|B) + D(Phi_BC||Delta Phi_BC) - D(Phi_B||Delta Phi_B)
  double difference_form = 0;  // D(Phi_RBC||Phi_RB x sigma) - D(Delta Phi_BC||Delta Phi_B x sigma)

  double max_disagreement() const {
    return std::max({std::abs(coherence_form - divergence_form), std::abs(coherence_form - difference_form),
                     std::abs(divergence_form - difference_form)});
  }
};

namespace detail {

inline double relative_entropy_to_dephased(const DensityOperator &rho, const LabelSet &labels) {
  if (labels.empty()) return 0.0;
  auto m = partial_trace(rho, labels);
  auto v = relative_entropy(m, dephase(m));
  if (!v.finite) throw BoundViolation("relative entropy to the dephased state is infinite");
  return v.value;
}

inline DensityOperator default_free_state(const DensityOperator &rho, const LabelSet &c) {
  return dephase(partial_trace(rho, c));
}

}  // namespace detail

inline IncoherentRateForms incoherent_rate_forms(const DensityOperator &rho, const Roles &roles,
                                                 const DensityOperator &sigma_c) {
  detail::require_roles(rho, roles);
  if (roles.c.empty()) throw InputError("C must be non-empty");
  auto c_sys = rho.system().select(roles.c);
  if (sigma_c.system() != c_sys) throw InputError("sigma_C must live on " + c_sys.to_string());
  if (!is_free_state(sigma_c)) throw InputError("sigma_C must be diagonal");
  const LabelSet bc = label_union(roles.b, roles.c);
  IncoherentRateForms f;
  const double cmi = detail::cmi_or_mi(rho, roles.c, roles.r, roles.b);
  f.coherence_form = cmi + detail::coherence_or_zero(rho, bc) - detail::coherence_or_zero(rho, roles.b);
  f.divergence_form = detail::cmi_or_mi(rho, roles.r, roles.c, roles.b) + detail::relative_entropy_to_dephased(rho, bc) -
                      detail::relative_entropy_to_dephased(rho, roles.b);

  // D(Phi_RBC || Phi_RB (x) sigma_C) - D(Delta Phi_BC || Delta Phi_B (x) sigma_C),
  // with registers of the product reference ordered like the marginal.
  auto product_reference = [&](const DensityOperator &m, const LabelSet &left) {
    auto ref = left.empty() ? sigma_c : tensor(partial_trace(m, left), sigma_c);
    return reorder(ref, m.system().labels());
  };
  const LabelSet rb = label_union(roles.r, roles.b);
  auto rho_rbc = partial_trace(rho, label_union(rb, roles.c));
  auto first = relative_entropy(rho_rbc, product_reference(rho_rbc, rho_rbc.system().complement(roles.c)));
  auto deph_bc = dephase(partial_trace(rho, bc));
  auto second = relative_entropy(deph_bc, product_reference(deph_bc, deph_bc.system().complement(roles.c)));
  if (!first.finite || !second.finite) throw InputError("supp(rho_C) is not contained in supp(sigma_C)");
  f.difference_form = first.value - second.value;
  return f;
}

inline IncoherentRateForms incoherent_rate_forms(const DensityOperator &rho, const Roles &roles = {}) {
  return incoherent_rate_forms(rho, roles, detail::default_free_state(rho, roles.c));
}

// Minimal qubit rate when Bob is restricted to incoherent operations:
// 1/2 {I(C:R|B) + R_c(rho_BC) - R_c(rho_B)}.
inline double incoherent_qsr_rate(const DensityOperator &rho, const Roles &roles = {}) {
  detail::require_roles(rho, roles);
  const LabelSet bc = label_union(roles.b, roles.c);
  return 0.5 * (detail::cmi_or_mi(rho, roles.c, roles.r, roles.b) + detail::coherence_or_zero(rho, bc) -
                detail::coherence_or_zero(rho, roles.b));
}

// 1/2 {S(rho_C) + S(Delta(rho_C))}.
inline double incoherent_schumacher_rate(const DensityOperator &rho_c) {
  return 0.5 * (von_neumann_entropy(rho_c) + von_neumann_entropy(dephase(rho_c)));
}

// 1/2 {I(C:R) + R_c(rho_BC) - R_c(rho_B)} for a state on R, B, C.
inline double incoherent_slepian_wolf_rate(const DensityOperator &rho, const Roles &roles = {LabelSet{"R"}, {}, {"B"}, {"C"}}) {
  detail::require_roles(rho, roles);
  return 0.5 * (detail::cmi_or_mi(rho, roles.c, roles.r, {}) +
                detail::coherence_or_zero(rho, label_union(roles.b, roles.c)) - detail::coherence_or_zero(rho, roles.b));
}

// 1/2 {I(C:R) + R_c(rho_C)} for a state on R, A, C.
inline double incoherent_splitting_rate(const DensityOperator &rho, const Roles &roles = {LabelSet{"R"}, {"A"}, {}, {"C"}}) {
  detail::require_roles(rho, roles);
  return 0.5 * (detail::cmi_or_mi(rho, roles.c, roles.r, {}) + detail::coherence_or_zero(rho, roles.c));
}

// Forward classical rate; superdense coding by free operations doubles the
// qubit rate.
inline double classical_rate_incoherent(const DensityOperator &rho, const Roles &roles = {}) {
  return 2 * incoherent_qsr_rate(rho, roles);
}

struct SplittingRate {
  double value = 0;  // cobits per copy
  bool regularized = true;
  std::string note;
};

// I(R:C) + lim (1/n) inf_sigma D(rho_C^n || sigma). For coherence the limit is
// single-letter, R_c(rho_C); other theories get the single-letter infimum
// over their supplied free family.
inline SplittingRate splitting_rate_general(const DensityOperator &rho, const ResourceTheory &theory,
                                            const Roles &roles = {LabelSet{"R"}, {"A"}, {}, {"C"}}) {
  detail::require_roles(rho, roles);
  SplittingRate out;
  const double mi = detail::cmi_or_mi(rho, roles.r, roles.c, {});
  auto rho_c = partial_trace(rho, roles.c);
  if (theory.name == "coherence") {
    out.value = mi + relative_entropy_of_coherence(rho_c);
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto &sigma : theory.free_state_family(rho_c.system())) {
    auto d = relative_entropy(rho_c, sigma);
    if (d.finite) best = std::min(best, d.value);
  }
  out.value = mi + best;
  out.regularized = false;
  out.note = "regularization not evaluated; single-letter infimum over the supplied free family";
  return out;
}

// Both sides of the converse/achievability coincidence, in cobits.
struct ConverseAudit {
  double achievability = 0;  // difference form with sigma_C = Delta(rho_C)
  double converse = 0;       // I(R:C|B) + D(Phi_BC||Delta Phi_BC) - D(Phi_B||Delta Phi_B)
  double splitting_achievability = 0;  // I(R:C) + D(rho_C || Delta rho_C)
  double splitting_converse = 0;       // I(R:C) + inf over free sigma of D(rho_C || sigma)
  bool agree(double tol = 1e-9) const {
    return std::abs(achievability - converse) <= tol && std::abs(splitting_achievability - splitting_converse) <= tol;
  }
};

inline ConverseAudit audit_converse_equals_achievability(const DensityOperator &rho, const Roles &roles = {}) {
  auto forms = incoherent_rate_forms(rho, roles);
  ConverseAudit a;
  a.achievability = forms.difference_form;
  a.converse = forms.divergence_form;
  const LabelSet rb = label_union(roles.r, roles.b);
  const double mi = detail::cmi_or_mi(rho, rb, roles.c, {});
  auto rho_c = partial_trace(rho, roles.c);
  a.splitting_achievability = mi + relative_entropy(rho_c, dephase(rho_c)).value;
  // inf over diagonal sigma of D(rho_C || sigma) is attained at Delta(rho_C)
  // and equals S(Delta rho_C) - S(rho_C).
  a.splitting_converse = mi + relative_entropy_of_coherence(rho_c);
  return a;
}

//----------------------------------------------------------------------------
// Rate report
//----------------------------------------------------------------------------

enum class RateUnit { qubits, cobits };

inline RateUnit parse_rate_unit(const std::string &s) {
  if (s == "qubits") return RateUnit::qubits;
  if (s == "cobits") return RateUnit::cobits;
  throw InputError("unknown unit '" + s + "' (expected qubits or cobits)");
}

inline std::string to_string(RateUnit u) { return u == RateUnit::qubits ? "qubits" : "cobits"; }

struct RateEntry {
  std::string key;
  double value = 0;
  // Qubit-rate entries are doubled when reported in cobits; "bits" entries
  // are unit-independent.
  bool qubit_rate = true;
};

struct RateReport {
  std::vector<RateEntry> entries;  // qubit units
  RateUnit unit = RateUnit::qubits;

  double value(const std::string &key) const {
    for (const auto &e : entries)
      if (e.key == key) return e.qubit_rate && unit == RateUnit::cobits ? 2 * e.value : e.value;
    throw InputError("rate report has no entry '" + key + "'");
  }

  std::string unit_of(const std::string &key) const {
    for (const auto &e : entries)
      if (e.key == key) return e.qubit_rate ? to_string(unit) : "bits";
    throw InputError("rate report has no entry '" + key + "'");
  }

  RateReport in_units(RateUnit u) const {
    RateReport r = *this;
    r.unit = u;
    return r;
  }
};

inline const std::vector<std::string> &rate_report_keys() {
  static const std::vector<std::string> keys{"q_min_std",
                                             "q_plus_e_min_std",
                                             "sum_bound_slepian_wolf",
                                             "q_min_incoherent",
                                             "q_min_schumacher_incoherent",
                                             "q_min_splitting_incoherent",
                                             "classical_rate_incoherent"};
  return keys;
}

// Splitting treats B as part of the reference (Bob's side information unused).
inline RateReport rate_report(const DensityOperator &rho, const Roles &roles = {}) {
  auto std_rates = standard_qsr_rates(rho, roles);
  RateReport r;
  r.entries.push_back({"q_min_std", std_rates.q, true});
  r.entries.push_back({"q_plus_e_min_std", std_rates.q_plus_e, true});
  r.entries.push_back({"sum_bound_slepian_wolf", slepian_wolf_sum_bound(rho, roles), false});
  r.entries.push_back({"q_min_incoherent", incoherent_qsr_rate(rho, roles), true});
  r.entries.push_back({"q_min_schumacher_incoherent", incoherent_schumacher_rate(partial_trace(rho, roles.c)), true});
  Roles split{label_union(roles.r, roles.b), roles.a, {}, roles.c};
  r.entries.push_back({"q_min_splitting_incoherent", incoherent_splitting_rate(rho, split), true});
  r.entries.push_back({"classical_rate_incoherent", classical_rate_incoherent(rho, roles), false});
  return r;
}

inline std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline std::string rate_csv_header() {
  std::string h = "unit";
  for (const auto &k : rate_report_keys()) h += "," + k;
  return h;
}

inline std::string rate_csv_row(const RateReport &r) {
  std::string row = to_string(r.unit);
  for (const auto &k : rate_report_keys()) row += "," + format_number(r.value(k));
  return row;
}

inline nlohmann::json to_json(const RateReport &r) {
  nlohmann::json j;
  j["unit"] = to_string(r.unit);
  nlohmann::json rates = nlohmann::json::object();
  for (const auto &k : rate_report_keys()) rates[k] = {{"value", r.value(k)}, {"unit", r.unit_of(k)}};
  j["rates"] = std::move(rates);
  return j;
}

//----------------------------------------------------------------------------
// One-shot bound
//----------------------------------------------------------------------------

struct OneShotBound {
  double value = 0;  // cobits; -inf when D_F is infinite
  EntropicValue d_max;
  EntropicValue d_f;
  double constant = 0;  // 2 log2(2 / (eps1 gamma^2))
  bool unsmoothed = true;  // D_max evaluated at Phi itself instead of the inf over the eps1-ball
};

inline OneShotBound one_shot_achievability_bound(const QsrInstance &in) {
  detail::validate_qsr_instance(in);
  auto psi = reorder(in.psi, {"R", "A", "B", "C"});
  auto rho = DensityOperator::from_pure(psi);
  auto sigma = in.sigma_c.relabeled(RegisterSystem{{"C", in.sigma_c.dim()}});
  OneShotBound b;
  b.d_max = max_relative_entropy(partial_trace(rho, {"R", "B", "C"}), tensor(partial_trace(rho, {"R", "B"}), sigma));
  if (!b.d_max.finite) throw InputError("supp(rho_C) is not contained in supp(sigma_C)");
  b.d_f = restricted_hypothesis_testing(partial_trace(rho, {"B", "C"}), tensor(partial_trace(rho, {"B"}), sigma),
                                        std::pow(in.eps2, 4), CollapsingMap::dephasing());
  b.constant = 2 * std::log2(2 / (in.eps1 * in.gamma * in.gamma));
  b.value = b.d_f.finite ? b.d_max.value - b.d_f.value + b.constant : -std::numeric_limits<double>::infinity();
  return b;
}

//----------------------------------------------------------------------------
// Audits
//----------------------------------------------------------------------------

// R_c(rho_AB) - R_c(rho_B) <= 2 log2 d_A.
struct CoherenceGainCheck {
  double gain = 0;
  double bound = 0;
  bool holds(double slack = 1e-8) const { return gain <= bound + slack; }
};

inline CoherenceGainCheck coherence_gain_check(const DensityOperator &rho, const LabelSet &a, const LabelSet &b) {
  require_disjoint(a, b);
  CoherenceGainCheck c;
  c.gain = relative_entropy_of_coherence(rho, label_union(a, b)) - detail::coherence_or_zero(rho, b);
  c.bound = 2 * std::log2(static_cast<double>(rho.system().dim_of(a)));
  return c;
}

// |R_c(rho) - R_c(rho')| <= eps (log d + log d) + eps log(1/eps) + 4 eps for
// ||rho - rho'||_1 = eps <= 1/3; the min over free tau of ||log tau||_inf is
// log d for coherence.
struct ContinuityCheck {
  double lhs = 0, rhs = 0;
  bool applicable = false;
  bool holds(double slack = 1e-8) const { return !applicable || lhs <= rhs + slack; }
};

inline ContinuityCheck coherence_continuity_check(const DensityOperator &rho, const DensityOperator &rho2) {
  require_same_system(rho, rho2, "coherence continuity");
  ContinuityCheck c;
  const double eps = detail::trace_norm(rho.matrix() - rho2.matrix());
  c.lhs = std::abs(relative_entropy_of_coherence(rho) - relative_entropy_of_coherence(rho2));
  c.applicable = eps <= 1.0 / 3.0;
  const double logd = std::log2(static_cast<double>(rho.dim()));
  c.rhs = eps > 0 ? eps * 2 * logd + eps * std::log2(1 / eps) + 4 * eps : 0.0;
  return c;
}

}  // namespace qsrlc
