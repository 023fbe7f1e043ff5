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

// Command-line frontend. Each command parses its arguments, calls into the
// library and formats the result; exit codes are 0 ok, 2 input error,
// 3 budget exceeded, 4 bound violated.
//
// CSV headers:
//   quantity:                 quantity,value
//   rates:                    unit,q_min_std,...,classical_rate_incoherent
//   simulate coherence-creation: q,e,c,fidelity,qubits_sent,singlets_consumed,bob_operations_free
//   simulate convex-split:    k,delta,n,fidelity_sq,bound,holds
//   simulate qsr:             k,d_f,n,b,cobits,uhlmann_overlap,purified_distance,distance_bound
//   sweep copies:             copies,<rate keys>,per_copy_<rate keys>
//   sweep delta:              delta,k,n,fidelity_sq,bound
//   sweep eps:                eps2,d_f,bound
//   sweep b:                  b,n,cobits,purified_distance

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsrlc/coherence.hpp"
#include "qsrlc/convex_split.hpp"
#include "qsrlc/entropy.hpp"
#include "qsrlc/io.hpp"
#include "qsrlc/protocols.hpp"
#include "qsrlc/random.hpp"
#include "qsrlc/rates.hpp"

namespace qsrlc {

enum class OutputFormat { json, csv, pretty };

struct RunConfig {
  std::string command;     // quantity, rates, simulate, sweep, selftest
  std::string subcommand;  // quantity name, protocol or sweep parameter
  std::vector<std::string> inputs;
  std::string out_path;
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::pretty;
  RateUnit units = RateUnit::qubits;
  std::size_t budget = kDefaultAmplitudeBudget;
  bool allow_inf = false;

  // quantity
  std::string parts;
  double eps = 0.1;
  // rates
  bool random_state = false;
  std::string reference, alice_side, bob_side, system;
  // simulate / sweep
  std::size_t q = 0, e = 0;
  double delta = 0.25;
  std::string q_label = "Q";
  std::string sigma;
  double eps1 = 0.5, eps2 = 0.3, gamma = 0.3;
  std::optional<std::size_t> n_override, b_override;
  std::string range;
  std::string values;
};

namespace cli_detail {

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

// "R+A,C,B" -> {{R, A}, {C}, {B}}.
inline std::vector<LabelSet> parse_parts(const std::string &s) {
  std::vector<LabelSet> out;
  for (const auto &group : split(s, ',')) out.push_back(split(group, '+'));
  return out;
}

inline double parse_double(const std::string &s, const std::string &what) {
  try {
    std::size_t pos = 0;
    double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception &) {
    throw InputError("cannot parse " + what + " '" + s + "' as a number");
  }
}

inline std::vector<double> parse_values(const std::string &s) {
  std::vector<double> out;
  for (const auto &t : split(s, ',')) out.push_back(parse_double(t, "value"));
  if (out.empty()) throw InputError("empty value list");
  return out;
}

// "1:4" -> 1, 2, 3, 4.
inline std::vector<std::size_t> parse_range(const std::string &s) {
  auto parts = split(s, ':');
  if (parts.size() != 2) throw InputError("range must look like LO:HI, got '" + s + "'");
  double lo = parse_double(parts[0], "range start"), hi = parse_double(parts[1], "range end");
  if (lo < 1 || lo != std::floor(lo) || hi != std::floor(hi)) throw InputError("range bounds must be positive integers");
  if (hi < lo) throw InputError("empty range '" + s + "'");
  std::vector<std::size_t> out;
  for (auto i = static_cast<std::size_t>(lo); i <= static_cast<std::size_t>(hi); ++i) out.push_back(i);
  return out;
}

inline DensityOperator parse_sigma(const std::string &s, const std::string &label, std::size_t dim) {
  auto p = parse_values(s);
  if (p.size() != dim)
    throw InputError("--sigma has " + std::to_string(p.size()) + " entries, register " + label + " has dimension " +
                     std::to_string(dim));
  double sum = 0;
  for (double x : p) {
    if (x < 0) throw InputError("--sigma entries must be nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1) > tol::norm) throw InputError("--sigma entries must sum to 1");
  return DensityOperator::diagonal(RegisterSystem{{label, dim}}, p);
}

inline const LoadedState &require_input(const std::vector<LoadedState> &states, std::size_t i,
                                        const std::string &what) {
  if (states.size() <= i) throw InputError(what + " needs " + std::to_string(i + 1) + " state file(s)");
  return states[i];
}

inline std::string value_text(const EntropicValue &v) {
  return v.finite ? format_number(v.value) : "inf";
}

inline Roles resolve_roles(const RunConfig &cfg, const RegisterSystem &sys) {
  auto pick = [&](const std::string &given, const std::string &fallback) {
    if (!given.empty()) return split(given, '+');
    return sys.contains(fallback) ? LabelSet{fallback} : LabelSet{};
  };
  Roles r{pick(cfg.reference, "R"), pick(cfg.alice_side, "A"), pick(cfg.bob_side, "B"), pick(cfg.system, "C")};
  if (r.c.empty()) throw InputError("state has no C register; name it with --system");
  return r;
}

// psi^{(x) k} with registers renamed X -> X1..Xk, and the roles extended.
inline std::pair<StateVector, Roles> copies(const StateVector &psi, const Roles &roles, std::size_t k) {
  auto renamed = [&](std::size_t i) {
    std::vector<Register> regs;
    for (const auto &r : psi.system().registers()) regs.push_back({r.label + std::to_string(i), r.dim});
    return StateVector(RegisterSystem(regs), psi.amplitudes());
  };
  auto out = renamed(1);
  for (std::size_t i = 2; i <= k; ++i) out = tensor(out, renamed(i));
  Roles ext{{}, {}, {}, {}};
  for (std::size_t i = 1; i <= k; ++i) {
    auto add = [&](LabelSet &dst, const LabelSet &src) {
      for (const auto &l : src) dst.push_back(l + std::to_string(i));
    };
    add(ext.r, roles.r);
    add(ext.a, roles.a);
    add(ext.b, roles.b);
    add(ext.c, roles.c);
  }
  return {out, ext};
}

// Marginal on R, B, C computed from the vector (A is never needed by the
// rate formulas).
inline DensityOperator rbc_marginal(const StateVector &psi, Roles &roles) {
  LabelSet keep = label_union(label_union(roles.r, roles.b), roles.c);
  auto m = partial_trace(psi, keep);
  roles.a.clear();
  return m;
}

inline void print_rate_report(const RunConfig &cfg, const RateReport &report, std::ostream &out) {
  switch (cfg.format) {
    case OutputFormat::csv:
      out << rate_csv_header() << "\n" << rate_csv_row(report) << "\n";
      break;
    case OutputFormat::json:
      out << to_json(report).dump(2) << "\n";
      break;
    case OutputFormat::pretty:
      for (const auto &k : rate_report_keys())
        out << k << " = " << format_number(report.value(k)) << " " << report.unit_of(k) << "\n";
      break;
  }
}

// Numbers and booleans go into JSON as such; inf, nan and text stay strings.
inline nlohmann::ordered_json json_scalar(const std::string &text) {
  auto j = nlohmann::ordered_json::parse(text, nullptr, false);
  if (!j.is_discarded() && (j.is_number() || j.is_boolean())) return j;
  return text;
}

inline void print_record(const RunConfig &cfg, const std::vector<std::pair<std::string, std::string>> &fields,
                         std::ostream &out, const nlohmann::json *json_override = nullptr) {
  switch (cfg.format) {
    case OutputFormat::csv: {
      for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].first;
      out << "\n";
      for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].second;
      out << "\n";
      break;
    }
    case OutputFormat::json: {
      if (json_override) {
        out << json_override->dump(2) << "\n";
        break;
      }
      nlohmann::ordered_json j;
      for (const auto &[k, v] : fields) j[k] = json_scalar(v);
      out << j.dump(2) << "\n";
      break;
    }
    case OutputFormat::pretty:
      for (const auto &[k, v] : fields) out << k << " = " << v << "\n";
      break;
  }
}

inline void print_table(const RunConfig &cfg, const std::vector<std::string> &header,
                        const std::vector<std::vector<std::string>> &rows, std::ostream &out) {
  if (cfg.format == OutputFormat::json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto &row : rows) {
      nlohmann::ordered_json j;
      for (std::size_t i = 0; i < header.size(); ++i) j[header[i]] = json_scalar(row[i]);
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
    return;
  }
  const char *sep = cfg.format == OutputFormat::csv ? "," : "\t";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? sep : "") << header[i];
  out << "\n";
  for (const auto &row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? sep : "") << row[i];
    out << "\n";
  }
}

inline std::vector<LoadedState> load_inputs(const RunConfig &cfg) {
  std::vector<LoadedState> states;
  for (const auto &p : cfg.inputs) states.push_back(load_state(p));
  return states;
}

inline StateVector require_pure(const LoadedState &s, const std::string &what) {
  if (!s.pure) throw InputError(what + " needs a pure state (\"amplitudes\")");
  return *s.pure;
}

inline QsrInstance instance_from(const RunConfig &cfg, const StateVector &psi) {
  auto rho = partial_trace(psi, {"C"});
  DensityOperator sigma = cfg.sigma.empty() ? dephase(rho) : parse_sigma(cfg.sigma, "C", rho.dim());
  return QsrInstance{psi, cfg.eps1, cfg.eps2, cfg.gamma, sigma, cfg.n_override, cfg.b_override};
}

// Convex-split inputs: the state file (registers P.. and q_label) or a seeded
// random two-qubit state on P, Q; sigma defaults to rho_Q.
inline std::pair<DensityOperator, DensityOperator> convex_split_inputs(const RunConfig &cfg,
                                                                       const std::vector<LoadedState> &states) {
  DensityOperator rho_pq = [&] {
    if (!states.empty()) return states[0].density;
    Rng rng(cfg.seed);
    return random_density(RegisterSystem{{"P", 2}, {cfg.q_label, 2}}, rng);
  }();
  if (!rho_pq.system().contains(cfg.q_label)) throw InputError("state has no register '" + cfg.q_label + "'");
  auto rho_q = partial_trace(rho_pq, {cfg.q_label});
  DensityOperator sigma = cfg.sigma.empty() ? rho_q : parse_sigma(cfg.sigma, cfg.q_label, rho_q.dim());
  return {rho_pq, sigma};
}

}  // namespace cli_detail

//----------------------------------------------------------------------------
// Commands
//----------------------------------------------------------------------------

inline int cmd_quantity(const RunConfig &cfg, std::ostream &out) {
  using namespace cli_detail;
  auto states = load_inputs(cfg);
  const auto &first = require_input(states, 0, "quantity " + cfg.subcommand);
  auto parts = parse_parts(cfg.parts);
  auto need_parts = [&](std::size_t n) {
    if (parts.size() != n)
      throw InputError("quantity " + cfg.subcommand + " needs --parts with " + std::to_string(n) + " groups");
  };
  const auto &rho = first.density;
  auto second = [&]() -> const DensityOperator & { return require_input(states, 1, "quantity " + cfg.subcommand).density; };
  EntropicValue v;
  const std::string &q = cfg.subcommand;
  if (q == "entropy") {
    v.value = parts.empty() ? von_neumann_entropy(rho) : entropy_of(rho, parts.at(0));
  } else if (q == "rc") {
    v.value = parts.empty() ? relative_entropy_of_coherence(rho) : relative_entropy_of_coherence(rho, parts.at(0));
  } else if (q == "mi") {
    need_parts(2);
    v.value = mutual_information(rho, parts[0], parts[1]);
  } else if (q == "cmi") {
    need_parts(3);
    v.value = conditional_mutual_information(rho, parts[0], parts[1], parts[2]);
  } else if (q == "conditional-entropy") {
    need_parts(2);
    v.value = conditional_entropy(rho, parts[0], parts[1]);
  } else if (q == "relent") {
    v = relative_entropy(rho, second());
  } else if (q == "dmax") {
    v = max_relative_entropy(rho, second());
  } else if (q == "dh") {
    v = hypothesis_testing_relative_entropy(rho, second(), cfg.eps);
  } else if (q == "df") {
    v = restricted_hypothesis_testing(rho, second(), cfg.eps, CollapsingMap::dephasing());
  } else if (q == "variance") {
    v = relative_entropy_variance(rho, second());
  } else if (q == "fidelity") {
    v.value = fidelity(rho, second());
  } else if (q == "purified-distance") {
    v.value = purified_distance(rho, second());
  } else if (q == "trace-distance") {
    v.value = trace_norm_distance(rho, second());
  } else {
    throw InputError("unknown quantity '" + q +
                     "' (entropy, rc, mi, cmi, conditional-entropy, relent, dmax, dh, df, variance, fidelity, "
                     "purified-distance, trace-distance)");
  }
  if (!v.finite && !cfg.allow_inf)
    throw InputError(q + " is infinite (support violation); pass --allow-inf to print it");
  print_record(cfg, {{"quantity", q}, {"value", value_text(v)}}, out);
  return 0;
}

inline int cmd_rates(const RunConfig &cfg, std::ostream &out) {
  using namespace cli_detail;
  DensityOperator rho = [&] {
    if (cfg.random_state) {
      Rng rng(cfg.seed);
      return DensityOperator::from_pure(random_state_vector(RegisterSystem{{"R", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, rng));
    }
    auto states = load_inputs(cfg);
    return require_input(states, 0, "rates").density;
  }();
  auto roles = resolve_roles(cfg, rho.system());
  print_rate_report(cfg, rate_report(rho, roles).in_units(cfg.units), out);
  return 0;
}

inline int cmd_simulate(const RunConfig &cfg, std::ostream &out) {
  using namespace cli_detail;
  const std::string &what = cfg.subcommand;
  if (what == "coherence-creation") {
    auto t = coherence_creation(cfg.q, cfg.e, cfg.budget);
    auto j = to_json(t);
    print_record(cfg,
                 {{"q", std::to_string(cfg.q)},
                  {"e", std::to_string(cfg.e)},
                  {"c", std::to_string(t.counters.coherent_qubits_out)},
                  {"fidelity", format_number(t.achieved_fidelity)},
                  {"qubits_sent", std::to_string(t.counters.qubits_sent)},
                  {"singlets_consumed", std::to_string(t.counters.singlets_consumed)},
                  {"bob_operations_free", t.all_bob_operations_free() ? "true" : "false"}},
                 out, &j);
    return 0;
  }
  if (what == "convex-split") {
    auto states = load_inputs(cfg);
    auto [rho_pq, sigma] = convex_split_inputs(cfg, states);
    auto c = convex_split_bound_check(rho_pq, sigma, cfg.delta, cfg.q_label, false);
    print_record(cfg,
                 {{"k", value_text(c.k)},
                  {"delta", format_number(c.delta)},
                  {"n", std::to_string(c.n)},
                  {"fidelity_sq", format_number(c.fidelity_sq)},
                  {"bound", format_number(c.bound)},
                  {"holds", c.holds ? "true" : "false"}},
                 out);
    if (!c.holds) throw BoundViolation("convex split F^2 below the bound");
    return 0;
  }
  if (what == "qsr") {
    auto states = load_inputs(cfg);
    auto psi = require_pure(require_input(states, 0, "simulate qsr"), "simulate qsr");
    auto t = qsr_full(instance_from(cfg, psi), cfg.budget);
    auto j = to_json(t);
    print_record(cfg,
                 {{"k", format_number(t.value("k"))},
                  {"d_f", format_number(t.value("d_f"))},
                  {"n", format_number(t.value("n"))},
                  {"b", format_number(t.value("b"))},
                  {"cobits", std::to_string(t.counters.cobits_sent)},
                  {"uhlmann_overlap", format_number(t.value("uhlmann_overlap"))},
                  {"purified_distance", format_number(t.value("purified_distance"))},
                  {"distance_bound", format_number(t.value("distance_bound"))}},
                 out, &j);
    return 0;
  }
  throw InputError("unknown protocol '" + what + "' (coherence-creation, convex-split, qsr)");
}

inline int cmd_sweep(const RunConfig &cfg, std::ostream &out) {
  using namespace cli_detail;
  const std::string &what = cfg.subcommand;
  auto states = load_inputs(cfg);
  std::vector<std::vector<std::string>> rows;
  if (what == "copies") {
    auto ks = parse_range(cfg.range);
    auto psi = require_pure(require_input(states, 0, "sweep copies"), "sweep copies");
    auto roles = resolve_roles(cfg, psi.system());
    std::vector<std::string> header{"copies"};
    for (const auto &k : rate_report_keys()) header.push_back(k);
    for (const auto &k : rate_report_keys()) header.push_back("per_copy_" + k);
    for (auto k : ks) {
      auto [big, big_roles] = copies(psi, roles, k);
      require_amplitude_budget(static_cast<double>(big.dim()), cfg.budget, "sweep copies");
      auto rho = rbc_marginal(big, big_roles);
      auto report = rate_report(rho, big_roles).in_units(cfg.units);
      std::vector<std::string> row{std::to_string(k)};
      for (const auto &key : rate_report_keys()) row.push_back(format_number(report.value(key)));
      for (const auto &key : rate_report_keys())
        row.push_back(format_number(report.value(key) / static_cast<double>(k)));
      rows.push_back(std::move(row));
    }
    print_table(cfg, header, rows, out);
    return 0;
  }
  if (what == "delta") {
    auto deltas = parse_values(cfg.values);
    auto [rho_pq, sigma] = convex_split_inputs(cfg, states);
    bool violated = false;
    for (double d : deltas) {
      auto c = convex_split_bound_check(rho_pq, sigma, d, cfg.q_label, false);
      violated = violated || !c.holds;
      rows.push_back({format_number(d), value_text(c.k), std::to_string(c.n), format_number(c.fidelity_sq),
                      format_number(c.bound)});
    }
    print_table(cfg, {"delta", "k", "n", "fidelity_sq", "bound"}, rows, out);
    if (violated) throw BoundViolation("convex split F^2 below the bound");
    return 0;
  }
  if (what == "eps") {
    auto eps = parse_values(cfg.values);
    auto psi = require_pure(require_input(states, 0, "sweep eps"), "sweep eps");
    for (double e2 : eps) {
      RunConfig c = cfg;
      c.eps2 = e2;
      auto b = one_shot_achievability_bound(instance_from(c, psi));
      rows.push_back({format_number(e2), value_text(b.d_f), format_number(b.value)});
    }
    print_table(cfg, {"eps2", "d_f", "bound"}, rows, out);
    return 0;
  }
  if (what == "b") {
    auto bs = parse_range(cfg.range);
    auto psi = require_pure(require_input(states, 0, "sweep b"), "sweep b");
    for (auto b : bs) {
      RunConfig c = cfg;
      c.b_override = b;
      auto t = qsr_full(instance_from(c, psi), cfg.budget);
      rows.push_back({std::to_string(b), format_number(t.value("n")), std::to_string(t.counters.cobits_sent),
                      format_number(t.value("purified_distance"))});
    }
    print_table(cfg, {"b", "n", "cobits", "purified_distance"}, rows, out);
    return 0;
  }
  throw InputError("unknown sweep '" + what + "' (copies, delta, eps, b)");
}

// Quick end-to-end checks of the core modules.
inline int cmd_selftest(const RunConfig &cfg, std::ostream &out) {
  Rng rng(cfg.seed);
  std::vector<std::pair<std::string, std::function<bool()>>> checks{
      {"coherence-creation", [] { return coherence_creation(2, 1).counters.coherent_qubits_out == 3; }},
      {"three-form-rate",
       [&] {
         auto psi = random_state_vector(RegisterSystem{{"R", 2}, {"A", 2}, {"B", 2}, {"C", 2}}, rng);
         return incoherent_rate_forms(DensityOperator::from_pure(psi)).max_disagreement() <= 1e-9;
       }},
      {"hypothesis-test-routes",
       [&] {
         auto [rho, sigma] = random_commuting_pair(RegisterSystem{{"X", 3}}, rng);
         auto a = hypothesis_test(rho, sigma, 0.1, TestRoute::commuting).value.value;
         auto b = hypothesis_test(rho, sigma, 0.1, TestRoute::bisection).value.value;
         return std::abs(a - b) <= 1e-6;
       }},
      {"uhlmann",
       [&] {
         RegisterSystem ab{{"X", 2}, {"B", 3}}, ac{{"X", 2}, {"C", 2}};
         auto p = random_state_vector(ab, rng), s = random_state_vector(ac, rng);
         auto u = uhlmann_isometry(p, s, {"X"});
         return std::abs(u.overlap - fidelity(partial_trace(p, {"X"}), partial_trace(s, {"X"}))) <= 1e-8;
       }},
      {"convex-split",
       [&] {
         auto rho = random_density(RegisterSystem{{"P", 2}, {"Q", 2}}, rng);
         return convex_split_bound_check(rho, partial_trace(rho, {"Q"}), 0.25, "Q", false).holds;
       }},
  };
  bool ok = true;
  for (auto &[name, fn] : checks) {
    bool pass = fn();
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << name << "\n";
  }
  return ok ? 0 : 4;
}

//----------------------------------------------------------------------------
// Entry point
//----------------------------------------------------------------------------

inline int dispatch(const RunConfig &cfg, std::ostream &out) {
  if (cfg.command == "quantity") return cmd_quantity(cfg, out);
  if (cfg.command == "rates") return cmd_rates(cfg, out);
  if (cfg.command == "simulate") return cmd_simulate(cfg, out);
  if (cfg.command == "sweep") return cmd_sweep(cfg, out);
  if (cfg.command == "selftest") return cmd_selftest(cfg, out);
  throw InputError("unknown command '" + cfg.command + "'");
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  std::string format = "pretty", units = "qubits";
  std::size_t n_override = 0, b_override = 0;

  CLI::App app{"Quantum state redistribution with local coherence: quantities, rates and protocol simulations",
               "qsrlc"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "Seed for random instances")->default_val(1);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "pretty"}));
  app.add_option("--out", cfg.out_path, "Write output to this file");
  app.add_option("--units", units, "Units of qubit-rate columns")->check(CLI::IsMember({"qubits", "cobits"}));
  app.add_option("--budget", cfg.budget, "Amplitude budget for simulations")->check(CLI::PositiveNumber);
  app.add_flag("--allow-inf", cfg.allow_inf, "Print infinite quantities instead of failing");

  auto *quantity = app.add_subcommand("quantity", "Compute an entropic quantity of state file(s)");
  quantity->add_option("name", cfg.subcommand, "entropy, rc, mi, cmi, conditional-entropy, relent, dmax, dh, df, "
                                               "variance, fidelity, purified-distance, trace-distance")
      ->required();
  quantity->add_option("states", cfg.inputs, "State files")->required();
  quantity->add_option("--parts", cfg.parts, "Comma-separated label groups; join labels in a group with '+'");
  quantity->add_option("--eps", cfg.eps, "Type-I error for dh and df")->check(CLI::Range(0.0, 1.0));

  auto *rates = app.add_subcommand("rates", "Rate report for a pure state on R, A, B, C");
  rates->add_option("state", cfg.inputs, "State file");
  rates->add_flag("--random", cfg.random_state, "Use a seeded random 4-qubit state");
  rates->add_option("--reference", cfg.reference, "Reference registers (joined with '+')");
  rates->add_option("--alice-side", cfg.alice_side, "Alice's side-information registers");
  rates->add_option("--bob-side", cfg.bob_side, "Bob's side-information registers");
  rates->add_option("--system", cfg.system, "Registers to be transferred");

  auto *simulate = app.add_subcommand("simulate", "Run a protocol simulation");
  simulate->require_subcommand(1);
  auto *cc = simulate->add_subcommand("coherence-creation", "Coherent qubits from qubit channel uses and singlets");
  cc->add_option("--q", cfg.q, "Qubit channel uses")->required();
  cc->add_option("--e", cfg.e, "Shared singlets")->required();
  auto add_convex_split_options = [&](CLI::App *sub) {
    sub->add_option("state", cfg.inputs, "State file on P.. and Q (default: seeded random two-qubit state)");
    sub->add_option("--q-label", cfg.q_label, "Register that is split");
    sub->add_option("--sigma", cfg.sigma, "Diagonal of sigma_Q (default: rho_Q)");
  };
  auto *cs = simulate->add_subcommand("convex-split", "Convex-split fidelity against its bound");
  add_convex_split_options(cs);
  cs->add_option("--delta", cfg.delta, "delta in (0,1)");
  auto add_qsr_options = [&](CLI::App *sub) {
    sub->add_option("state", cfg.inputs, "Pure state file on R, A, B, C")->required();
    sub->add_option("--eps1", cfg.eps1, "Convex-split accuracy");
    sub->add_option("--eps2", cfg.eps2, "Hypothesis-test accuracy");
    sub->add_option("--gamma", cfg.gamma, "Decoder slack");
    sub->add_option("--sigma", cfg.sigma, "Diagonal of sigma_C (default: dephased rho_C)");
    sub->add_option("--n-override", n_override, "Number of convex-split copies")->check(CLI::PositiveNumber);
  };
  auto *qsr = simulate->add_subcommand("qsr", "One-shot state redistribution");
  add_qsr_options(qsr);
  qsr->add_option("--b-override", b_override, "Decoder block size")->check(CLI::PositiveNumber);

  auto *sweep = app.add_subcommand("sweep", "Parameter sweeps as tables");
  sweep->require_subcommand(1);
  auto *sc = sweep->add_subcommand("copies", "Rates of k product copies");
  sc->add_option("state", cfg.inputs, "Pure state file")->required();
  sc->add_option("--n", cfg.range, "Copy range LO:HI")->required();
  auto *sd = sweep->add_subcommand("delta", "Convex-split fidelity versus delta");
  add_convex_split_options(sd);
  sd->add_option("--values", cfg.values, "Comma-separated deltas")->required();
  auto *se = sweep->add_subcommand("eps", "One-shot bound versus eps2");
  add_qsr_options(se);
  se->add_option("--values", cfg.values, "Comma-separated eps2 values")->required();
  auto *sb = sweep->add_subcommand("b", "State redistribution versus decoder block size");
  add_qsr_options(sb);
  sb->add_option("--range", cfg.range, "Block sizes LO:HI")->required();

  app.add_subcommand("selftest", "Quick end-to-end checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  for (auto *sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    for (auto *inner : sub->get_subcommands()) cfg.subcommand = inner->get_name();
  }
  cfg.format = format == "json" ? OutputFormat::json : format == "csv" ? OutputFormat::csv : OutputFormat::pretty;
  cfg.units = parse_rate_unit(units);
  if (n_override) cfg.n_override = n_override;
  if (b_override) cfg.b_override = b_override;

  try {
    if (cfg.out_path.empty()) return dispatch(cfg, out);
    std::ostringstream buffer;
    int code = dispatch(cfg, buffer);
    std::ofstream file(cfg.out_path);
    if (!file) throw InputError("cannot write '" + cfg.out_path + "'");
    file << buffer.str();
    return code;
  } catch (const InputError &e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError &e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const BoundViolation &e) {
    err << "bound violated: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace qsrlc
