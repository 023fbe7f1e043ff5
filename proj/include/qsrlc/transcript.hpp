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

// Step-by-step record of a protocol run.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsrlc/qmat.hpp"

namespace qsrlc {

struct ResourceCounters {
  std::size_t qubits_sent = 0;
  std::size_t cobits_sent = 0;
  std::size_t singlets_consumed = 0;
  std::size_t coherent_qubits_out = 0;
};

struct TranscriptStep {
  std::string actor;  // alice, bob, referee or setup
  std::string description;
  std::map<std::string, double> values;
  std::optional<DensityOperator> snapshot;
};

struct OperationCertificate {
  std::string actor;
  std::string operation;
  bool free = false;
  std::string detail;
};

struct ProtocolTranscript {
  std::string protocol;
  std::vector<TranscriptStep> steps;
  ResourceCounters counters;
  double achieved_fidelity = 0;
  std::map<std::string, double> values;
  std::vector<OperationCertificate> certificates;
  std::vector<std::string> notes;

  TranscriptStep &add_step(std::string actor, std::string description) {
    steps.push_back({std::move(actor), std::move(description), {}, std::nullopt});
    return steps.back();
  }

  void certify(std::string actor, std::string operation, bool free, std::string detail = {}) {
    certificates.push_back({std::move(actor), std::move(operation), free, std::move(detail)});
  }

  bool all_bob_operations_free() const {
    for (const auto &c : certificates)
      if (c.actor == "bob" && !c.free) return false;
    return true;
  }

  double value(const std::string &key) const {
    auto it = values.find(key);
    if (it == values.end()) throw InputError("transcript has no value '" + key + "'");
    return it->second;
  }
};

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix &m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json system_to_json(const RegisterSystem &sys) {
  auto regs = nlohmann::json::array();
  for (const auto &r : sys.registers()) regs.push_back({{"label", r.label}, {"dim", r.dim}});
  return regs;
}

}  // namespace detail

inline nlohmann::json to_json(const ProtocolTranscript &t, bool embed_snapshots = false) {
  nlohmann::json j;
  j["protocol"] = t.protocol;
  j["counters"] = {{"qubits_sent", t.counters.qubits_sent},
                   {"cobits_sent", t.counters.cobits_sent},
                   {"singlets_consumed", t.counters.singlets_consumed},
                   {"coherent_qubits_out", t.counters.coherent_qubits_out}};
  j["achieved_fidelity"] = t.achieved_fidelity;
  j["values"] = t.values;
  auto steps = nlohmann::json::array();
  for (const auto &s : t.steps) {
    nlohmann::json js{{"actor", s.actor}, {"description", s.description}, {"values", s.values}};
    if (embed_snapshots && s.snapshot)
      js["snapshot"] = {{"registers", detail::system_to_json(s.snapshot->system())},
                        {"matrix", detail::matrix_to_json(s.snapshot->matrix())}};
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  auto certs = nlohmann::json::array();
  for (const auto &c : t.certificates)
    certs.push_back({{"actor", c.actor}, {"operation", c.operation}, {"free", c.free}, {"detail", c.detail}});
  j["certificates"] = std::move(certs);
  j["notes"] = t.notes;
  return j;
}

}  // namespace qsrlc
