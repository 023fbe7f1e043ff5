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

// State files:
//   {"registers":[{"label":"R","dim":2},...], "matrix":[[[re,im],...],...]}
//   {"registers":[...], "amplitudes":[[re,im],...]}
// A bare number is accepted in place of [re, 0].

#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qsrlc/qmat.hpp"
#include "qsrlc/transcript.hpp"

namespace qsrlc {

struct LoadedState {
  DensityOperator density;
  std::optional<StateVector> pure;  // set when the file held amplitudes
};

namespace detail {

inline Complex complex_from_json(const nlohmann::json &j, const std::string &where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError(where + ": expected a number or [re, im], got " + j.dump());
}

inline RegisterSystem system_from_json(const nlohmann::json &j) {
  if (!j.contains("registers") || !j["registers"].is_array())
    throw InputError("state file needs a \"registers\" array");
  std::vector<Register> regs;
  for (std::size_t i = 0; i < j["registers"].size(); ++i) {
    const auto &r = j["registers"][i];
    if (!r.is_object() || !r.contains("label") || !r.contains("dim") || !r["label"].is_string() ||
        !r["dim"].is_number_integer() || r["dim"].get<long long>() < 1)
      throw InputError("register " + std::to_string(i) + " needs a string \"label\" and a positive integer \"dim\"");
    regs.push_back({r["label"].get<std::string>(), r["dim"].get<std::size_t>()});
  }
  if (regs.empty()) throw InputError("state file lists no registers");
  return RegisterSystem(std::move(regs));
}

}  // namespace detail

inline LoadedState state_from_json(const nlohmann::json &j) {
  if (!j.is_object()) throw InputError("state file must hold a JSON object");
  auto sys = detail::system_from_json(j);
  const auto d = static_cast<Eigen::Index>(sys.dim());
  if (j.contains("amplitudes") == j.contains("matrix"))
    throw InputError("state file needs exactly one of \"amplitudes\" or \"matrix\"");
  if (j.contains("amplitudes")) {
    const auto &a = j["amplitudes"];
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != d)
      throw InputError("\"amplitudes\" must have " + std::to_string(d) + " entries");
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i)
      v[i] = detail::complex_from_json(a[static_cast<std::size_t>(i)], "amplitudes[" + std::to_string(i) + "]");
    StateVector psi(sys, v);
    return {DensityOperator::from_pure(psi), psi};
  }
  const auto &m = j["matrix"];
  if (!m.is_array() || static_cast<Eigen::Index>(m.size()) != d)
    throw InputError("\"matrix\" must have " + std::to_string(d) + " rows");
  Matrix rho(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto &row = m[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d)
      throw InputError("matrix row " + std::to_string(r) + " must have " + std::to_string(d) + " entries");
    for (Eigen::Index c = 0; c < d; ++c)
      rho(r, c) = detail::complex_from_json(row[static_cast<std::size_t>(c)],
                                            "matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return {DensityOperator(sys, rho), std::nullopt};
}

inline LoadedState parse_state(const std::string &text, const std::string &source = "<input>") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InputError(source + ": malformed JSON: " + e.what());
  }
  try {
    return state_from_json(j);
  } catch (const InputError &e) {
    throw InputError(source + ": " + e.what());
  }
}

inline LoadedState load_state(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open state file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_state(ss.str(), path);
}

inline nlohmann::json to_json(const StateVector &psi) {
  nlohmann::json j;
  j["registers"] = detail::system_to_json(psi.system());
  auto a = nlohmann::json::array();
  for (const auto &x : psi.amplitudes()) a.push_back({x.real(), x.imag()});
  j["amplitudes"] = std::move(a);
  return j;
}

inline nlohmann::json to_json(const DensityOperator &rho) {
  nlohmann::json j;
  j["registers"] = detail::system_to_json(rho.system());
  j["matrix"] = detail::matrix_to_json(rho.matrix());
  return j;
}

}  // namespace qsrlc
