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

// Resource theory of coherence: incoherent Kraus sets, free tests, Neumark
// dilations of measurements, and the abstract ResourceTheory record that the
// rate layer dispatches on. The incoherent basis is the computational basis of
// every register.

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qsrlc/collapsing.hpp"
#include "qsrlc/entropy.hpp"
#include "qsrlc/qmat.hpp"

namespace qsrlc {

inline constexpr double kIncoherenceTolerance = 1e-10;

struct IncoherenceWitness {
  bool incoherent = true;
  // First offending Kraus operator and column when not incoherent.
  std::size_t kraus_index = 0;
  std::size_t column = 0;
};

// True iff every column of every Kraus operator has at most one entry above
// the tolerance, i.e. each K_i maps basis states to scaled basis states.
inline IncoherenceWitness incoherence_witness(const std::vector<Matrix> &kraus,
                                              double tolerance = kIncoherenceTolerance) {
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    const auto &k = kraus[i];
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      int nonzero = 0;
      for (Eigen::Index r = 0; r < k.rows(); ++r)
        if (std::abs(k(r, c)) > tolerance) ++nonzero;
      if (nonzero > 1) return {false, i, static_cast<std::size_t>(c)};
    }
  }
  return {};
}

inline IncoherenceWitness is_incoherent_channel(const KrausChannel &ch) { return incoherence_witness(ch.kraus()); }

// A Kraus channel certified incoherent at construction.
class IncoherentKrausSet {
 public:
  explicit IncoherentKrausSet(KrausChannel channel) : channel_(std::move(channel)) {
    auto w = is_incoherent_channel(channel_);
    if (!w.incoherent)
      throw InputError("Kraus operator " + std::to_string(w.kraus_index) + " creates coherence in column " +
                       std::to_string(w.column));
  }

  const KrausChannel &channel() const { return channel_; }
  const std::vector<Matrix> &kraus() const { return channel_.kraus(); }
  DensityOperator operator()(const DensityOperator &rho) const { return apply_channel(channel_, rho); }

 private:
  KrausChannel channel_;
};

// Controlled-Z on two qubits. Maps (|0+> + |1->)/sqrt2 to |++>; diagonal, so
// incoherent.
inline Matrix controlled_z() {
  Matrix cz = Matrix::Identity(4, 4);
  cz(3, 3) = -1;
  return cz;
}

inline Matrix hadamard() {
  Matrix h(2, 2);
  const double s = 1 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

// |+>^{(x) n} on registers named prefix1..prefixn.
inline StateVector plus_state_vector(std::size_t num_qubits, const std::string &prefix = "Q") {
  std::vector<Register> regs;
  for (std::size_t i = 0; i < num_qubits; ++i) regs.push_back({prefix + std::to_string(i + 1), 2});
  RegisterSystem sys(std::move(regs));
  const auto d = static_cast<Eigen::Index>(sys.dim());
  return StateVector(sys, Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))));
}

inline DensityOperator maximally_coherent_state(std::size_t num_qubits, const std::string &prefix = "Q") {
  return DensityOperator::from_pure(plus_state_vector(num_qubits, prefix));
}

inline bool is_free_state(const DensityOperator &rho, double tolerance = tol::herm) {
  return is_diagonal(rho.matrix(), tolerance);
}

// F_E membership for coherence: diagonal operators with 0 <= O <= I.
inline bool is_free_measurement_operator(const Matrix &o, double tolerance = tol::herm) {
  if (o.rows() != o.cols() || !is_diagonal(o, tolerance)) return false;
  for (Eigen::Index i = 0; i < o.rows(); ++i) {
    Complex x = o(i, i);
    if (std::abs(x.imag()) > tolerance || x.real() < -tolerance || x.real() > 1 + tolerance) return false;
  }
  return true;
}

// Flagging channel of a measurement operator O: rho -> O rho O^dagger (x) |0><0|
// + sqrt(I - O^dagger O) rho sqrt(...) (x) |1><1|, output on sys (x) flag.
inline KrausChannel measurement_flag_channel(const RegisterSystem &sys, const Matrix &o,
                                             const std::string &flag_label = "F") {
  const auto d = static_cast<Eigen::Index>(sys.dim());
  if (o.rows() != d || o.cols() != d) throw InputError("measurement operator shape mismatch");
  Matrix rest = detail::psd_sqrt(Matrix::Identity(d, d) - o.adjoint() * o);
  Matrix k0 = Matrix::Zero(2 * d, d), k1 = Matrix::Zero(2 * d, d);
  for (Eigen::Index s = 0; s < d; ++s) {
    k0.row(2 * s) = o.row(s);
    k1.row(2 * s + 1) = rest.row(s);
  }
  return KrausChannel(sys, sys.concat(RegisterSystem{{flag_label, 2}}), {k0, k1});
}

struct NeumarkDilation {
  Matrix unitary;            // on system (x) pointer
  RegisterSystem system;     // system registers followed by the pointer
  std::string pointer_label;
  std::size_t outcomes = 0;

  // Unnormalized branch i: (I (x) <i|) U (|psi> (x) |0>).
  Vector branch(const Vector &psi, std::size_t i) const {
    const auto m = static_cast<Eigen::Index>(outcomes);
    const auto d = psi.size();
    Vector in = Vector::Zero(d * m);
    for (Eigen::Index s = 0; s < d; ++s) in[s * m] = psi[s];
    Vector out = unitary * in;
    Vector b(d);
    for (Eigen::Index s = 0; s < d; ++s) b[s] = out[s * m + static_cast<Eigen::Index>(i)];
    return b;
  }
};

// U with U(|psi>|0>_P) = sum_i A_i|psi> |i>_P. The isometry columns sit on the
// pointer-zero inputs; the other columns complete it to a unitary.
inline NeumarkDilation neumark_dilation(const Povm &povm, const std::string &pointer_label = "P") {
  const auto d = static_cast<Eigen::Index>(povm.system().dim());
  const auto m = static_cast<Eigen::Index>(povm.size());
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(d * m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto &a = povm.operators()[static_cast<std::size_t>(i)];
    for (Eigen::Index s = 0; s < d; ++s) w.row(s * m + i) = a.row(s);
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(w);
  Eigen::MatrixXcd q = qr.householderQ();
  // First d columns of q span range(w); the rest are its complement.
  Matrix u(d * m, d * m);
  Eigen::Index extra = d;
  for (Eigen::Index c = 0; c < d * m; ++c) {
    if (c % m == 0)
      u.col(c) = w.col(c / m);
    else
      u.col(c) = q.col(extra++);
  }
  if ((u.adjoint() * u - Matrix::Identity(d * m, d * m)).cwiseAbs().maxCoeff() > tol::recon)
    throw BoundViolation("Neumark completion is not unitary");
  return {std::move(u), povm.system().concat(RegisterSystem{{pointer_label, static_cast<std::size_t>(m)}}),
          pointer_label, static_cast<std::size_t>(m)};
}

// Free states, free operations and free measurement operators of a resource
// theory, with an optional collapsing map.
struct ResourceTheory {
  std::string name;
  std::function<bool(const DensityOperator &)> free_state_test;
  std::function<bool(const KrausChannel &)> free_op_test;
  std::function<bool(const Matrix &)> free_measurement_test;
  std::optional<CollapsingMap> collapsing;
  // min_{sigma free} || log sigma ||_inf-type constant of the converse, as a
  // function of the register dimension.
  std::function<double(std::size_t)> converse_constant;
  // Candidate free states on a register of the given dimension, used for
  // single-letter minimizations when no closed form is known.
  std::function<std::vector<DensityOperator>(const RegisterSystem &)> free_state_family;
};

inline ResourceTheory coherence_theory() {
  ResourceTheory t;
  t.name = "coherence";
  t.free_state_test = [](const DensityOperator &rho) { return is_free_state(rho); };
  t.free_op_test = [](const KrausChannel &ch) { return is_incoherent_channel(ch).incoherent; };
  t.free_measurement_test = [](const Matrix &o) { return is_free_measurement_operator(o); };
  t.collapsing = CollapsingMap::dephasing();
  t.converse_constant = [](std::size_t d) { return std::log2(static_cast<double>(d)); };
  t.free_state_family = [](const RegisterSystem &sys) {
    return std::vector<DensityOperator>{DensityOperator::maximally_mixed(sys)};
  };
  return t;
}

inline ResourceTheory resource_theory_by_name(const std::string &name) {
  if (name == "coherence") return coherence_theory();
  throw InputError("unknown resource theory '" + name + "' (available: coherence)");
}

}  // namespace qsrlc
