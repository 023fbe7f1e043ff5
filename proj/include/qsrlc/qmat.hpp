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

// Dense complex linear algebra over labeled multi-register Hilbert spaces.
//
// A RegisterSystem is an ordered list of named tensor factors. The ordering is
// the canonical (row-major) tensor order: the last register varies fastest in
// the flat index. Every label-set operation below works by index arithmetic on
// that ordering; no permutation matrix larger than the state is ever formed.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qsrlc/errors.hpp"

namespace qsrlc {

using Complex = std::complex<double>;
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using LabelSet = std::vector<std::string>;

namespace tol {
inline constexpr double norm = 1e-9;
inline constexpr double herm = 1e-9;
inline constexpr double psd = 1e-9;
inline constexpr double recon = 1e-8;
// Eigenvalues at or below this are treated as exact zeros (rank, supports,
// entropy sums).
inline constexpr double rank = 1e-12;
// 1 - F^2 at or below this is rounding noise and gives purified distance 0.
inline constexpr double infidelity = 1e-13;
}  // namespace tol

//============================================================================
// Registers
//============================================================================

struct Register {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Register &) const = default;
};

class RegisterSystem {
 public:
  RegisterSystem() = default;

  RegisterSystem(std::vector<Register> registers) : registers_(std::move(registers)) {
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      if (registers_[i].label.empty()) throw InputError("register label must be non-empty");
      if (registers_[i].dim == 0)
        throw InputError("register '" + registers_[i].label + "' has dimension 0");
      for (std::size_t j = 0; j < i; ++j)
        if (registers_[j].label == registers_[i].label)
          throw InputError("duplicate register label '" + registers_[i].label + "'");
    }
  }

  RegisterSystem(std::initializer_list<Register> registers)
      : RegisterSystem(std::vector<Register>(registers)) {}

  const std::vector<Register> &registers() const { return registers_; }
  std::size_t size() const { return registers_.size(); }
  const Register &operator[](std::size_t i) const { return registers_[i]; }

  std::size_t dim() const {
    std::size_t d = 1;
    for (const auto &r : registers_) d *= r.dim;
    return d;
  }

  LabelSet labels() const {
    LabelSet out;
    out.reserve(registers_.size());
    for (const auto &r : registers_) out.push_back(r.label);
    return out;
  }

  bool contains(const std::string &label) const {
    return std::any_of(registers_.begin(), registers_.end(),
                       [&](const Register &r) { return r.label == label; });
  }

  std::size_t position(const std::string &label) const {
    for (std::size_t i = 0; i < registers_.size(); ++i)
      if (registers_[i].label == label) return i;
    throw InputError("unknown register label '" + label + "'");
  }

  std::size_t dim_of(const std::string &label) const { return registers_[position(label)].dim; }

  std::size_t dim_of(const LabelSet &labels) const {
    std::size_t d = 1;
    for (const auto &l : labels) d *= dim_of(l);
    return d;
  }

  // Positions of `labels`, validated and free of duplicates, in the order given.
  std::vector<std::size_t> positions(const LabelSet &labels) const {
    std::vector<std::size_t> pos;
    pos.reserve(labels.size());
    for (const auto &l : labels) {
      std::size_t p = position(l);
      if (std::find(pos.begin(), pos.end(), p) != pos.end())
        throw InputError("label '" + l + "' listed twice");
      pos.push_back(p);
    }
    return pos;
  }

  // Subsystem made of `labels`, kept in this system's canonical order.
  RegisterSystem select(const LabelSet &labels) const {
    auto pos = positions(labels);
    std::sort(pos.begin(), pos.end());
    std::vector<Register> regs;
    for (auto p : pos) regs.push_back(registers_[p]);
    return RegisterSystem(std::move(regs));
  }

  // Subsystem made of `labels` in the order given.
  RegisterSystem ordered(const LabelSet &labels) const {
    std::vector<Register> regs;
    for (auto p : positions(labels)) regs.push_back(registers_[p]);
    return RegisterSystem(std::move(regs));
  }

  LabelSet complement(const LabelSet &labels) const {
    auto pos = positions(labels);
    LabelSet out;
    for (std::size_t i = 0; i < registers_.size(); ++i)
      if (std::find(pos.begin(), pos.end(), i) == pos.end()) out.push_back(registers_[i].label);
    return out;
  }

  RegisterSystem concat(const RegisterSystem &other) const {
    std::vector<Register> regs = registers_;
    regs.insert(regs.end(), other.registers_.begin(), other.registers_.end());
    return RegisterSystem(std::move(regs));
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      if (i) s += ",";
      s += registers_[i].label + ":" + std::to_string(registers_[i].dim);
    }
    return s + "]";
  }

  bool operator==(const RegisterSystem &) const = default;

 private:
  std::vector<Register> registers_;
};

namespace detail {

// Flat-index table for a split of `sys` into `targets` (in the order given)
// and the remaining registers (in canonical order):
// table[t * rest_dim + r] is the full index with target digits t, rest digits r.
struct IndexSplit {
  std::size_t target_dim = 1;
  std::size_t rest_dim = 1;
  std::vector<std::size_t> table;

  std::size_t operator()(std::size_t t, std::size_t r) const { return table[t * rest_dim + r]; }
};

inline std::vector<std::size_t> offsets(const RegisterSystem &sys,
                                        const std::vector<std::size_t> &stride,
                                        const std::vector<std::size_t> &pos) {
  std::size_t d = 1;
  for (auto p : pos) d *= sys[p].dim;
  std::vector<std::size_t> out(d, 0);
  for (std::size_t idx = 0; idx < d; ++idx) {
    std::size_t rem = idx, off = 0;
    for (std::size_t k = pos.size(); k-- > 0;) {
      std::size_t dk = sys[pos[k]].dim;
      off += (rem % dk) * stride[pos[k]];
      rem /= dk;
    }
    out[idx] = off;
  }
  return out;
}

inline IndexSplit split_index(const RegisterSystem &sys, const LabelSet &targets) {
  auto tpos = sys.positions(targets);
  std::vector<std::size_t> rpos;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (std::find(tpos.begin(), tpos.end(), i) == tpos.end()) rpos.push_back(i);

  std::vector<std::size_t> stride(sys.size(), 1);
  for (std::size_t i = sys.size(); i-- > 1;) stride[i - 1] = stride[i] * sys[i].dim;

  auto toff = offsets(sys, stride, tpos);
  auto roff = offsets(sys, stride, rpos);
  IndexSplit s;
  s.target_dim = toff.size();
  s.rest_dim = roff.size();
  s.table.resize(s.target_dim * s.rest_dim);
  for (std::size_t t = 0; t < s.target_dim; ++t)
    for (std::size_t r = 0; r < s.rest_dim; ++r) s.table[t * s.rest_dim + r] = toff[t] + roff[r];
  return s;
}

struct Eigensystem {
  RealVector values;      // ascending
  Eigen::MatrixXcd vectors;  // columns
};

inline Eigensystem hermitian_eig(const Matrix &m) {
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

inline RealVector hermitian_eigenvalues(const Matrix &m) {
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

template <typename F>
Matrix hermitian_apply(const Eigensystem &es, F &&f) {
  Eigen::VectorXcd fv(es.values.size());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) fv[i] = f(es.values[i]);
  return es.vectors * fv.asDiagonal() * es.vectors.adjoint();
}

// Square root of a PSD matrix; eigenvalues in (-tol::psd, 0) are clamped.
inline Matrix psd_sqrt(const Matrix &m) {
  auto es = hermitian_eig(m);
  return hermitian_apply(es, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector &a, const Vector &b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

inline double hermiticity_defect(const Matrix &m) {
  return m.rows() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Hermitian inputs go through the eigensolver. Otherwise JacobiSVD: Eigen
// 3.4's BDCSVD misplaces clustered singular values of complex matrices, so it
// is used only above the size where Jacobi becomes too slow.
inline double trace_norm(const Matrix &m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && hermiticity_defect(m) <= 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    return hermitian_eigenvalues(m).cwiseAbs().sum();
  Eigen::MatrixXcd d = m;
  if (std::max(d.rows(), d.cols()) <= 256) return Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues().sum();
  return Eigen::BDCSVD<Eigen::MatrixXcd>(d).singularValues().sum();
}

}  // namespace detail

//============================================================================
// States
//============================================================================

class StateVector {
 public:
  StateVector(RegisterSystem system, Vector amplitudes)
      : system_(std::move(system)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != system_.dim())
      throw InputError("amplitude vector length " + std::to_string(amplitudes_.size()) +
                       " does not match system dimension " + std::to_string(system_.dim()));
    if (std::abs(amplitudes_.norm() - 1.0) > tol::norm)
      throw InputError("state vector is not normalized (norm " +
                       std::to_string(amplitudes_.norm()) + ")");
  }

  // |index> in the computational basis of `system`.
  static StateVector basis(const RegisterSystem &system, std::size_t index) {
    Vector v = Vector::Zero(system.dim());
    v[index] = 1.0;
    return StateVector(system, std::move(v));
  }

  // Normalizes `v` before constructing.
  static StateVector normalized(const RegisterSystem &system, Vector v) {
    double n = v.norm();
    if (n == 0.0) throw InputError("cannot normalize a zero vector");
    return StateVector(system, v / n);
  }

  const RegisterSystem &system() const { return system_; }
  const Vector &amplitudes() const { return amplitudes_; }
  std::size_t dim() const { return system_.dim(); }

 private:
  RegisterSystem system_;
  Vector amplitudes_;
};

class DensityOperator {
 public:
  // Validated construction. `subnormalized` admits 0 <= trace <= 1.
  DensityOperator(RegisterSystem system, Matrix matrix, bool subnormalized = false)
      : system_(std::move(system)), matrix_(std::move(matrix)), subnormalized_(subnormalized) {
    const auto d = static_cast<Eigen::Index>(system_.dim());
    if (matrix_.rows() != d || matrix_.cols() != d)
      throw InputError("matrix shape does not match system dimension " + std::to_string(d));
    if (detail::hermiticity_defect(matrix_) > tol::herm)
      throw InputError("density operator is not Hermitian");
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
    double tr = matrix_.trace().real();
    if (subnormalized_) {
      if (tr > 1.0 + tol::norm || tr < -tol::norm) throw InputError("subnormalized trace out of [0,1]");
    } else if (std::abs(tr - 1.0) > tol::norm) {
      throw InputError("density operator trace is " + std::to_string(tr) + ", expected 1");
    }
    if (d > 0 && detail::hermitian_eigenvalues(matrix_)[0] < -tol::psd)
      throw InputError("density operator has a negative eigenvalue");
  }

  // Skips validation; only for results that are PSD by construction.
  static DensityOperator trusted(RegisterSystem system, Matrix matrix, bool subnormalized = false) {
    return DensityOperator(std::move(system), std::move(matrix), subnormalized, Trusted{});
  }

  static DensityOperator from_pure(const StateVector &psi) {
    const auto &a = psi.amplitudes();
    return trusted(psi.system(), a * a.adjoint());
  }

  static DensityOperator maximally_mixed(const RegisterSystem &system) {
    auto d = static_cast<Eigen::Index>(system.dim());
    return trusted(system, Matrix::Identity(d, d) / static_cast<double>(d));
  }

  static DensityOperator basis(const RegisterSystem &system, std::size_t index) {
    return from_pure(StateVector::basis(system, index));
  }

  static DensityOperator diagonal(const RegisterSystem &system, const std::vector<double> &probs) {
    if (probs.size() != system.dim()) throw InputError("diagonal length does not match system");
    Matrix m = Matrix::Zero(probs.size(), probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) m(i, i) = probs[i];
    return DensityOperator(system, std::move(m));
  }

  const RegisterSystem &system() const { return system_; }
  const Matrix &matrix() const { return matrix_; }
  std::size_t dim() const { return system_.dim(); }
  bool subnormalized() const { return subnormalized_; }
  double trace() const { return matrix_.trace().real(); }

  RealVector eigenvalues() const { return detail::hermitian_eigenvalues(matrix_); }

  // Same matrix, relabeled system of identical shape.
  DensityOperator relabeled(const RegisterSystem &system) const {
    if (system.size() != system_.size()) throw InputError("relabel: register count mismatch");
    for (std::size_t i = 0; i < system.size(); ++i)
      if (system[i].dim != system_[i].dim) throw InputError("relabel: dimension mismatch");
    return trusted(system, matrix_, subnormalized_);
  }

 private:
  struct Trusted {};
  DensityOperator(RegisterSystem system, Matrix matrix, bool subnormalized, Trusted)
      : system_(std::move(system)), matrix_(std::move(matrix)), subnormalized_(subnormalized) {
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
  }

  RegisterSystem system_;
  Matrix matrix_;
  bool subnormalized_ = false;
};

//============================================================================
// Maps
//============================================================================

class Isometry {
 public:
  // V^dagger V = I on the input space. (The square-only reading V V^dagger = I
  // is not imposed; Uhlmann extraction needs out_dim > in_dim.)
  Isometry(RegisterSystem in_system, RegisterSystem out_system, Matrix matrix)
      : in_(std::move(in_system)), out_(std::move(out_system)), matrix_(std::move(matrix)) {
    const auto di = static_cast<Eigen::Index>(in_.dim()), dout = static_cast<Eigen::Index>(out_.dim());
    if (matrix_.rows() != dout || matrix_.cols() != di) throw InputError("isometry shape mismatch");
    if (dout < di) throw InputError("isometry output dimension smaller than input");
    Matrix g = matrix_.adjoint() * matrix_;
    if ((g - Matrix::Identity(di, di)).cwiseAbs().maxCoeff() > tol::herm)
      throw InputError("matrix is not an isometry (V^dagger V != I)");
  }

  const RegisterSystem &in_system() const { return in_; }
  const RegisterSystem &out_system() const { return out_; }
  const Matrix &matrix() const { return matrix_; }

 private:
  RegisterSystem in_, out_;
  Matrix matrix_;
};

class KrausChannel {
 public:
  // `trace_preserving = false` admits a trace-non-increasing Kraus set, used
  // for single measurement branches.
  KrausChannel(RegisterSystem in_system, RegisterSystem out_system, std::vector<Matrix> kraus,
               bool trace_preserving = true)
      : in_(std::move(in_system)), out_(std::move(out_system)), kraus_(std::move(kraus)),
        trace_preserving_(trace_preserving) {
    if (kraus_.empty()) throw InputError("Kraus channel needs at least one operator");
    const auto di = static_cast<Eigen::Index>(in_.dim()), dout = static_cast<Eigen::Index>(out_.dim());
    Matrix sum = Matrix::Zero(di, di);
    for (const auto &k : kraus_) {
      if (k.rows() != dout || k.cols() != di) throw InputError("Kraus operator shape mismatch");
      sum += k.adjoint() * k;
    }
    Matrix defect = sum - Matrix::Identity(di, di);
    if (trace_preserving_) {
      if (defect.cwiseAbs().maxCoeff() > tol::herm)
        throw InputError("Kraus operators do not sum to identity (not trace preserving)");
    } else if (detail::hermitian_eigenvalues(defect)[di - 1] > tol::herm) {
      throw InputError("Kraus operators are not trace non-increasing");
    }
  }

  static KrausChannel identity(const RegisterSystem &system) {
    auto d = static_cast<Eigen::Index>(system.dim());
    return KrausChannel(system, system, {Matrix::Identity(d, d)});
  }

  static KrausChannel unitary(const RegisterSystem &system, const Matrix &u) {
    return KrausChannel(system, system, {u});
  }

  const RegisterSystem &in_system() const { return in_; }
  const RegisterSystem &out_system() const { return out_; }
  const std::vector<Matrix> &kraus() const { return kraus_; }
  bool trace_preserving() const { return trace_preserving_; }

 private:
  RegisterSystem in_, out_;
  std::vector<Matrix> kraus_;
  bool trace_preserving_ = true;
};

// Finite measurement with outcome operators A_i (branch A_i rho A_i^dagger)
// and effects E_i = A_i^dagger A_i summing to identity.
class Povm {
 public:
  static Povm from_measurement_operators(RegisterSystem system, std::vector<Matrix> ops) {
    return Povm(std::move(system), std::move(ops));
  }

  // Canonical square-root measurement operators sqrt(E_i).
  static Povm from_effects(RegisterSystem system, const std::vector<Matrix> &effects) {
    std::vector<Matrix> ops;
    for (const auto &e : effects) {
      if (detail::hermiticity_defect(e) > tol::herm) throw InputError("POVM effect is not Hermitian");
      auto ev = detail::hermitian_eigenvalues(e);
      if (ev.size() && (ev[0] < -tol::psd || ev[ev.size() - 1] > 1 + tol::psd))
        throw InputError("POVM effect is not between 0 and I");
      ops.push_back(detail::psd_sqrt(e));
    }
    return Povm(std::move(system), std::move(ops));
  }

  const RegisterSystem &system() const { return system_; }
  const std::vector<Matrix> &operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

  Matrix effect(std::size_t i) const { return ops_[i].adjoint() * ops_[i]; }

 private:
  Povm(RegisterSystem system, std::vector<Matrix> ops) : system_(std::move(system)), ops_(std::move(ops)) {
    if (ops_.empty()) throw InputError("POVM needs at least one element");
    const auto d = static_cast<Eigen::Index>(system_.dim());
    Matrix sum = Matrix::Zero(d, d);
    for (const auto &a : ops_) {
      if (a.rows() != d || a.cols() != d) throw InputError("POVM element shape mismatch");
      sum += a.adjoint() * a;
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::herm)
      throw InputError("POVM is incomplete (effects do not sum to identity)");
  }

  RegisterSystem system_;
  std::vector<Matrix> ops_;
};

//============================================================================
// Operations
//============================================================================

inline DensityOperator tensor(const DensityOperator &a, const DensityOperator &b) {
  auto sys = a.system().concat(b.system());  // throws on label collision
  return DensityOperator::trusted(std::move(sys), detail::kron(a.matrix(), b.matrix()),
                                  a.subnormalized() || b.subnormalized());
}

inline StateVector tensor(const StateVector &a, const StateVector &b) {
  auto sys = a.system().concat(b.system());
  return StateVector(std::move(sys), detail::kron(a.amplitudes(), b.amplitudes()));
}

// Reduced state on `keep`, returned in the input's canonical register order.
inline DensityOperator partial_trace(const DensityOperator &rho, const LabelSet &keep) {
  auto kept = rho.system().select(keep);
  auto split = detail::split_index(rho.system(), kept.labels());
  const auto &m = rho.matrix();
  const auto dk = static_cast<Eigen::Index>(split.target_dim);
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = 0; j < dk; ++j) {
      Complex s = 0;
      for (std::size_t r = 0; r < split.rest_dim; ++r) s += m(split(i, r), split(j, r));
      out(i, j) = s;
    }
  return DensityOperator::trusted(std::move(kept), std::move(out), rho.subnormalized());
}

// Reduced state of a (possibly unnormalized) vector on `keep`, canonical order.
inline Matrix marginal_matrix(const RegisterSystem &sys, const Vector &v, const LabelSet &keep) {
  auto kept = sys.select(keep);
  auto split = detail::split_index(sys, kept.labels());
  Eigen::MatrixXcd a(split.target_dim, split.rest_dim);
  for (std::size_t t = 0; t < split.target_dim; ++t)
    for (std::size_t r = 0; r < split.rest_dim; ++r) a(t, r) = v[split(t, r)];
  return a * a.adjoint();
}

inline DensityOperator partial_trace(const StateVector &psi, const LabelSet &keep) {
  return DensityOperator::trusted(psi.system().select(keep),
                                  marginal_matrix(psi.system(), psi.amplitudes(), keep));
}

// Reorders registers; `order` must list every label exactly once.
inline DensityOperator reorder(const DensityOperator &rho, const LabelSet &order) {
  if (order.size() != rho.system().size()) throw InputError("reorder must list every register");
  auto split = detail::split_index(rho.system(), order);
  const auto d = static_cast<Eigen::Index>(split.target_dim);
  Matrix out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = rho.matrix()(split(i, 0), split(j, 0));
  return DensityOperator::trusted(rho.system().ordered(order), std::move(out), rho.subnormalized());
}

inline Vector reorder(const RegisterSystem &sys, const Vector &v, const LabelSet &order) {
  if (order.size() != sys.size()) throw InputError("reorder must list every register");
  auto split = detail::split_index(sys, order);
  Vector out(v.size());
  for (std::size_t i = 0; i < split.target_dim; ++i) out[i] = v[split(i, 0)];
  return out;
}

inline StateVector reorder(const StateVector &psi, const LabelSet &order) {
  return StateVector(psi.system().ordered(order), reorder(psi.system(), psi.amplitudes(), order));
}

// Applies `op` (acting on `targets` in the order listed) to a vector of `sys`.
inline Vector apply_local(const RegisterSystem &sys, const Vector &v, const Matrix &op,
                          const LabelSet &targets) {
  auto split = detail::split_index(sys, targets);
  if (op.rows() != static_cast<Eigen::Index>(split.target_dim) || op.cols() != op.rows())
    throw InputError("local operator dimension does not match target registers");
  Vector out(v.size());
  Vector in(split.target_dim);
  for (std::size_t r = 0; r < split.rest_dim; ++r) {
    for (std::size_t t = 0; t < split.target_dim; ++t) in[t] = v[split(t, r)];
    Vector res = op * in;
    for (std::size_t t = 0; t < split.target_dim; ++t) out[split(t, r)] = res[t];
  }
  return out;
}

// Full-space matrix of `op` acting on `targets`, identity elsewhere.
inline Matrix embed_operator(const RegisterSystem &sys, const Matrix &op, const LabelSet &targets) {
  auto split = detail::split_index(sys, targets);
  if (op.rows() != static_cast<Eigen::Index>(split.target_dim) || op.cols() != op.rows())
    throw InputError("local operator dimension does not match target registers");
  const auto d = static_cast<Eigen::Index>(sys.dim());
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t r = 0; r < split.rest_dim; ++r)
    for (std::size_t i = 0; i < split.target_dim; ++i)
      for (std::size_t j = 0; j < split.target_dim; ++j) out(split(i, r), split(j, r)) = op(i, j);
  return out;
}

// Canonical purification sum_i sqrt(lambda_i) |e_i>|i> with purifier
// dimension equal to the numerical rank.
inline StateVector purify(const DensityOperator &rho, const std::string &purifier_label) {
  auto es = detail::hermitian_eig(rho.matrix());
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = es.values.size(); i-- > 0;)
    if (es.values[i] > tol::rank) support.push_back(i);
  if (support.empty()) throw InputError("cannot purify the zero operator");
  auto sys = rho.system().concat(RegisterSystem{{purifier_label, support.size()}});
  const auto d = static_cast<Eigen::Index>(rho.dim());
  const auto r = static_cast<Eigen::Index>(support.size());
  Vector v = Vector::Zero(d * r);
  for (Eigen::Index k = 0; k < r; ++k) {
    double w = std::sqrt(es.values[support[k]]);
    for (Eigen::Index s = 0; s < d; ++s) v[s * r + k] = w * es.vectors(s, support[k]);
  }
  return StateVector::normalized(sys, std::move(v));
}

inline void require_same_system(const DensityOperator &a, const DensityOperator &b, const char *what) {
  if (a.dim() != b.dim())
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()) + ")");
}

// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1, via singular values.
inline double fidelity(const DensityOperator &rho, const DensityOperator &sigma) {
  require_same_system(rho, sigma, "fidelity");
  Matrix prod = detail::psd_sqrt(rho.matrix()) * detail::psd_sqrt(sigma.matrix());
  return std::clamp(detail::trace_norm(prod), 0.0, 1.0);
}

inline double purified_distance(const DensityOperator &rho, const DensityOperator &sigma) {
  double f = fidelity(rho, sigma);
  const double infid = 1.0 - f * f;
  return infid > tol::infidelity ? std::sqrt(infid) : 0.0;
}

inline double trace_norm_distance(const DensityOperator &rho, const DensityOperator &sigma) {
  require_same_system(rho, sigma, "trace_norm_distance");
  return detail::trace_norm(rho.matrix() - sigma.matrix());
}

inline DensityOperator apply_channel(const KrausChannel &ch, const DensityOperator &rho) {
  if (rho.dim() != ch.in_system().dim())
    throw InputError("apply_channel: input system " + rho.system().to_string() +
                     " does not match channel input " + ch.in_system().to_string());
  const auto d = static_cast<Eigen::Index>(ch.out_system().dim());
  Matrix out = Matrix::Zero(d, d);
  for (const auto &k : ch.kraus()) out += k * rho.matrix() * k.adjoint();
  return DensityOperator::trusted(ch.out_system(), std::move(out),
                                  rho.subnormalized() || !ch.trace_preserving());
}

struct Dilation {
  Isometry isometry;  // in_system -> out_system (x) environment
  LabelSet environment;
};

// V = sum_i K_i (x) |i>_E. A single-Kraus channel gets a one-dimensional
// environment.
inline Dilation stinespring_dilation(const KrausChannel &ch, const std::string &env_label = "E") {
  const auto &ks = ch.kraus();
  const auto di = static_cast<Eigen::Index>(ch.in_system().dim());
  const auto dout = static_cast<Eigen::Index>(ch.out_system().dim());
  const auto m = static_cast<Eigen::Index>(ks.size());
  Matrix v = Matrix::Zero(dout * m, di);
  for (Eigen::Index o = 0; o < dout; ++o)
    for (Eigen::Index i = 0; i < m; ++i) v.row(o * m + i) = ks[i].row(o);
  auto out = ch.out_system().concat(RegisterSystem{{env_label, ks.size()}});
  return {Isometry(ch.in_system(), std::move(out), std::move(v)), {env_label}};
}

}  // namespace qsrlc
