// Copyright 2026 The metastab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metastab/qops.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace metastab {

namespace {

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw ArgumentError(std::string(what) + ": dimension mismatch (" +
                        std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

Operator::Operator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw ArgumentError("Operator: entries must be a non-empty square matrix, got " +
                        std::to_string(entries_.rows()) + "x" +
                        std::to_string(entries_.cols()));
  }
}

Operator Operator::identity(Index dim) { return Operator(CMatrix::Identity(dim, dim)); }

Operator Operator::zero(Index dim) { return Operator(CMatrix::Zero(dim, dim)); }

double Operator::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

Operator Operator::hermitian_part() const {
  return Operator(0.5 * (entries_ + entries_.adjoint()));
}

CVector Operator::apply(const CVector& ket) const {
  if (ket.size() != dim()) throw ArgumentError("Operator::apply: dimension mismatch");
  return entries_ * ket;
}

Operator& Operator::operator+=(const Operator& other) {
  require_same_dim(*this, other, "Operator +");
  entries_ += other.entries_;
  return *this;
}

Operator& Operator::operator-=(const Operator& other) {
  require_same_dim(*this, other, "Operator -");
  entries_ -= other.entries_;
  return *this;
}

Operator& Operator::operator*=(Complex s) {
  entries_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_dim(lhs, rhs, "Operator *");
  return Operator(lhs.entries_ * rhs.entries_);
}

Operator outer(const CVector& ket, const CVector& bra) {
  if (ket.size() != bra.size()) throw ArgumentError("outer: dimension mismatch");
  return Operator(ket * bra.adjoint());
}

Operator projector(const CVector& ket) { return outer(ket, ket); }

Operator hermitian_sqrt(const Operator& op) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op.hermitian_part().matrix());
  Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix& v = es.eigenvectors();
  return Operator(v * roots.cast<Complex>().asDiagonal() * v.adjoint());
}

DensityMatrix::DensityMatrix(Operator op, DensityTolerances tol) : op_(std::move(op)), tol_(tol) {
  const double herm = op_.hermiticity_error();
  if (herm > tol_.hermiticity) {
    throw ValidationError("DensityMatrix: not Hermitian (max |rho - rho^dagger| = " +
                          std::to_string(herm) + ")");
  }
  const Complex tr = op_.trace();
  if (std::abs(tr - 1.0) > tol_.trace) {
    throw ValidationError("DensityMatrix: trace " + std::to_string(tr.real()) + "+" +
                          std::to_string(tr.imag()) + "i is not 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op_.hermitian_part().matrix(),
                                            Eigen::EigenvaluesOnly);
  min_eigenvalue_ = es.eigenvalues().minCoeff();
  if (min_eigenvalue_ < -tol_.positivity) {
    throw ValidationError("DensityMatrix: minimum eigenvalue " +
                          std::to_string(min_eigenvalue_) + " below -" +
                          std::to_string(tol_.positivity));
  }
}

DensityMatrix DensityMatrix::pure(const CVector& ket) {
  const double norm = ket.norm();
  if (ket.size() == 0 || norm < 1e-300) {
    throw DegenerateStateError("DensityMatrix::pure: zero-norm state");
  }
  return DensityMatrix(projector(ket / norm));
}

DensityMatrix DensityMatrix::hermitized(const Operator& op, DensityTolerances tol) {
  return DensityMatrix(op.hermitian_part(), tol);
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(Operator(CMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
  return op_.matrix().squaredNorm();
}

PauliKind parse_pauli_kind(std::string_view label) {
  if (label == "x") return PauliKind::X;
  if (label == "y") return PauliKind::Y;
  if (label == "z") return PauliKind::Z;
  if (label == "+") return PauliKind::Plus;
  if (label == "-") return PauliKind::Minus;
  if (label == "n") return PauliKind::Number;
  throw ArgumentError("pauli: unknown label '" + std::string(label) + "'");
}

Operator qubit_op(PauliKind kind) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (kind) {
    case PauliKind::X:
      m << 0, 1, 1, 0;
      break;
    case PauliKind::Y:
      m << 0, kI, -kI, 0;
      break;
    case PauliKind::Z:
      m << -1, 0, 0, 1;
      break;
    case PauliKind::Plus:
      m(1, 0) = 1.0;
      break;
    case PauliKind::Minus:
      m(0, 1) = 1.0;
      break;
    case PauliKind::Number:
      m(1, 1) = 1.0;
      break;
  }
  return Operator(std::move(m));
}

Operator pauli(PauliKind kind, int site) {
  if (site != 1 && site != 2) {
    throw ArgumentError("pauli: site must be 1 or 2, got " + std::to_string(site));
  }
  const CMatrix s = qubit_op(kind).matrix();
  CMatrix out = CMatrix::Zero(4, 4);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      if (site == 1) {
        // s (x) I
        out(2 * i, 2 * j) = s(i, j);
        out(2 * i + 1, 2 * j + 1) = s(i, j);
      } else {
        // I (x) s
        out(i, j) = s(i, j);
        out(2 + i, 2 + j) = s(i, j);
      }
    }
  }
  return Operator(std::move(out));
}

CVector two_qubit_ket(int q1, int q2) {
  if ((q1 != 0 && q1 != 1) || (q2 != 0 && q2 != 1)) {
    throw ArgumentError("two_qubit_ket: qubit values must be 0 or 1");
  }
  CVector v = CVector::Zero(4);
  v(2 * q1 + q2) = 1.0;
  return v;
}

FockOps fock_ops(Index n_trunc) {
  if (n_trunc < 2) {
    throw ArgumentError("fock_ops: n_trunc must be >= 2, got " + std::to_string(n_trunc));
  }
  CMatrix a = CMatrix::Zero(n_trunc, n_trunc);
  for (Index k = 1; k < n_trunc; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  CMatrix a_dag = a.adjoint();
  CMatrix number = a_dag * a;
  return {Operator(std::move(a)), Operator(std::move(a_dag)), Operator(std::move(number))};
}

CVector fock_ket(Index n_trunc, Index k) {
  if (k < 0 || k >= n_trunc) throw ArgumentError("fock_ket: level out of range");
  CVector v = CVector::Zero(n_trunc);
  v(k) = 1.0;
  return v;
}

CVector coherent_amplitudes(Index n_trunc, Complex alpha) {
  if (n_trunc < 1) throw ArgumentError("coherent_amplitudes: n_trunc must be positive");
  CVector c(n_trunc);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (Index k = 1; k < n_trunc; ++k) {
    c(k) = c(k - 1) * alpha / std::sqrt(static_cast<double>(k));
  }
  return c;
}

CoherentState coherent_state(Index n_trunc, Complex alpha) {
  CVector c = coherent_amplitudes(n_trunc, alpha);
  const double mass = c.squaredNorm();
  CoherentState out;
  out.truncation_error = std::max(0.0, 1.0 - mass);
  out.truncation_warning = out.truncation_error > 1e-4;
  out.amplitudes = c / std::sqrt(mass);
  return out;
}

double CatStateSpec::norm_const() const {
  const double overlap = std::exp(-2.0 * std::norm(alpha));
  const double sign = parity == Parity::Even ? 1.0 : -1.0;
  return 1.0 / std::sqrt(2.0 * (1.0 + sign * overlap));
}

CVector cat_state(const CatStateSpec& spec) {
  if (spec.n_trunc < 2) throw ArgumentError("cat_state: n_trunc must be >= 2");
  if (spec.parity == Parity::Odd && std::abs(spec.alpha) == 0.0) {
    throw DegenerateStateError("cat_state: odd cat with alpha = 0 has zero norm");
  }
  // <k|-alpha> = (-1)^k <k|alpha>, so the opposite-parity levels cancel exactly.
  const CVector c = coherent_amplitudes(spec.n_trunc, spec.alpha);
  const double sign = spec.parity == Parity::Even ? 1.0 : -1.0;
  CVector v(spec.n_trunc);
  for (Index k = 0; k < spec.n_trunc; ++k) {
    const double alt = (k % 2 == 0) ? 1.0 : -1.0;
    v(k) = c(k) * (1.0 + sign * alt);
  }
  v *= spec.norm_const();
  const double norm = v.norm();
  if (norm < 1e-300) throw DegenerateStateError("cat_state: zero norm after truncation");
  return v / norm;
}

FidelityReference::FidelityReference(const DensityMatrix& rho0) : dim_(rho0.dim()) {
  pure_ = rho0.purity() > 1.0 - 1e-10;
  if (pure_) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho0.matrix());
    ket_ = es.eigenvectors().col(rho0.dim() - 1);
  } else {
    sqrt_rho0_ = hermitian_sqrt(rho0.op());
  }
}

double FidelityReference::operator()(const Operator& rho_t) const {
  if (rho_t.dim() != dim()) throw ArgumentError("fidelity: dimension mismatch");
  double value;
  if (pure_) {
    value = (ket_.adjoint() * rho_t.matrix() * ket_)(0, 0).real();
  } else {
    const CMatrix& s = sqrt_rho0_.matrix();
    value = (s * rho_t.matrix() * s).trace().real();
  }
  return std::clamp(std::sqrt(std::max(0.0, value)), 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho_t) {
  if (rho0.dim() != rho_t.dim()) throw ArgumentError("fidelity: dimension mismatch");
  return FidelityReference(rho0)(rho_t.op());
}

Complex expectation(const Operator& obs, const Operator& rho) {
  if (obs.dim() != rho.dim()) throw ArgumentError("expectation: dimension mismatch");
  // Tr(A rho) = sum_ij A_ij rho_ji
  return obs.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

Complex expectation(const Operator& obs, const DensityMatrix& rho) {
  return expectation(obs, rho.op());
}

}  // namespace metastab
