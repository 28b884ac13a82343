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

// Dense operator and state algebra on small Hilbert spaces: the two-qubit
// space (dim 4, basis |q1 q2> with q1 the slow index) and truncated Fock
// spaces.

#pragma once

#include "metastab/core.hpp"

#include <string_view>

namespace metastab {

class Operator {
 public:
  Operator() = default;
  explicit Operator(CMatrix entries);

  static Operator identity(Index dim);
  static Operator zero(Index dim);

  Index dim() const noexcept { return entries_.rows(); }
  const CMatrix& matrix() const noexcept { return entries_; }

  Operator adjoint() const { return Operator(entries_.adjoint()); }
  Complex trace() const { return entries_.trace(); }
  // max |A - A^dagger|
  double hermiticity_error() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() <= tol; }
  // (A + A^dagger) / 2
  Operator hermitian_part() const;

  CVector apply(const CVector& ket) const;

  Operator& operator+=(const Operator& other);
  Operator& operator-=(const Operator& other);
  Operator& operator*=(Complex s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Operator operator*(Complex s, Operator op) { return op *= s; }
  friend Operator operator*(Operator op, Complex s) { return op *= s; }

 private:
  CMatrix entries_;
};

// |ket><bra|
Operator outer(const CVector& ket, const CVector& bra);
Operator projector(const CVector& ket);

// Hermitian square root through eigendecomposition, negative eigenvalues
// clamped to zero.
Operator hermitian_sqrt(const Operator& op);

struct DensityTolerances {
  double trace = 1e-9;
  double positivity = 1e-8;
  double hermiticity = 1e-12;
};

// A validated density matrix: unit trace, Hermitian, and positive within the
// stored tolerances. Construction throws ValidationError otherwise.
class DensityMatrix {
 public:
  explicit DensityMatrix(Operator op, DensityTolerances tol = {});

  // Normalizes the ket; throws DegenerateStateError on zero norm.
  static DensityMatrix pure(const CVector& ket);
  // Averages with the adjoint before validating.
  static DensityMatrix hermitized(const Operator& op, DensityTolerances tol = {});
  static DensityMatrix maximally_mixed(Index dim);

  const Operator& op() const noexcept { return op_; }
  const CMatrix& matrix() const noexcept { return op_.matrix(); }
  Index dim() const noexcept { return op_.dim(); }
  const DensityTolerances& tolerances() const noexcept { return tol_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }
  double purity() const;

 private:
  Operator op_;
  DensityTolerances tol_;
  double min_eigenvalue_ = 0.0;
};

enum class PauliKind { X, Y, Z, Plus, Minus, Number };

// Accepts "x", "y", "z", "+", "-", "n".
PauliKind parse_pauli_kind(std::string_view label);

// Single-qubit operator in the (|0>, |1>) basis with sigma_z|1> = +|1>,
// sigma_- |1> = |0>, sigma_pm = (sigma_x pm i sigma_y)/2, n = (1+sigma_z)/2.
Operator qubit_op(PauliKind kind);

// qubit_op embedded on site 1 or 2 of the two-qubit space.
Operator pauli(PauliKind kind, int site);

// |q1 q2>, q in {0, 1}.
CVector two_qubit_ket(int q1, int q2);

struct FockOps {
  Operator a;
  Operator a_dag;
  Operator number;
};

FockOps fock_ops(Index n_trunc);
CVector fock_ket(Index n_trunc, Index k);

struct CoherentState {
  CVector amplitudes;              // renormalized
  double truncation_error = 0.0;   // 1 - sum |c_k|^2 before renormalization
  bool truncation_warning = false; // truncation_error > 1e-4
};

// e^{-|alpha|^2/2} alpha^k / sqrt(k!) for k < n_trunc, not renormalized.
CVector coherent_amplitudes(Index n_trunc, Complex alpha);
CoherentState coherent_state(Index n_trunc, Complex alpha);

enum class Parity { Even, Odd };

struct CatStateSpec {
  Complex alpha;
  Parity parity = Parity::Even;
  Index n_trunc = 25;

  // N_pm = 1 / sqrt(2 (1 pm e^{-2|alpha|^2}))
  double norm_const() const;
};

// N_pm (|alpha> pm |-alpha>), renormalized in the truncated basis.
CVector cat_state(const CatStateSpec& spec);

// Fidelity against a fixed reference state; precomputes what the
// reference-side formula needs so trajectories can reuse it.
class FidelityReference {
 public:
  explicit FidelityReference(const DensityMatrix& rho0);
  double operator()(const Operator& rho_t) const;
  bool is_pure() const noexcept { return pure_; }
  Index dim() const noexcept { return dim_; }

 private:
  Index dim_ = 0;
  bool pure_ = false;
  CVector ket_;
  Operator sqrt_rho0_;
};

// sqrt(Tr(sqrt(rho0) rho_t sqrt(rho0))). Uses sqrt(<psi|rho_t|psi>) when
// rho0 is pure (purity > 1 - 1e-10).
double fidelity(const DensityMatrix& rho0, const DensityMatrix& rho_t);

Complex expectation(const Operator& obs, const Operator& rho);
Complex expectation(const Operator& obs, const DensityMatrix& rho);

}  // namespace metastab
