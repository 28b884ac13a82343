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

// Vectorized Lindblad generators and their non-Hermitian spectral analysis:
// biorthogonal eigenmodes, steady states, and metastable windows.
//
// Vectorization is column stacking throughout: vec(A rho B) = (B^T (x) A) vec(rho),
// and the entry rho(i, j) lives at index i + j * hdim.

#pragma once

#include "metastab/core.hpp"
#include "metastab/qops.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace metastab {

struct LindbladModel;

CVector vectorize(const Operator& op);
Operator devectorize(const CVector& v, Index hdim);

class Superoperator {
 public:
  enum class Convention { ColumnStacking };
  static constexpr Convention convention = Convention::ColumnStacking;

  Superoperator(Index hdim, CMatrix matrix);

  Index hdim() const noexcept { return hdim_; }
  Index size() const noexcept { return matrix_.rows(); }
  const CMatrix& matrix() const noexcept { return matrix_; }

  CVector apply(const CVector& vec_rho) const;
  Operator apply(const Operator& rho) const;

  // max |vec(I)^dagger L|, zero for a trace-preserving generator
  double trace_preservation_error() const;

  Superoperator& operator+=(const Superoperator& other);
  friend Superoperator operator+(Superoperator lhs, const Superoperator& rhs) {
    return lhs += rhs;
  }

 private:
  Index hdim_;
  CMatrix matrix_;
};

// Validates H Hermitian within 1e-10 (ValidationError) and matching
// dimensions (ArgumentError).
Superoperator build_superoperator(const Operator& hamiltonian, std::span<const Operator> jumps);
Superoperator build_superoperator(const LindbladModel& model);

struct SpectrumOptions {
  // Largest Liouville-space dimension hdim^2 accepted.
  Index max_liouville_dim = 4096;
  // Above this right-eigenvector condition number the spectrum is rejected.
  double max_condition = 1e12;
  // Above this the duals come from left eigenvectors paired per cluster
  // instead of the inverse of the right-eigenvector matrix.
  double left_fallback_condition = 1e8;
  // Eigenvalues closer than this (relative to the spectral scale) form a cluster.
  double cluster_tol = 1e-8;
};

// Eigenvalues sorted by decreasing real part (ties: increasing |Im|, then
// positive Im first) with right modes R_k and dual left modes L_k,
// Tr(L_j R_k) = delta_jk. R_0 is scaled to unit trace when its trace is
// non-zero, so for a unique steady state R_0 = rho_ss and L_0 = identity.
// Mode indices are 0-based.
class Spectrum {
 public:
  Spectrum(Index hdim, CVector eigenvalues, CMatrix right, CMatrix left_rows,
           double condition_number, bool left_fallback);

  Index hdim() const noexcept { return hdim_; }
  Index size() const noexcept { return eigenvalues_.size(); }
  const CVector& eigenvalues() const noexcept { return eigenvalues_; }
  Complex eigenvalue(Index k) const { return eigenvalues_(k); }
  std::span<const Complex> eigenvalue_span() const {
    return {eigenvalues_.data(), static_cast<std::size_t>(eigenvalues_.size())};
  }

  // Columns are vec(R_k).
  const CMatrix& right_vectors() const noexcept { return right_; }
  // Rows w_k with Tr(L_k rho) = w_k . vec(rho).
  const CMatrix& left_rows() const noexcept { return left_; }

  Operator right_mode(Index k) const;
  Operator left_mode(Index k) const;

  double condition_number() const noexcept { return condition_; }
  bool used_left_fallback() const noexcept { return left_fallback_; }

  // max |Tr(L_j R_k) - delta_jk|
  double biorthogonality_error() const;

  // c_k = Tr(L_k rho)
  CVector coefficients(const CVector& vec_rho) const;
  // sum_k c_k e^{lambda_k t} vec(R_k)
  CVector synthesize(const CVector& coeffs, double t) const;

 private:
  Index hdim_;
  CVector eigenvalues_;
  CMatrix right_;
  CMatrix left_;
  double condition_;
  bool left_fallback_;
};

// Sort order used by spectrum(); exposed for tests.
std::vector<Index> spectral_order(std::span<const Complex> eigenvalues, double tie_tol);

Spectrum spectrum(const Superoperator& sup, const SpectrumOptions& options = {});

// Unique steady state R_0. With allow_degenerate, several zero modes are
// accepted and the trace-normalized projection of the maximally mixed state
// onto the null space is returned instead of throwing MultiplicityError.
DensityMatrix steady_state(const Spectrum& spec, bool allow_degenerate = false);

// Real parts below this magnitude count as zero.
inline constexpr double kZeroRate = 1e-13;

struct MetastabilityReport {
  Index m = 0;
  double tau_fast = 0.0;   // 1/|Re lambda_{m+1}|
  double tau_slow = 0.0;   // 1/|Re lambda_m|, +inf for a zero mode
  double window = 0.0;     // tau_slow - tau_fast
  double gap_ratio = 0.0;  // Re lambda_m / Re lambda_{m+1}
};

// m counts modes: lambda_m is eigenvalues[m - 1].
MetastabilityReport metastable_window(std::span<const Complex> eigenvalues, Index m);
MetastabilityReport metastable_window(const Spectrum& spec, Index m);

struct GapCandidate {
  Index m;
  double ratio;
};

// Re lambda_m / Re lambda_{m+1} for m in [2, m_max], ascending by ratio.
std::vector<GapCandidate> detect_gap(std::span<const Complex> eigenvalues, Index m_max);
std::vector<GapCandidate> detect_gap(const Spectrum& spec, Index m_max);

CVector mode_coefficients(const Spectrum& spec, const DensityMatrix& rho0);

// rho_ss + sum_{k=2}^{m} c_k R_k, Hermitized. The result can have small
// negative eigenvalues; the returned DensityMatrix carries a positivity
// tolerance wide enough to hold it and reports min_eigenvalue().
DensityMatrix project_metastable(const Spectrum& spec, const DensityMatrix& rho0, Index m);

// rho ~ p1|psi1><psi1| + p2|psi2><psi2| + z|psi1><psi2| + h.c.
struct MetastableManifoldState {
  double p1;
  double p2;
  Complex z;

  MetastableManifoldState(double p1, double p2, Complex z);
};

}  // namespace metastab
