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

#include "metastab/liouville.hpp"

#include "metastab/kernels.hpp"
#include "metastab/models.hpp"

#include <lapacke.h>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace metastab {

CVector vectorize(const Operator& op) {
  const CMatrix& m = op.matrix();
  return Eigen::Map<const CVector>(m.data(), m.size());
}

Operator devectorize(const CVector& v, Index hdim) {
  if (v.size() != hdim * hdim) throw ArgumentError("devectorize: size mismatch");
  return Operator(Eigen::Map<const CMatrix>(v.data(), hdim, hdim));
}

Superoperator::Superoperator(Index hdim, CMatrix matrix) : hdim_(hdim), matrix_(std::move(matrix)) {
  if (hdim_ < 1 || matrix_.rows() != hdim_ * hdim_ || matrix_.cols() != hdim_ * hdim_) {
    throw ArgumentError("Superoperator: matrix must be hdim^2 x hdim^2");
  }
}

CVector Superoperator::apply(const CVector& vec_rho) const {
  if (vec_rho.size() != size()) throw ArgumentError("Superoperator::apply: size mismatch");
  CVector out;
  kernels::matvec_omp(matrix_, vec_rho, out);
  return out;
}

Operator Superoperator::apply(const Operator& rho) const {
  if (rho.dim() != hdim_) throw ArgumentError("Superoperator::apply: dimension mismatch");
  return devectorize(apply(vectorize(rho)), hdim_);
}

double Superoperator::trace_preservation_error() const {
  // vec(I)^dagger picks the rows i + i*hdim
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(size());
  for (Index i = 0; i < hdim_; ++i) acc += matrix_.row(i + i * hdim_);
  return acc.cwiseAbs().maxCoeff();
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
  if (other.hdim_ != hdim_) throw ArgumentError("Superoperator +: dimension mismatch");
  matrix_ += other.matrix_;
  return *this;
}

Superoperator build_superoperator(const Operator& hamiltonian, std::span<const Operator> jumps) {
  const Index n = hamiltonian.dim();
  const double herm = hamiltonian.hermiticity_error();
  if (herm > 1e-10) {
    throw ValidationError("build_superoperator: Hamiltonian not Hermitian (max |H - H^dagger| = " +
                          std::to_string(herm) + ")");
  }
  std::vector<CMatrix> js;
  js.reserve(jumps.size());
  for (const Operator& j : jumps) {
    if (j.dim() != n) throw ArgumentError("build_superoperator: jump operator dimension mismatch");
    js.push_back(j.matrix());
  }
  return Superoperator(n, kernels::liouvillian_omp(hamiltonian.matrix(), js));
}

Superoperator build_superoperator(const LindbladModel& model) {
  const auto jumps = model.jump_operators();
  return build_superoperator(model.hamiltonian, jumps);
}

Spectrum::Spectrum(Index hdim, CVector eigenvalues, CMatrix right, CMatrix left_rows,
                   double condition_number, bool left_fallback)
    : hdim_(hdim),
      eigenvalues_(std::move(eigenvalues)),
      right_(std::move(right)),
      left_(std::move(left_rows)),
      condition_(condition_number),
      left_fallback_(left_fallback) {
  const Index n = eigenvalues_.size();
  if (n != hdim_ * hdim_ || right_.rows() != n || right_.cols() != n || left_.rows() != n ||
      left_.cols() != n) {
    throw ArgumentError("Spectrum: inconsistent sizes");
  }
}

Operator Spectrum::right_mode(Index k) const { return devectorize(right_.col(k), hdim_); }

Operator Spectrum::left_mode(Index k) const {
  // Tr(L rho) = sum_ij L_ij rho_ji = vec(L^T) . vec(rho)
  return Operator(devectorize(left_.row(k).transpose(), hdim_).matrix().transpose());
}

double Spectrum::biorthogonality_error() const {
  const CMatrix g = left_ * right_;
  return (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

CVector Spectrum::coefficients(const CVector& vec_rho) const {
  if (vec_rho.size() != size()) throw ArgumentError("Spectrum::coefficients: size mismatch");
  CVector c;
  kernels::matvec_omp(left_, vec_rho, c);
  return c;
}

CVector Spectrum::synthesize(const CVector& coeffs, double t) const {
  if (coeffs.size() != size()) throw ArgumentError("Spectrum::synthesize: size mismatch");
  CVector weighted(size());
  for (Index k = 0; k < size(); ++k) weighted(k) = coeffs(k) * std::exp(eigenvalues_(k) * t);
  CVector out;
  kernels::matvec_omp(right_, weighted, out);
  return out;
}

std::vector<Index> spectral_order(std::span<const Complex> eigenvalues, double tie_tol) {
  std::vector<Index> idx(eigenvalues.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    return eigenvalues[a].real() > eigenvalues[b].real();
  });
  // Groups of equal real part (within tie_tol of the group head) are reordered
  // by |Im| ascending, positive Im first.
  std::size_t start = 0;
  while (start < idx.size()) {
    std::size_t stop = start + 1;
    const double head = eigenvalues[idx[start]].real();
    while (stop < idx.size() && head - eigenvalues[idx[stop]].real() <= tie_tol) ++stop;
    std::stable_sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                     idx.begin() + static_cast<std::ptrdiff_t>(stop), [&](Index a, Index b) {
                       const double ia = eigenvalues[a].imag();
                       const double ib = eigenvalues[b].imag();
                       if (std::abs(std::abs(ia) - std::abs(ib)) > tie_tol) {
                         return std::abs(ia) < std::abs(ib);
                       }
                       return ia > ib;
                     });
    start = stop;
  }
  return idx;
}

namespace {

struct EigenDecomposition {
  CVector values;
  CMatrix right;
  CMatrix left;  // columns u_k with u_k^dagger A = lambda_k u_k^dagger (when requested)
};

EigenDecomposition lapack_eig(const CMatrix& a, bool want_left) {
  const Index n = a.rows();
  CMatrix work = a;
  EigenDecomposition out;
  out.values.resize(n);
  out.right.resize(n, n);
  if (want_left) out.left.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, want_left ? 'V' : 'N', 'V', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(out.values.data()),
      want_left ? reinterpret_cast<lapack_complex_double*>(out.left.data()) : nullptr,
      static_cast<lapack_int>(n), reinterpret_cast<lapack_complex_double*>(out.right.data()),
      static_cast<lapack_int>(n));
  if (info != 0) {
    throw NumericalError("spectrum: zgeev failed (info = " + std::to_string(info) + ")");
  }
  return out;
}

// Closest pair of eigenvalues, used to name the offending cluster.
std::string describe_cluster(const CVector& values) {
  double best = std::numeric_limits<double>::infinity();
  Index bi = 0;
  Index bj = 0;
  for (Index i = 0; i < values.size(); ++i) {
    for (Index j = i + 1; j < values.size(); ++j) {
      const double d = std::abs(values(i) - values(j));
      if (d < best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  }
  std::ostringstream os;
  os.precision(10);
  const Complex centre = values(bi);
  os << "near-degenerate eigenvalues around " << centre.real() << (centre.imag() < 0 ? "" : "+")
     << centre.imag() << "i:";
  const double radius = std::max(10.0 * best, 1e-10);
  for (Index k = 0; k < values.size(); ++k) {
    if (std::abs(values(k) - centre) <= radius) os << " [" << k << "] " << values(k);
  }
  (void)bj;
  return os.str();
}

// Dual rows from left eigenvectors, inverting the Gram block inside each
// cluster of (near-)equal eigenvalues.
CMatrix paired_left_rows(const CVector& values, const CMatrix& right, const CMatrix& left,
                         double cluster_abs_tol) {
  const Index n = values.size();
  CMatrix rows = CMatrix::Zero(n, n);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  for (Index k = 0; k < n; ++k) {
    if (done[static_cast<std::size_t>(k)]) continue;
    std::vector<Index> cluster;
    for (Index j = k; j < n; ++j) {
      if (!done[static_cast<std::size_t>(j)] && std::abs(values(j) - values(k)) <= cluster_abs_tol) {
        cluster.push_back(j);
        done[static_cast<std::size_t>(j)] = true;
      }
    }
    const auto c = static_cast<Index>(cluster.size());
    CMatrix u(n, c);
    CMatrix v(n, c);
    for (Index q = 0; q < c; ++q) {
      u.col(q) = left.col(cluster[static_cast<std::size_t>(q)]);
      v.col(q) = right.col(cluster[static_cast<std::size_t>(q)]);
    }
    const CMatrix gram = u.adjoint() * v;
    const CMatrix duals = gram.fullPivLu().solve(u.adjoint());
    for (Index q = 0; q < c; ++q) rows.row(cluster[static_cast<std::size_t>(q)]) = duals.row(q);
  }
  return rows;
}

// A trace-preserving generator has Tr R_k = 0 whenever lambda_k != 0. Removing
// the rounding residue keeps mode sums trace-preserving when c_k is large.
void remove_mode_traces(const CVector& values, CMatrix& right, Index hdim) {
  for (Index k = 0; k < values.size(); ++k) {
    if (values(k).real() >= -1e-9 && std::abs(values(k).imag()) <= 1e-9) continue;
    Complex tr = 0.0;
    for (Index i = 0; i < hdim; ++i) tr += right(i + i * hdim, k);
    tr /= static_cast<double>(hdim);
    for (Index i = 0; i < hdim; ++i) right(i + i * hdim, k) -= tr;
  }
}

}  // namespace

Spectrum spectrum(const Superoperator& sup, const SpectrumOptions& options) {
  const Index n = sup.size();
  if (n > options.max_liouville_dim) {
    throw ArgumentError("spectrum: Liouville dimension " + std::to_string(n) + " exceeds cap " +
                        std::to_string(options.max_liouville_dim));
  }
  const CMatrix& a = sup.matrix();
  EigenDecomposition eig = lapack_eig(a, false);

  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  const auto order = spectral_order(
      std::span<const Complex>(eig.values.data(), static_cast<std::size_t>(n)), 1e-12 * scale);
  CVector values(n);
  CMatrix right(n, n);
  for (Index k = 0; k < n; ++k) {
    values(k) = eig.values(order[static_cast<std::size_t>(k)]);
    right.col(k) = eig.right.col(order[static_cast<std::size_t>(k)]);
  }

  remove_mode_traces(values, right, sup.hdim());
  Eigen::PartialPivLU<CMatrix> lu(right);
  const double rcond = lu.rcond();
  // The rcond estimate can miss exact rank loss; the pivot ratio is a lower bound on cond.
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.minCoeff() > 0.0
                                 ? pivots.maxCoeff() / pivots.minCoeff()
                                 : std::numeric_limits<double>::infinity();
  const double condition =
      rcond > 0.0 ? std::max(1.0 / rcond, pivot_ratio) : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition)) {
    throw DegeneracyError("spectrum: right-eigenvector matrix condition number " +
                          std::to_string(condition) + " exceeds " +
                          std::to_string(options.max_condition) + "; " +
                          describe_cluster(values));
  }

  CMatrix left_rows;
  bool fallback = false;
  if (condition > options.left_fallback_condition) {
    EigenDecomposition both = lapack_eig(a, true);
    // zgeev returns matching left/right pairs in its own order; reorder both.
    CMatrix left_sorted(n, n);
    for (Index k = 0; k < n; ++k) {
      right.col(k) = both.right.col(order[static_cast<std::size_t>(k)]);
      left_sorted.col(k) = both.left.col(order[static_cast<std::size_t>(k)]);
      values(k) = both.values(order[static_cast<std::size_t>(k)]);
    }
    remove_mode_traces(values, right, sup.hdim());
    left_rows = paired_left_rows(values, right, left_sorted, options.cluster_tol * scale);
    fallback = true;
  } else {
    left_rows = lu.inverse();
  }

  // R_0 -> unit trace, dual row rescaled to keep Tr(L_0 R_0) = 1.
  Complex tr0 = 0.0;
  const Index hdim = sup.hdim();
  for (Index i = 0; i < hdim; ++i) tr0 += right(i + i * hdim, 0);
  if (std::abs(tr0) > 1e-8 * right.col(0).norm()) {
    right.col(0) /= tr0;
    left_rows.row(0) *= tr0;
    // A trace-carrying mode of a trace-preserving generator is stationary;
    // a residual +1e-12 would otherwise grow the trace over long spans.
    const Complex l0 = values(0);
    if (l0.real() >= -1e-9 && std::abs(l0.imag()) <= 1e-9 &&
        sup.trace_preservation_error() <= 1e-10 * scale) {
      values(0) = 0.0;
    }
  }
  return Spectrum(hdim, std::move(values), std::move(right), std::move(left_rows), condition,
                  fallback);
}

DensityMatrix steady_state(const Spectrum& spec, bool allow_degenerate) {
  const Index n = spec.size();
  const Index hdim = spec.hdim();
  std::vector<Index> null_modes;
  for (Index k = 0; k < n; ++k) {
    const Complex l = spec.eigenvalue(k);
    if (l.real() >= -1e-9 && std::abs(l.imag()) <= 1e-9) null_modes.push_back(k);
  }
  if (null_modes.empty()) throw NumericalError("steady_state: no zero eigenvalue found");
  if (null_modes.size() > 1 && !allow_degenerate) {
    throw MultiplicityError("steady_state: zero eigenvalue has multiplicity " +
                            std::to_string(null_modes.size()) +
                            " (Re lambda_2 = " + std::to_string(spec.eigenvalue(1).real()) + ")");
  }
  Operator rho;
  if (null_modes.size() == 1) {
    rho = spec.right_mode(null_modes.front());
  } else {
    const CVector mixed = vectorize(Operator::identity(hdim)) / static_cast<double>(hdim);
    const CVector c = spec.coefficients(mixed);
    CVector acc = CVector::Zero(n);
    for (Index k : null_modes) acc += c(k) * spec.right_vectors().col(k);
    rho = devectorize(acc, hdim);
  }
  Operator herm = rho.hermitian_part();
  const Complex tr = herm.trace();
  if (std::abs(tr) < 1e-14) throw NumericalError("steady_state: null-space state has zero trace");
  herm *= 1.0 / tr.real();
  return DensityMatrix(herm.hermitian_part());
}

MetastabilityReport metastable_window(std::span<const Complex> eigenvalues, Index m) {
  const auto count = static_cast<Index>(eigenvalues.size());
  if (m < 1 || m + 1 > count) {
    throw ArgumentError("metastable_window: m = " + std::to_string(m) +
                        " needs m + 1 <= " + std::to_string(count) + " eigenvalues");
  }
  const double slow = eigenvalues[static_cast<std::size_t>(m - 1)].real();
  const double fast = eigenvalues[static_cast<std::size_t>(m)].real();
  if (std::abs(fast) < kZeroRate) {
    throw IllPosedWindowError("metastable_window: Re lambda_" + std::to_string(m + 1) +
                              " = 0, no separation exists");
  }
  MetastabilityReport r;
  r.m = m;
  r.tau_fast = 1.0 / std::abs(fast);
  r.tau_slow = std::abs(slow) < kZeroRate ? std::numeric_limits<double>::infinity()
                                          : 1.0 / std::abs(slow);
  r.window = r.tau_slow - r.tau_fast;
  r.gap_ratio = std::abs(slow) < kZeroRate ? 0.0 : std::clamp(slow / fast, 0.0, 1.0);
  return r;
}

MetastabilityReport metastable_window(const Spectrum& spec, Index m) {
  return metastable_window(spec.eigenvalue_span(), m);
}

std::vector<GapCandidate> detect_gap(std::span<const Complex> eigenvalues, Index m_max) {
  const auto count = static_cast<Index>(eigenvalues.size());
  if (m_max >= count) {
    throw ArgumentError("detect_gap: m_max = " + std::to_string(m_max) +
                        " must be below the eigenvalue count " + std::to_string(count));
  }
  std::vector<GapCandidate> out;
  for (Index m = 2; m <= m_max; ++m) {
    const double slow = eigenvalues[static_cast<std::size_t>(m - 1)].real();
    const double fast = eigenvalues[static_cast<std::size_t>(m)].real();
    double ratio = 0.0;
    if (std::abs(slow) >= kZeroRate && std::abs(fast) >= kZeroRate) {
      ratio = std::clamp(slow / fast, 0.0, 1.0);
    }
    out.push_back({m, ratio});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GapCandidate& a, const GapCandidate& b) { return a.ratio < b.ratio; });
  return out;
}

std::vector<GapCandidate> detect_gap(const Spectrum& spec, Index m_max) {
  return detect_gap(spec.eigenvalue_span(), m_max);
}

CVector mode_coefficients(const Spectrum& spec, const DensityMatrix& rho0) {
  if (rho0.dim() != spec.hdim()) throw ArgumentError("mode_coefficients: dimension mismatch");
  return spec.coefficients(vectorize(rho0.op()));
}

DensityMatrix project_metastable(const Spectrum& spec, const DensityMatrix& rho0, Index m) {
  metastable_window(spec, m);
  const CVector c = mode_coefficients(spec, rho0);
  CVector acc = CVector::Zero(spec.size());
  for (Index k = 0; k < m; ++k) acc += c(k) * spec.right_vectors().col(k);
  Operator rho = devectorize(acc, spec.hdim()).hermitian_part();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  DensityTolerances tol;
  tol.positivity = std::max(tol.positivity, -es.eigenvalues().minCoeff());
  return DensityMatrix(std::move(rho), tol);
}

MetastableManifoldState::MetastableManifoldState(double p1_, double p2_, Complex z_)
    : p1(p1_), p2(p2_), z(z_) {
  if (std::abs(p1 + p2 - 1.0) > 1e-8) {
    throw ValidationError("MetastableManifoldState: p1 + p2 must equal 1");
  }
  if (p1 < -1e-10 || p2 < -1e-10) {
    throw ValidationError("MetastableManifoldState: probabilities must be non-negative");
  }
  if (std::norm(z) > p1 * p2 + 1e-10) {
    throw ValidationError("MetastableManifoldState: |z|^2 exceeds p1 p2");
  }
}

}  // namespace metastab
