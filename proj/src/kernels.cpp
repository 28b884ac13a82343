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

#include "metastab/kernels.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <omp.h>

#include <cmath>
#include <numbers>

namespace metastab::kernels {

CMatrix liouvillian_serial(const CMatrix& hamiltonian, std::span<const CMatrix> jumps) {
  const Index n = hamiltonian.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix out = -kI * (Eigen::kroneckerProduct(id, hamiltonian).eval() -
                       Eigen::kroneckerProduct(hamiltonian.transpose(), id).eval());
  for (const CMatrix& j : jumps) {
    const CMatrix jdj = j.adjoint() * j;
    out += Eigen::kroneckerProduct(j.conjugate(), j).eval();
    out -= 0.5 * (Eigen::kroneckerProduct(id, jdj).eval() +
                  Eigen::kroneckerProduct(jdj.transpose(), id).eval());
  }
  return out;
}

CMatrix liouvillian_omp(const CMatrix& hamiltonian, std::span<const CMatrix> jumps) {
  const Index n = hamiltonian.rows();
  // L = I(x)G + conj(G)(x)I + sum conj(J)(x)J with G = -iH - 1/2 sum J^dag J.
  CMatrix g = -kI * hamiltonian;
  for (const CMatrix& j : jumps) g -= 0.5 * (j.adjoint() * j);
  const CMatrix g_conj = g.conjugate();
  std::vector<CMatrix> j_conj;
  j_conj.reserve(jumps.size());
  for (const CMatrix& j : jumps) j_conj.push_back(j.conjugate());

  const Index big = n * n;
  CMatrix out = CMatrix::Zero(big, big);
  // column (k, l) -> k + l n ; row (i, j) -> i + j n
#pragma omp parallel for schedule(static)
  for (Index l = 0; l < n; ++l) {
    for (Index k = 0; k < n; ++k) {
      auto col = out.col(k + l * n);
      for (Index i = 0; i < n; ++i) col(i + l * n) += g(i, k);
      for (Index j = 0; j < n; ++j) col(k + j * n) += g_conj(j, l);
      for (std::size_t q = 0; q < jumps.size(); ++q) {
        const CMatrix& jm = jumps[q];
        const CMatrix& jc = j_conj[q];
        for (Index j = 0; j < n; ++j) {
          const Complex cjl = jc(j, l);
          if (cjl == Complex{}) continue;
          for (Index i = 0; i < n; ++i) col(i + j * n) += cjl * jm(i, k);
        }
      }
    }
  }
  return out;
}

void matvec_serial(const CMatrix& a, const CVector& x, CVector& y) { y.noalias() = a * x; }

void matvec_omp(const CMatrix& a, const CVector& x, CVector& y) {
  const Index rows = a.rows();
  y.resize(rows);
  constexpr Index kBlock = 64;
  const Index blocks = (rows + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kBlock;
    const Index len = std::min(kBlock, rows - start);
    y.segment(start, len).noalias() = a.middleRows(start, len) * x;
  }
}

CMatrix displacement_elements(Index dim, Complex gamma) {
  // m >= n: sqrt(n!/m!) gamma^{m-n} e^{-|gamma|^2/2} L_n^{(m-n)}(|gamma|^2)
  // m <  n: sqrt(m!/n!) (-conj gamma)^{n-m} e^{-|gamma|^2/2} L_m^{(n-m)}(|gamma|^2)
  const double x = std::norm(gamma);
  const double damp = std::exp(-0.5 * x);
  CMatrix d(dim, dim);
  Complex gpow = 1.0;   // gamma^k / sqrt(k!)
  Complex mgpow = 1.0;  // (-conj gamma)^k / sqrt(k!)
  for (Index k = 0; k < dim; ++k) {
    if (k > 0) {
      const double s = std::sqrt(static_cast<double>(k));
      gpow *= gamma / s;
      mgpow *= -std::conj(gamma) / s;
    }
    double pref = 1.0;  // sqrt(n! k! / (n+k)!)
    double lag_prev = 0.0;
    double lag = 1.0;
    for (Index n = 0; n + k < dim; ++n) {
      if (n == 1) {
        lag_prev = 1.0;
        lag = 1.0 + static_cast<double>(k) - x;
      } else if (n > 1) {
        const double nn = static_cast<double>(n - 1);
        const double next = ((2.0 * nn + 1.0 + k - x) * lag - (nn + k) * lag_prev) / (nn + 1.0);
        lag_prev = lag;
        lag = next;
      }
      if (n > 0) pref *= std::sqrt(static_cast<double>(n) / static_cast<double>(n + k));
      const double common = pref * damp * lag;
      d(n + k, n) = gpow * common;
      if (k > 0) d(n, n + k) = mgpow * common;
    }
  }
  return d;
}

namespace {

void wigner_row(const CMatrix& rho, std::span<const double> xs, double p, Index row,
                RMatrix& values, RMatrix& imag) {
  const Index dim = rho.rows();
  const double scale = 2.0 / std::numbers::pi;
  for (std::size_t c = 0; c < xs.size(); ++c) {
    const Complex beta(xs[c], p);
    const CMatrix d = displacement_elements(dim, 2.0 * beta);
    // Tr[rho D Pi] = sum_{n,m} rho_{nm} D_{mn} (-1)^n
    Complex acc = 0.0;
    for (Index n = 0; n < dim; ++n) {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      acc += sign * rho.row(n).transpose().cwiseProduct(d.col(n)).sum();
    }
    values(row, static_cast<Index>(c)) = scale * acc.real();
    imag(row, static_cast<Index>(c)) = scale * acc.imag();
  }
}

}  // namespace

void wigner_serial(const CMatrix& rho, std::span<const double> xs, std::span<const double> ps,
                   RMatrix& values, RMatrix& imag) {
  const auto rows = static_cast<Index>(ps.size());
  const auto cols = static_cast<Index>(xs.size());
  values.resize(rows, cols);
  imag.resize(rows, cols);
  for (Index r = 0; r < rows; ++r) wigner_row(rho, xs, ps[r], r, values, imag);
}

void wigner_omp(const CMatrix& rho, std::span<const double> xs, std::span<const double> ps,
                RMatrix& values, RMatrix& imag) {
  const auto rows = static_cast<Index>(ps.size());
  const auto cols = static_cast<Index>(xs.size());
  values.resize(rows, cols);
  imag.resize(rows, cols);
#pragma omp parallel for schedule(dynamic)
  for (Index r = 0; r < rows; ++r) wigner_row(rho, xs, ps[r], r, values, imag);
}

}  // namespace metastab::kernels
