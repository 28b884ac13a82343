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

// Data-parallel inner loops. Every kernel has a *_omp version used by the
// library and a *_serial reference kept for tests and benchmarks. Results of
// the parallel kernels do not depend on the thread count.

#pragma once

#include "metastab/core.hpp"

#include <span>

namespace metastab::kernels {

// Column-stacking Liouvillian
//   -i(I(x)H - H^T(x)I) + sum_j [conj(J)(x)J - 1/2 (I(x)J^dag J + (J^dag J)^T(x)I)]
// Serial reference: literal Kronecker products.
CMatrix liouvillian_serial(const CMatrix& hamiltonian, std::span<const CMatrix> jumps);
// Element-wise assembly of the same matrix, parallel over column blocks.
CMatrix liouvillian_omp(const CMatrix& hamiltonian, std::span<const CMatrix> jumps);

// y = A x
void matvec_serial(const CMatrix& a, const CVector& x, CVector& y);
// Row blocks of A distributed over threads.
void matvec_omp(const CMatrix& a, const CVector& x, CVector& y);

// Displaced-parity Wigner function on the grid beta = x + i p:
//   W(beta) = (2/pi) Tr[rho D(beta) Pi D(beta)^dag] = (2/pi) Tr[rho D(2 beta) Pi]
// with exact displacement matrix elements. values(i, j) is W(xs[j], ps[i]);
// imag receives the imaginary residue of the trace.
void wigner_serial(const CMatrix& rho, std::span<const double> xs, std::span<const double> ps,
                   RMatrix& values, RMatrix& imag);
// Grid rows distributed over threads.
void wigner_omp(const CMatrix& rho, std::span<const double> xs, std::span<const double> ps,
                RMatrix& values, RMatrix& imag);

// <m|D(gamma)|n> for m, n < dim (exact, not a truncated exponential).
CMatrix displacement_elements(Index dim, Complex gamma);

}  // namespace metastab::kernels
