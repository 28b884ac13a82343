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


// Random fixtures shared by the unit tests.

#pragma once

#include "metastab/models.hpp"
#include "metastab/qops.hpp"

#include <random>

namespace metastab::testing {

inline CMatrix random_matrix(std::mt19937& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  CMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = Complex(g(rng), g(rng));
  }
  return a;
}

inline DensityMatrix random_density(std::mt19937& rng, Index dim, Index rank) {
  const CMatrix a = random_matrix(rng, dim, rank);
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix::hermitized(Operator(rho));
}

inline LindbladModel random_model(std::mt19937& rng, Index dim, int jumps, double scale = 1.0) {
  const CMatrix h = random_matrix(rng, dim, dim);
  LindbladModel m;
  m.hamiltonian = Operator(0.5 * scale * (h + h.adjoint()));
  for (int j = 0; j < jumps; ++j) {
    m.jumps.push_back({"J" + std::to_string(j), Operator(0.5 * scale * random_matrix(rng, dim, dim))});
  }
  m.rate_unit = "1";
  return m;
}

}  // namespace metastab::testing
