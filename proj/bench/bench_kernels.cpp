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


// Serial reference kernels against their OpenMP versions.

#include "metastab/kernels.hpp"
#include "metastab/models.hpp"
#include "metastab/qops.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace metastab;

struct KerrFixture {
  CMatrix h;
  std::vector<CMatrix> jumps;
};

KerrFixture kerr(Index n) {
  const LindbladModel m = kerr_model({1.0, 2.0, 1.0, 0.01, n});
  KerrFixture f{m.hamiltonian.matrix(), {}};
  for (const auto& j : m.jumps) f.jumps.push_back(j.op.matrix());
  return f;
}

CMatrix random_state(Index n) {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

template <CMatrix (*Build)(const CMatrix&, std::span<const CMatrix>)>
void BM_Liouvillian(benchmark::State& state) {
  const KerrFixture f = kerr(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Build(f.h, f.jumps));
}
BENCHMARK(BM_Liouvillian<kernels::liouvillian_serial>)->Name("liouvillian/serial")->Arg(10)->Arg(20)->Arg(25)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Liouvillian<kernels::liouvillian_omp>)->Name("liouvillian/omp")->Arg(10)->Arg(20)->Arg(25)->Unit(benchmark::kMillisecond);

template <void (*Mv)(const CMatrix&, const CVector&, CVector&)>
void BM_Matvec(benchmark::State& state) {
  const KerrFixture f = kerr(state.range(0));
  const CMatrix a = kernels::liouvillian_omp(f.h, f.jumps);
  const CVector x = CVector::Random(a.cols());
  CVector y(a.rows());
  for (auto _ : state) {
    Mv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_Matvec<kernels::matvec_serial>)->Name("matvec/serial")->Arg(15)->Arg(25)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Matvec<kernels::matvec_omp>)->Name("matvec/omp")->Arg(15)->Arg(25)->Unit(benchmark::kMicrosecond);

template <void (*W)(const CMatrix&, std::span<const double>, std::span<const double>, RMatrix&, RMatrix&)>
void BM_Wigner(benchmark::State& state) {
  const CMatrix rho = random_state(25);
  std::vector<double> axis;
  const Index n = state.range(0);
  for (Index i = 0; i < n; ++i) axis.push_back(-4.0 + 8.0 * static_cast<double>(i) / static_cast<double>(n - 1));
  RMatrix values, imag;
  for (auto _ : state) {
    W(rho, axis, axis, values, imag);
    benchmark::DoNotOptimize(values.data());
  }
}
BENCHMARK(BM_Wigner<kernels::wigner_serial>)->Name("wigner/serial")->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Wigner<kernels::wigner_omp>)->Name("wigner/omp")->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
