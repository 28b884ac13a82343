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


// Explicit Dormand-Prince 5(4) with step-size control and dense output, for
// linear and nonlinear complex ODE systems y' = f(t, y).

#pragma once

#include "metastab/core.hpp"

#include <functional>
#include <span>
#include <vector>

namespace metastab {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  // 0 selects a starting step from the initial derivative.
  double initial_step = 0.0;
  // Smallest accepted step relative to max(1, |t|).
  double min_step_rel = 1e-13;
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

using RhsFunction = std::function<void(double t, const CVector& y, CVector& dydt)>;

// Integrates from (t0, y0) and returns y at every output time. Output times
// must be non-decreasing and >= t0. Throws IntegrationError on step underflow
// or step-budget exhaustion, reporting the last accepted time.
std::vector<CVector> integrate_dopri5(const RhsFunction& rhs, double t0, const CVector& y0,
                                      std::span<const double> output_times,
                                      const IntegratorOptions& options = {},
                                      IntegratorStats* stats = nullptr);

}  // namespace metastab
