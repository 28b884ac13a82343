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


#include "metastab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace metastab {

namespace {

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

double error_norm(const CVector& err, const CVector& y0, const CVector& y1, double rtol,
                  double atol) {
  double acc = 0.0;
  for (Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    acc += std::norm(err(i)) / (sc * sc);
  }
  return std::sqrt(acc / static_cast<double>(std::max<Index>(1, err.size())));
}

}  // namespace

std::vector<CVector> integrate_dopri5(const RhsFunction& rhs, double t0, const CVector& y0,
                                      std::span<const double> output_times,
                                      const IntegratorOptions& options, IntegratorStats* stats) {
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (!(output_times[i] >= t0) || (i > 0 && output_times[i] < output_times[i - 1])) {
      throw ArgumentError("integrate_dopri5: output times must be non-decreasing and >= t0");
    }
  }
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) {
    throw ArgumentError("integrate_dopri5: tolerances must be positive");
  }
  IntegratorStats local;
  IntegratorStats& st = stats != nullptr ? *stats : local;

  std::vector<CVector> out;
  out.reserve(output_times.size());
  std::size_t next = 0;
  while (next < output_times.size() && output_times[next] == t0) {
    out.push_back(y0);
    ++next;
  }
  if (next == output_times.size()) return out;
  const double t_end = output_times.back();

  const Index n = y0.size();
  CVector y = y0, y_new(n), tmp(n), err(n);
  CVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  CVector r1(n), r2(n), r3(n), r4(n), r5(n);
  double t = t0;
  rhs(t, y, k1);
  ++st.rhs_evaluations;

  double h = options.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic (first-order part).
    double dnorm = 0.0, ynorm = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double sc = options.atol + options.rtol * std::abs(y(i));
      dnorm += std::norm(k1(i)) / (sc * sc);
      ynorm += std::norm(y(i)) / (sc * sc);
    }
    dnorm = std::sqrt(dnorm / static_cast<double>(n));
    ynorm = std::sqrt(ynorm / static_cast<double>(n));
    h = (dnorm <= 1e-5 || ynorm <= 1e-5) ? 1e-6 : 0.01 * ynorm / dnorm;
    if (!std::isfinite(h)) h = 1e-6;
  }
  h = std::min(h, t_end - t);

  long steps = 0;
  while (next < output_times.size()) {
    if (++steps > options.max_steps) {
      throw IntegrationError("integrate_dopri5: step budget exhausted at t = " + std::to_string(t), t);
    }
    const double h_min = options.min_step_rel * std::max(1.0, std::abs(t));
    if (!(h >= h_min)) {
      throw IntegrationError("integrate_dopri5: step size underflow at t = " + std::to_string(t), t);
    }
    if (t + h > t_end) h = t_end - t;

    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, y_new, k7);
    st.rhs_evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, y_new, options.rtol, options.atol);
    if (!std::isfinite(en)) {
      ++st.rejected;
      h *= kMinFactor;
      continue;
    }
    const double factor =
        en == 0.0 ? kMaxFactor
                  : std::clamp(kSafety * std::pow(en, -0.2), kMinFactor, kMaxFactor);
    if (en > 1.0) {
      ++st.rejected;
      h *= std::min(1.0, factor);
      continue;
    }
    ++st.accepted;

    // Dense output coefficients on [t, t + h].
    r1 = y;
    r2 = y_new - y;
    r3 = h * k1 - r2;
    r4 = r2 - h * k7 - r3;
    r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    const double t_new = (t_end - (t + h) <= 1e-14 * std::max(1.0, std::abs(t_end))) ? t_end : t + h;
    while (next < output_times.size() && output_times[next] <= t_new) {
      const double theta = (output_times[next] - t) / h;
      const double om = 1.0 - theta;
      if (output_times[next] == t_new) {
        out.push_back(y_new);
      } else {
        out.push_back(r1 + theta * (r2 + om * (r3 + theta * (r4 + om * r5))));
      }
      ++next;
    }
    t = t_new;
    y.swap(y_new);
    k1.swap(k7);
    h *= factor;
  }
  return out;
}

}  // namespace metastab
