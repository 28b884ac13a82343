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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace metastab {
namespace {

CVector scalar(Complex v) {
  CVector y(1);
  y(0) = v;
  return y;
}

TEST(Dopri5, ExponentialDecay) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) { dy = -0.7 * y; };
  const std::vector<double> ts{0.0, 0.3, 1.0, 5.0, 20.0};
  IntegratorStats stats;
  const auto ys = integrate_dopri5(rhs, 0.0, scalar(2.0), ts, {}, &stats);
  ASSERT_EQ(ys.size(), ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double exact = 2.0 * std::exp(-0.7 * ts[i]);
    EXPECT_NEAR(std::abs(ys[i](0) - exact), 0.0, 1e-8 * exact + 1e-10) << ts[i];
  }
  EXPECT_GT(stats.accepted, 0);
  EXPECT_GE(stats.rhs_evaluations, 6 * (stats.accepted + stats.rejected));
}

TEST(Dopri5, ComplexRotationKeepsPhase) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) { dy = Complex(0.0, -3.0) * y; };
  std::vector<double> ts;
  for (int i = 0; i <= 50; ++i) ts.push_back(0.2 * i);
  const auto ys = integrate_dopri5(rhs, 0.0, scalar(1.0), ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_LT(std::abs(ys[i](0) - std::exp(Complex(0.0, -3.0 * ts[i]))), 1e-6) << ts[i];
  }
}

TEST(Dopri5, NonlinearLogistic) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) {
    dy = y.array() * (1.0 - y.array());
  };
  const std::vector<double> ts{0.5, 2.0, 8.0};
  const auto ys = integrate_dopri5(rhs, 0.0, scalar(0.1), ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double exact = 1.0 / (1.0 + 9.0 * std::exp(-ts[i]));
    // Global error, a small multiple of the local tolerance.
    EXPECT_NEAR(ys[i](0).real(), exact, 1e-7);
  }
}

TEST(Dopri5, TimeDependentRhsAndNonzeroStart) {
  const RhsFunction rhs = [](double t, const CVector&, CVector& dy) { dy = scalar(std::cos(t)); };
  const std::vector<double> ts{1.0, 1.0, 4.0};
  const auto ys = integrate_dopri5(rhs, 1.0, scalar(std::sin(1.0)), ts);
  EXPECT_NEAR(ys[0](0).real(), std::sin(1.0), 1e-15);
  EXPECT_NEAR(ys[1](0).real(), std::sin(1.0), 1e-15);
  EXPECT_NEAR(ys[2](0).real(), std::sin(4.0), 1e-8);
}

TEST(Dopri5, DenseOutputMatchesDirectStops) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) {
    dy.resize(2);
    dy(0) = y(1);
    dy(1) = -y(0) - 0.1 * y(1);
  };
  CVector y0(2);
  y0 << 1.0, 0.0;
  std::vector<double> dense;
  for (int i = 1; i <= 200; ++i) dense.push_back(0.05 * i);
  const auto a = integrate_dopri5(rhs, 0.0, y0, dense);
  const std::vector<double> last{10.0};
  const auto b = integrate_dopri5(rhs, 0.0, y0, last);
  EXPECT_LT((a.back() - b.back()).norm(), 1e-7);
}

TEST(Dopri5, BlowUpReportsLastGoodTime) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) { dy = y.array().square(); };
  const std::vector<double> ts{2.0};
  try {
    integrate_dopri5(rhs, 0.0, scalar(1.0), ts);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    // The pole of y = 1 / (1 - t) sits at t = 1.
    EXPECT_NEAR(e.last_good_time(), 1.0, 1e-3);
  }
}

TEST(Dopri5, StepBudget) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) { dy = Complex(0.0, -50.0) * y; };
  IntegratorOptions opt;
  opt.max_steps = 10;
  const std::vector<double> ts{100.0};
  EXPECT_THROW(integrate_dopri5(rhs, 0.0, scalar(1.0), ts, opt), IntegrationError);
}

TEST(Dopri5, UnreachableToleranceThrows) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) { dy = Complex(0.0, -1.0) * y; };
  IntegratorOptions opt;
  opt.rtol = 1e-300;
  opt.atol = 1e-300;
  const std::vector<double> ts{1.0};
  EXPECT_THROW(integrate_dopri5(rhs, 0.0, scalar(1.0), ts, opt), IntegrationError);
}

TEST(Dopri5, RejectsBadOutputTimes) {
  const RhsFunction rhs = [](double, const CVector& y, CVector& dy) { dy = y; };
  const std::vector<double> backwards{1.0, 0.5};
  EXPECT_THROW(integrate_dopri5(rhs, 0.0, scalar(1.0), backwards), ArgumentError);
  const std::vector<double> early{-1.0};
  EXPECT_THROW(integrate_dopri5(rhs, 0.0, scalar(1.0), early), ArgumentError);
}

}  // namespace
}  // namespace metastab
