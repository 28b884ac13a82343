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


// Error-recovery protocol: evolve under L0 + L' up to t_e, then under L0 up
// to t_f, tracking fidelity to the initial state and leakage out of the
// protected manifold. Parameter sweeps and the quantum/classical crossing
// table are built on top.

#pragma once

#include "metastab/core.hpp"
#include "metastab/dynamics.hpp"
#include "metastab/liouville.hpp"
#include "metastab/models.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metastab {

struct ProtocolSettings {
  double t_e = 1.0;
  double t_f = 1000.0;
  Index n_error = 50;
  Index n_recovery = 400;
  Spacing recovery_spacing = Spacing::Logarithmic;
  // First post-error grid point sits at t_e + first_offset.
  double first_offset = 1e-3;
  double refine_tol = 1e-3;
  // Manifold size for the t_e versus window check.
  Index m = 4;
  // Empty selects default_initial_state().
  std::string initial_state;

  void validate() const;
};

struct ProtocolSpec {
  LindbladModel model;
  ErrorChannel error;
  DensityMatrix rho0;
  Operator leakage;
  ProtocolSettings settings;
  EvolveOptions evolve;
  // Optional precomputed spectrum of the unperturbed generator.
  std::shared_ptr<const Spectrum> model_spectrum;
};

ProtocolSpec make_protocol_spec(const ModelParams& params, ErrorKind kind, double rate,
                                const ProtocolSettings& settings, const EvolveOptions& evolve = {});

struct ProtocolResult {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> leakage;
  double t_e = 0.0;
  double t_r = 0.0;
  double f_max = 0.0;
  double residual_leakage = 0.0;
  double fidelity_at_t_e = 0.0;
  // The maximum sits at t -> t_e+ (fidelity only decreases after the error).
  bool boundary_maximum = false;
  std::optional<MetastabilityReport> window;
  std::string error_method;
  std::string recovery_method;
  std::vector<std::string> warnings;
};

ProtocolResult run_protocol(const ProtocolSpec& spec);

// Re-runs a Kerr protocol at n_trunc + 5 and reports the largest change of
// t_r, f_max and residual leakage.
struct ConvergenceReport {
  Index n_trunc = 0;
  Index n_trunc_check = 0;
  double max_shift = 0.0;
  bool converged = false;  // max_shift < 1e-5
};
ConvergenceReport check_truncation(const ModelParams& params, ErrorKind kind, double rate,
                                   const ProtocolSettings& settings, const ProtocolResult& result,
                                   const EvolveOptions& evolve = {});

enum class SweepMetric { Window, RecoveryTime, PeakFidelity, ResidualLeakage };

SweepMetric parse_sweep_metric(std::string_view name);
std::string_view to_string(SweepMetric metric);

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepSpec {
  ModelParams base;
  SweepAxis axis1;
  SweepAxis axis2;
  SweepMetric metric = SweepMetric::Window;
  Index m = 4;
  // Needed for protocol metrics; the axis name "rate" sweeps error_rate.
  std::optional<ErrorKind> error_kind;
  double error_rate = 1.0;
  ProtocolSettings protocol;
  EvolveOptions evolve;
  // 0 lets OpenMP choose.
  int jobs = 0;

  void validate() const;
};

struct SweepPoint {
  double axis1 = 0.0;
  double axis2 = 0.0;
  double value = 0.0;  // NaN on failure
  std::string error;
};

struct SweepResult {
  std::string axis1;
  std::string axis2;
  SweepMetric metric = SweepMetric::Window;
  // axis1-major order, independent of scheduling.
  std::vector<SweepPoint> points;
  Index failures = 0;

  const SweepPoint& at(std::size_t i1, std::size_t i2) const;
  std::size_t n2 = 0;
};

SweepResult sweep(const SweepSpec& spec);

struct CrossingRow {
  double kappa1 = 0.0;
  std::vector<double> windows;  // one per requested m, NaN when ill-posed
  std::vector<std::string> notes;
};

struct CrossingReport {
  std::vector<Index> ms;
  std::vector<CrossingRow> rows;
};

CrossingReport crossing_report(const KerrParams& base, std::span<const double> kappa1s,
                               std::span<const Index> ms, const SpectrumOptions& options = {},
                               int jobs = 0);

}  // namespace metastab
