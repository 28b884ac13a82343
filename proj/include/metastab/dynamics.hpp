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


// Time evolution under a Liouvillian (mode sum or adaptive integration),
// observable series along trajectories, and Wigner functions.

#pragma once

#include "metastab/core.hpp"
#include "metastab/integrator.hpp"
#include "metastab/liouville.hpp"
#include "metastab/models.hpp"
#include "metastab/qops.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metastab {

enum class Spacing { Linear, Logarithmic };

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  Index n_points = 2;
  Spacing spacing = Spacing::Linear;

  void validate() const;
  std::vector<double> points() const;
};

Spacing parse_spacing(std::string_view name);
std::string_view to_string(Spacing spacing);

// Auto: mode sum when a spectrum is available or hdim <= 8; otherwise the
// integrator, switching to the mode sum when the estimated step count for the
// span exceeds `max_integrator_steps` (0: four times the Liouville dimension,
// roughly where an eigensolve becomes cheaper).
enum class Method { Auto, Spectral, Integrator };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

struct EvolveOptions {
  Method method = Method::Auto;
  IntegratorOptions integrator{};
  SpectrumOptions spectrum{};
  double max_integrator_steps = 0.0;
};

// Maps a vectorized state at t0 to later times under a fixed generator.
class Propagator {
 public:
  Propagator(Superoperator generator, EvolveOptions options = {},
             std::shared_ptr<const Spectrum> spectrum = nullptr);

  const Superoperator& generator() const noexcept { return generator_; }
  // Method resolved for a span of the given length.
  Method resolve(double span) const;
  // Spectrum of the generator, computed on first use.
  const Spectrum& spectrum() const;
  bool has_spectrum() const noexcept { return spectrum_ != nullptr; }

  // States at t0 + offsets (offsets non-decreasing, >= 0).
  std::vector<CVector> propagate(const CVector& vec_rho0, std::span<const double> offsets) const;
  CVector propagate(const CVector& vec_rho0, double offset) const;

  Method last_method() const noexcept { return last_method_; }

 private:
  Superoperator generator_;
  EvolveOptions options_;
  mutable std::shared_ptr<const Spectrum> spectrum_;
  mutable Method last_method_ = Method::Auto;
  double step_scale_;
};

struct Series {
  std::string label;
  std::vector<Complex> values;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<Series> observables;

  const Series& series(std::string_view label) const;
  std::vector<double> real_series(std::string_view label) const;
};

// Hermitized, validated density matrix from a vectorized state.
DensityMatrix to_density(const CVector& vec_rho, Index hdim);

Trajectory evolve(const Propagator& propagator, const DensityMatrix& rho0,
                  std::span<const double> times);
Trajectory evolve(const Superoperator& generator, const DensityMatrix& rho0,
                  std::span<const double> times, const EvolveOptions& options = {});
Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0,
                  std::span<const double> times, const EvolveOptions& options = {});

// Appends <O>_t for every labeled observable and, given a reference state,
// a "fidelity" series. Labels must be unique (including existing series).
void observe(Trajectory& traj, std::span<const LabeledOperator> observables,
             const std::optional<DensityMatrix>& reference = std::nullopt);

struct WignerGrid {
  std::vector<double> xs;
  std::vector<double> ps;
  RMatrix values;  // values(i, j) = W(xs[j], ps[i])
  double max_imaginary = 0.0;
  double boundary_max = 0.0;
  bool boundary_warning = false;  // boundary_max > 1e-3

  double at(Index ix, Index ip) const { return values(ip, ix); }
  // Trapezoid quadrature over the grid.
  double integral() const;
};

// W(beta) = (2/pi) Tr[rho D(beta) Pi D(beta)^dagger], beta = x + i p.
WignerGrid wigner(const DensityMatrix& rho, std::span<const double> xs, std::span<const double> ps);

std::vector<double> linspace(double a, double b, Index n);
std::vector<double> logspace(double a, double b, Index n);

}  // namespace metastab
