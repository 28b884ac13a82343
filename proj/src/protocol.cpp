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


#include "metastab/protocol.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace metastab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void ProtocolSettings::validate() const {
  if (!(std::isfinite(t_e) && t_e > 0.0)) throw ArgumentError("protocol: t_e must be > 0");
  if (!(std::isfinite(t_f) && t_f > t_e)) {
    throw ArgumentError("protocol: t_f (" + fmt(t_f) + ") must exceed t_e (" + fmt(t_e) + ")");
  }
  if (n_error < 2) throw ArgumentError("protocol: n_error must be >= 2");
  if (n_recovery < 2) throw ArgumentError("protocol: n_recovery must be >= 2");
  if (!(first_offset > 0.0 && first_offset < t_f - t_e)) {
    throw ArgumentError("protocol: first_offset must lie in (0, t_f - t_e)");
  }
  if (!(refine_tol > 0.0)) throw ArgumentError("protocol: refine_tol must be > 0");
  if (m < 1) throw ArgumentError("protocol: m must be >= 1");
}

ProtocolSpec make_protocol_spec(const ModelParams& params, ErrorKind kind, double rate,
                                const ProtocolSettings& settings, const EvolveOptions& evolve) {
  settings.validate();
  LindbladModel model = build_model(params);
  ErrorChannel error = error_channel(kind, rate, hilbert_dim(params));
  const std::string_view name =
      settings.initial_state.empty() ? default_initial_state(params) : settings.initial_state;
  DensityMatrix rho0 = DensityMatrix::pure(initial_state(params, name));
  Operator leak = dfs_projector(params);
  return ProtocolSpec{std::move(model), std::move(error), std::move(rho0), std::move(leak),
                      settings,         evolve,           nullptr};
}

ProtocolResult run_protocol(const ProtocolSpec& spec) {
  const ProtocolSettings& s = spec.settings;
  s.validate();
  const Index hdim = spec.model.hdim();
  if (spec.rho0.dim() != hdim || spec.leakage.dim() != hdim ||
      spec.error.jumps.front().op.dim() != hdim) {
    throw ArgumentError("run_protocol: model, error channel, state and projector dimensions differ");
  }
  const Superoperator l0 = build_superoperator(spec.model);
  const Superoperator l1 = l0 + spec.error.superoperator();
  const Propagator during(l1, spec.evolve);
  const Propagator after(l0, spec.evolve, spec.model_spectrum);

  ProtocolResult r;
  r.t_e = s.t_e;
  r.warnings = spec.model.warnings;
  const FidelityReference fid(spec.rho0);
  auto measure = [&](const CVector& v, double& f, double& p) {
    const DensityMatrix rho = to_density(v, hdim);
    f = fid(rho.op());
    p = expectation(spec.leakage, rho).real();
  };

  // Phase 1: [0, t_e] under L0 + L'.
  const auto t1 = linspace(0.0, s.t_e, s.n_error);
  const auto v1 = during.propagate(vectorize(spec.rho0.op()), t1);
  r.error_method = to_string(during.last_method());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    double f = 0.0, p = 0.0;
    measure(v1[i], f, p);
    r.times.push_back(t1[i]);
    r.fidelity.push_back(f);
    r.leakage.push_back(p);
  }
  const CVector rho_te = v1.back();
  r.fidelity_at_t_e = r.fidelity.back();

  // Phase 2: (t_e, t_f] under L0.
  const double span = s.t_f - s.t_e;
  std::vector<double> offsets = s.recovery_spacing == Spacing::Logarithmic
                                    ? logspace(s.first_offset, span, s.n_recovery)
                                    : linspace(0.0, span, s.n_recovery + 1);
  if (s.recovery_spacing == Spacing::Linear) offsets.erase(offsets.begin());
  const auto v2 = after.propagate(rho_te, offsets);
  r.recovery_method = to_string(after.last_method());
  const std::size_t first2 = r.times.size();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    double f = 0.0, p = 0.0;
    measure(v2[i], f, p);
    r.times.push_back(s.t_e + offsets[i]);
    r.fidelity.push_back(f);
    r.leakage.push_back(p);
  }

  if (after.has_spectrum()) {
    try {
      r.window = metastable_window(after.spectrum(), s.m);
      if (!(s.t_e < r.window->window)) {
        r.warnings.push_back("t_e = " + fmt(s.t_e) + " is not below the metastable window " +
                             fmt(r.window->window) + " at m = " + std::to_string(s.m));
      }
    } catch (const IllPosedWindowError& e) {
      r.warnings.push_back(e.what());
    }
  }

  // First global maximizer on the grid, then golden-section refinement on
  // the bracketing interval.
  std::size_t best = first2;
  for (std::size_t i = first2; i < r.times.size(); ++i) {
    if (r.fidelity[i] > r.fidelity[best]) best = i;
  }
  auto fidelity_at = [&](double offset, double* leak) {
    double f = 0.0, p = 0.0;
    measure(after.propagate(rho_te, offset), f, p);
    if (leak != nullptr) *leak = p;
    return f;
  };
  double lo = best == first2 ? 0.0 : r.times[best - 1] - s.t_e;
  double hi = best + 1 < r.times.size() ? r.times[best + 1] - s.t_e : span;
  double t_best = r.times[best] - s.t_e;
  double f_best = r.fidelity[best];
  {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = fidelity_at(c, nullptr), fd = fidelity_at(d, nullptr);
    while (b - a > s.refine_tol) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = fidelity_at(c, nullptr);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = fidelity_at(d, nullptr);
      }
    }
    const double tm = fc >= fd ? c : d;
    const double fm = std::max(fc, fd);
    if (fm > f_best && tm > 0.0) {
      t_best = tm;
      f_best = fm;
    }
  }
  if (f_best < r.fidelity_at_t_e - 1e-12) {
    // Fidelity only falls after the error: the supremum is approached as t -> t_e+.
    r.boundary_maximum = true;
    double off = std::min(t_best, s.first_offset);
    for (int k = 0; k < 80 && f_best < r.fidelity_at_t_e - 1e-12; ++k) {
      off *= 0.5;
      t_best = off;
      f_best = fidelity_at(off, nullptr);
    }
  }
  double leak = 0.0;
  r.f_max = fidelity_at(t_best, &leak);
  r.t_r = s.t_e + t_best;
  r.residual_leakage = leak;
  return r;
}

ConvergenceReport check_truncation(const ModelParams& params, ErrorKind kind, double rate,
                                   const ProtocolSettings& settings, const ProtocolResult& result,
                                   const EvolveOptions& evolve) {
  const auto* k = std::get_if<KerrParams>(&params);
  if (k == nullptr) throw ArgumentError("check_truncation: only Kerr models have a Fock cutoff");
  ConvergenceReport c;
  c.n_trunc = k->n_trunc;
  c.n_trunc_check = k->n_trunc + 5;
  const ModelParams bigger = with_parameter(params, "n_trunc", static_cast<double>(c.n_trunc_check));
  const ProtocolResult r2 = run_protocol(make_protocol_spec(bigger, kind, rate, settings, evolve));
  c.max_shift = std::max({std::abs(r2.t_r - result.t_r), std::abs(r2.f_max - result.f_max),
                          std::abs(r2.residual_leakage - result.residual_leakage)});
  c.converged = c.max_shift < 1e-5;
  return c;
}

SweepMetric parse_sweep_metric(std::string_view name) {
  if (name == "window") return SweepMetric::Window;
  if (name == "t_r") return SweepMetric::RecoveryTime;
  if (name == "f_max") return SweepMetric::PeakFidelity;
  if (name == "residual_leakage") return SweepMetric::ResidualLeakage;
  throw ArgumentError("unknown sweep metric '" + std::string(name) +
                      "' (expected window, t_r, f_max, residual_leakage)");
}

std::string_view to_string(SweepMetric metric) {
  switch (metric) {
    case SweepMetric::Window: return "window";
    case SweepMetric::RecoveryTime: return "t_r";
    case SweepMetric::PeakFidelity: return "f_max";
    case SweepMetric::ResidualLeakage: return "residual_leakage";
  }
  return "window";
}

namespace {

void validate_axis(const SweepAxis& axis, const SweepSpec& spec) {
  if (axis.values.empty()) throw ArgumentError("sweep axis '" + axis.name + "' has no values");
  if (axis.name != "rate" && !has_parameter(spec.base, axis.name)) {
    throw ArgumentError("sweep axis '" + axis.name + "' is not a parameter of model " +
                        std::string(model_kind_name(spec.base)));
  }
  if (axis.name == "rate" && !spec.error_kind) {
    throw ArgumentError("sweep axis 'rate' needs an error channel");
  }
  bool up = true, down = true;
  for (std::size_t i = 1; i < axis.values.size(); ++i) {
    up = up && axis.values[i] > axis.values[i - 1];
    down = down && axis.values[i] < axis.values[i - 1];
  }
  if (!up && !down) throw ArgumentError("sweep axis '" + axis.name + "' must be strictly monotone");
}

double sweep_point(const SweepSpec& spec, double v1, double v2) {
  ModelParams p = spec.base;
  double rate = spec.error_rate;
  for (const auto& [name, v] : {std::pair{spec.axis1.name, v1}, std::pair{spec.axis2.name, v2}}) {
    if (name == "rate") {
      rate = v;
    } else {
      p = with_parameter(p, name, v);
    }
  }
  if (spec.metric == SweepMetric::Window) {
    return metastable_window(spectrum(build_superoperator(build_model(p)), spec.evolve.spectrum), spec.m)
        .window;
  }
  ProtocolSettings settings = spec.protocol;
  settings.m = spec.m;
  const ProtocolResult r = run_protocol(make_protocol_spec(p, *spec.error_kind, rate, settings, spec.evolve));
  switch (spec.metric) {
    case SweepMetric::RecoveryTime: return r.t_r;
    case SweepMetric::PeakFidelity: return r.f_max;
    case SweepMetric::ResidualLeakage: return r.residual_leakage;
    case SweepMetric::Window: break;
  }
  return kNaN;
}

}  // namespace

void SweepSpec::validate() const {
  if (axis1.name == axis2.name) throw ArgumentError("sweep axes must differ");
  validate_axis(axis1, *this);
  validate_axis(axis2, *this);
  if (metric != SweepMetric::Window) {
    if (!error_kind) throw ArgumentError("sweep metric '" + std::string(to_string(metric)) + "' needs an error channel");
    protocol.validate();
  }
  if (m < 1) throw ArgumentError("sweep: m must be >= 1");
  if (jobs < 0) throw ArgumentError("sweep: jobs must be >= 0");
}

const SweepPoint& SweepResult::at(std::size_t i1, std::size_t i2) const {
  return points.at(i1 * n2 + i2);
}

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult r;
  r.axis1 = spec.axis1.name;
  r.axis2 = spec.axis2.name;
  r.metric = spec.metric;
  const std::size_t n1 = spec.axis1.values.size();
  r.n2 = spec.axis2.values.size();
  r.points.resize(n1 * r.n2);
  const int threads = spec.jobs > 0 ? spec.jobs : omp_get_max_threads();
  const auto total = static_cast<long>(r.points.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long idx = 0; idx < total; ++idx) {
    const auto i1 = static_cast<std::size_t>(idx) / r.n2;
    const auto i2 = static_cast<std::size_t>(idx) % r.n2;
    SweepPoint& pt = r.points[static_cast<std::size_t>(idx)];
    pt.axis1 = spec.axis1.values[i1];
    pt.axis2 = spec.axis2.values[i2];
    try {
      pt.value = sweep_point(spec, pt.axis1, pt.axis2);
    } catch (const std::exception& e) {
      pt.value = kNaN;
      pt.error = e.what();
    }
  }
  for (const auto& pt : r.points) r.failures += pt.error.empty() ? 0 : 1;
  return r;
}

CrossingReport crossing_report(const KerrParams& base, std::span<const double> kappa1s,
                               std::span<const Index> ms, const SpectrumOptions& options, int jobs) {
  if (ms.empty()) throw ArgumentError("crossing_report: no manifold sizes given");
  for (std::size_t i = 0; i < kappa1s.size(); ++i) {
    if (!(kappa1s[i] > 0.0) || (i > 0 && !(kappa1s[i] > kappa1s[i - 1]))) {
      throw ArgumentError("crossing_report: kappa1 values must be positive and ascending");
    }
  }
  base.validate();
  CrossingReport rep;
  rep.ms.assign(ms.begin(), ms.end());
  rep.rows.resize(kappa1s.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const auto total = static_cast<long>(kappa1s.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < total; ++i) {
    CrossingRow& row = rep.rows[static_cast<std::size_t>(i)];
    row.kappa1 = kappa1s[static_cast<std::size_t>(i)];
    row.windows.assign(ms.size(), kNaN);
    row.notes.assign(ms.size(), "");
    KerrParams p = base;
    p.kappa1 = row.kappa1;
    try {
      const Spectrum spec = spectrum(build_superoperator(kerr_model(p)), options);
      for (std::size_t j = 0; j < ms.size(); ++j) {
        try {
          row.windows[j] = metastable_window(spec, ms[j]).window;
        } catch (const Error& e) {
          row.notes[j] = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (auto& n : row.notes) n = e.what();
    }
  }
  return rep;
}

}  // namespace metastab
