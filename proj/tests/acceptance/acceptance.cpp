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


// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "metastab/dynamics.hpp"
#include "metastab/liouville.hpp"
#include "metastab/models.hpp"
#include "metastab/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace metastab;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Report {
 public:
  void add(const std::string& id, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-4s %-34s %s  [%.1fs]\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed_ += o.pass ? 0 : 1;
  }
  int failed() const { return failed_; }

 private:
  int failed_ = 0;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const TwoQubitParams kFig2{0.02, 0.01, 4.0, 1.0};

// True when every level lies strictly between the grid extremes and some
// pair of neighbouring cells brackets it.
bool contours_exist(const SweepResult& r, std::size_t n1, const std::vector<double>& levels,
                    std::string& detail) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const SweepPoint& p : r.points) {
    if (!std::isfinite(p.value)) {
      detail += " non-finite point";
      return false;
    }
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
  }
  detail += "range [" + fmt(lo) + ", " + fmt(hi) + "]";
  bool ok = true;
  for (double level : levels) {
    bool crossed = false;
    for (std::size_t i = 0; i < n1 && !crossed; ++i) {
      for (std::size_t j = 0; j < r.n2 && !crossed; ++j) {
        const double v = r.at(i, j).value;
        if (i + 1 < n1 && (v - level) * (r.at(i + 1, j).value - level) <= 0.0) crossed = true;
        if (j + 1 < r.n2 && (v - level) * (r.at(i, j + 1).value - level) <= 0.0) crossed = true;
      }
    }
    if (!crossed) {
      detail += " missing " + fmt(level);
      ok = false;
    }
  }
  return ok;
}

SweepResult window_grid(const ModelParams& base, SweepAxis a1, SweepAxis a2) {
  SweepSpec sp;
  sp.base = base;
  sp.axis1 = std::move(a1);
  sp.axis2 = std::move(a2);
  sp.metric = SweepMetric::Window;
  return sweep(sp);
}

ProtocolResult fig5_run(double lambda2, Index n_trunc = 25, double kappa1 = 0.04) {
  ProtocolSettings s;
  s.t_e = 0.03;
  s.t_f = 500.0;
  return run_protocol(make_protocol_spec(KerrParams{1.0, lambda2, 1.0, kappa1, n_trunc},
                                         ErrorKind::BosonDephasing, 10.0, s));
}

}  // namespace

int main() {
  Report report;

  report.add("1", "spectral gap, two-qubit", [] {
    const auto t0 = Clock::now();
    const Spectrum s = spectrum(build_superoperator(two_qubit_model(kFig2)));
    const double dt = seconds_since(t0);
    const double ratio = s.eigenvalue(3).real() / s.eigenvalue(4).real();
    const Index best = detect_gap(s, 8).front().m;
    return Outcome{ratio < 0.05 && best == 4 && dt < 1.0,
                   "ratio " + fmt(ratio) + " (< 0.05), best m " + std::to_string(best) + ", " +
                       fmt(dt) + " s (< 1)"};
  });

  report.add("2", "metastable window magnitude", [] {
    const double w = metastable_window(spectrum(build_superoperator(two_qubit_model(kFig2))), 4).window;
    return Outcome{w >= 500.0 && w <= 2000.0, "window " + fmt(w) + " (in [500, 2000])"};
  });

  report.add("3", "exact DFS limit", [] {
    const Spectrum s = spectrum(build_superoperator(two_qubit_model({0.0, 0.0, 4.0, 1.0})));
    int zeros = 0;
    for (Index k = 0; k < s.size(); ++k) zeros += std::abs(s.eigenvalue(k).real()) <= 1e-10 ? 1 : 0;
    return Outcome{zeros == 4, std::to_string(zeros) + " eigenvalues with |Re| <= 1e-10 (== 4)"};
  });

  report.add("4", "phase-flip non-recovery", [] {
    const ProtocolSpec spec = make_protocol_spec(kFig2, ErrorKind::PhaseFlip, 1.0, {});
    const ProtocolResult r = run_protocol(spec);
    const double leak = *std::max_element(r.leakage.begin(), r.leakage.end());
    const MetastabilityReport w = metastable_window(spectrum(build_superoperator(spec.model)), 4);
    // Plateau: mean fidelity over [10 tau', 0.1 tau''].
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      if (r.times[i] >= 10.0 * w.tau_fast && r.times[i] <= 0.1 * w.tau_slow) {
        sum += r.fidelity[i];
        ++count;
      }
    }
    const double plateau = count > 0 ? sum / count : std::nan("");
    const double target = 1.0 / std::sqrt(2.0);
    return Outcome{leak < 0.05 && std::abs(plateau - target) <= 0.03,
                   "max leakage " + fmt(leak) + " (< 0.05), plateau " + fmt(plateau) + " over " +
                       std::to_string(count) + " points (|. - 0.7071| <= 0.03)"};
  });

  report.add("5", "bit-flip / spont. emission recovery", [] {
    bool ok = true;
    std::ostringstream d;
    for (ErrorKind k : {ErrorKind::BitFlip, ErrorKind::SpontaneousEmission}) {
      const ProtocolResult r = run_protocol(make_protocol_spec(kFig2, k, 1.0, {}));
      const double late = r.leakage.back();
      const bool pass = r.f_max > r.fidelity_at_t_e + 0.05 && late >= 1e-4 && late <= 1e-2;
      ok = ok && pass;
      d << to_string(k) << ": f_max " << fmt(r.f_max) << " vs F(t_e) " << fmt(r.fidelity_at_t_e)
        << ", leakage(t_f) " << fmt(late) << "; ";
    }
    return Outcome{ok, d.str()};
  });

  report.add("6", "Kerr dark-state limit", [] {
    const KerrParams p{0.0, 2.0, 1.0, 0.0, 25};
    const Superoperator l = build_superoperator(kerr_model(p));
    const Complex root = std::sqrt(Complex(p.lambda2, 0.0) / Complex(0.0, p.kappa2));
    double worst = 0.0;
    for (Complex a : {root, -root}) {
      const DensityMatrix rho = DensityMatrix::pure(coherent_state(25, a).amplitudes);
      worst = std::max(worst, l.apply(rho.op()).matrix().cwiseAbs().maxCoeff());
    }
    return Outcome{worst <= 1e-6, "residual " + fmt(worst) + " (<= 1e-6)"};
  });

  report.add("7", "Kerr metastability, m = 4", [] {
    const Superoperator l = build_superoperator(kerr_model({1.0, 2.0, 1.0, 0.01, 25}));
    const auto t0 = Clock::now();
    const Spectrum s = spectrum(l);
    const double dt = seconds_since(t0);
    const auto gaps = detect_gap(s, 8);
    return Outcome{gaps.front().m == 4 && dt < 60.0,
                   "best m " + std::to_string(gaps.front().m) + " (ratio " + fmt(gaps.front().ratio) +
                       "), eigensolve " + fmt(dt) + " s (< 60)"};
  });

  report.add("8", "quantum to classical crossing", [] {
    const std::vector<double> k1 = logspace(1e-3, 1.0, 10);
    const std::vector<Index> ms{4, 2};
    const CrossingReport rep = crossing_report({1.0, 4.0, 1.0, 0.0, 25}, k1, ms);
    bool monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      monotone = monotone && rep.rows[i].windows[0] <= rep.rows[i - 1].windows[0] + 1e-9;
    }
    double first_classical = std::nan("");
    for (const CrossingRow& row : rep.rows) {
      if (row.windows[1] > row.windows[0]) {
        first_classical = row.kappa1;
        break;
      }
    }
    return Outcome{monotone && std::isfinite(first_classical),
                   std::string("m=4 window ") + (monotone ? "monotone" : "NOT monotone") + " (" +
                       fmt(rep.rows.front().windows[0]) + " -> " + fmt(rep.rows.back().windows[0]) +
                       "), m=2 dominates from kappa1 = " + fmt(first_classical)};
  });

  report.add("9", "recovery trade-off", [] {
    const ProtocolResult a = fig5_run(3.5);
    const ProtocolResult b = fig5_run(2.0);
    const bool faster = a.t_r < b.t_r;
    const bool lower = a.f_max < b.f_max;
    return Outcome{faster && lower, "Lambda2 3.5: t_r " + fmt(a.t_r) + ", f_max " + fmt(a.f_max) +
                                        "; Lambda2 2.0: t_r " + fmt(b.t_r) + ", f_max " + fmt(b.f_max) +
                                        " (need t_r 3.5 < 2.0 " + (faster ? "ok" : "no") +
                                        ", f_max 3.5 < 2.0 " + (lower ? "ok" : "no") + ")"};
  });

  report.add("10", "numerical hygiene", [] {
    std::mt19937 rng(1234);
    std::normal_distribution<double> g;
    auto random_matrix = [&](Index r, Index c) {
      CMatrix a(r, c);
      for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) a(i, j) = Complex(g(rng), g(rng));
      return a;
    };
    std::vector<std::pair<Superoperator, DensityMatrix>> fixtures;
    for (Index dim : {2, 3, 4, 5}) {
      const CMatrix h = random_matrix(dim, dim);
      std::vector<Operator> jumps{Operator(0.5 * random_matrix(dim, dim)), Operator(0.5 * random_matrix(dim, dim))};
      const CMatrix a = random_matrix(dim, dim);
      CMatrix rho = a * a.adjoint();
      rho /= rho.trace();
      fixtures.emplace_back(build_superoperator(Operator(0.5 * (h + h.adjoint())), jumps),
                            DensityMatrix::hermitized(Operator(rho)));
    }
    const DensityMatrix dfs = DensityMatrix::pure(initial_state(ModelParams{kFig2}, "dfs_plus"));
    fixtures.emplace_back(build_superoperator(two_qubit_model(kFig2)), dfs);
    fixtures.emplace_back(build_superoperator(two_qubit_model(kFig2)) +
                              error_channel(ErrorKind::BitFlip, 1.0, 4).superoperator(),
                          dfs);
    double trace_err = 0.0, min_eig = 1.0, agree = 0.0, biorth = 0.0;
    const std::vector<double> ts = logspace(1e-2, 50.0, 25);
    for (const auto& [l, rho0] : fixtures) {
      EvolveOptions sp, in;
      sp.method = Method::Spectral;
      in.method = Method::Integrator;
      const Trajectory a = evolve(l, rho0, ts, sp);
      const Trajectory b = evolve(l, rho0, ts, in);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        for (const Trajectory* t : {&a, &b}) {
          trace_err = std::max(trace_err, std::abs(t->states[i].op().trace() - 1.0));
          min_eig = std::min(min_eig, t->states[i].min_eigenvalue());
        }
        agree = std::max(agree, (a.states[i].matrix() - b.states[i].matrix()).cwiseAbs().maxCoeff());
      }
      biorth = std::max(biorth, spectrum(l).biorthogonality_error());
    }
    biorth = std::max(biorth, spectrum(build_superoperator(kerr_model({1.0, 2.0, 1.0, 0.01, 25})))
                                  .biorthogonality_error());

    // Truncation convergence 25 -> 30 on the Kerr scalar outputs.
    double shift = 0.0;
    std::string worst;
    auto track = [&](const std::string& name, double a, double b) {
      if (std::abs(a - b) > shift) {
        shift = std::abs(a - b);
        worst = name;
      }
    };
    for (const KerrParams& p : {KerrParams{1.0, 2.0, 1.0, 0.01, 25}, KerrParams{1.0, 4.0, 1.0, 0.01, 25}}) {
      KerrParams q = p;
      q.n_trunc = 30;
      const Spectrum s25 = spectrum(build_superoperator(kerr_model(p)));
      const Spectrum s30 = spectrum(build_superoperator(kerr_model(q)));
      for (Index m : {2, 4}) {
        track("window m=" + std::to_string(m) + " Lambda2=" + fmt(p.lambda2),
              metastable_window(s25, m).window, metastable_window(s30, m).window);
      }
    }
    for (double lambda2 : {3.5, 2.0}) {
      const ProtocolResult a = fig5_run(lambda2, 25);
      const ProtocolResult b = fig5_run(lambda2, 30);
      track("t_r Lambda2=" + fmt(lambda2), a.t_r, b.t_r);
      track("f_max Lambda2=" + fmt(lambda2), a.f_max, b.f_max);
      track("residual Lambda2=" + fmt(lambda2), a.residual_leakage, b.residual_leakage);
    }
    const bool ok = trace_err <= 1e-8 && min_eig >= -1e-8 && agree <= 1e-6 && biorth <= 1e-8 && shift < 1e-5;
    return Outcome{ok, "trace " + fmt(trace_err) + ", min eig " + fmt(min_eig) + ", spectral/integrator " +
                           fmt(agree) + ", biorth " + fmt(biorth) + ", truncation shift " + fmt(shift) +
                           " (" + worst + ")"};
  });

  report.add("11", "Wigner sanity", [] {
    const std::vector<double> origin{0.0};
    const double vac = wigner(DensityMatrix::pure(fock_ket(25, 0)), origin, origin).at(0, 0);
    const KerrParams p{1.0, 4.0, 1.0, 0.01, 25};
    const Complex alpha = alpha_from_params(p);
    const DensityMatrix odd = DensityMatrix::pure(cat_state({alpha, Parity::Odd, 25}));
    const double w_odd = wigner(odd, origin, origin).at(0, 0);
    const std::vector<double> axis = linspace(-6.0, 6.0, 121);
    const double integral = wigner(odd, axis, axis).integral();
    const double two_pi = 2.0 / std::numbers::pi;
    const bool ok = std::abs(vac - two_pi) <= 1e-6 && std::abs(w_odd + two_pi) <= 1e-6 &&
                    std::abs(integral - 1.0) <= 0.02;
    return Outcome{ok, "vacuum " + fmt(vac) + ", odd cat (|alpha| " + fmt(std::abs(alpha)) + ") " + fmt(w_odd) +
                           ", integral " + fmt(integral)};
  });

  report.add("H1b", "heatmap, Omega1 x Omega2", [] {
    const SweepResult r = window_grid(kFig2, {"omega1", logspace(0.005, 0.1, 10)},
                                      {"omega2", logspace(0.005, 0.1, 10)});
    std::string d = "levels {50,100,250,1000}: ";
    return Outcome{contours_exist(r, 10, {50.0, 100.0, 250.0, 1000.0}, d), d};
  });

  report.add("H1c", "heatmap, gamma1 x gamma2", [] {
    const SweepResult r = window_grid(kFig2, {"gamma1", logspace(0.1, 10.0, 10)},
                                      {"gamma2", logspace(0.1, 10.0, 10)});
    std::string d = "levels {50,200}: ";
    return Outcome{contours_exist(r, 10, {50.0, 200.0}, d), d};
  });

  report.add("H3b", "heatmap, kappa1 x Lambda2, K=0.8", [] {
    const SweepResult r = window_grid(KerrParams{0.8, 2.0, 1.0, 0.01, 25}, {"kappa1", logspace(1e-3, 0.3, 4)},
                                      {"lambda2", linspace(0.5, 5.0, 4)});
    std::string d = "levels {5,10,25,50}: ";
    return Outcome{contours_exist(r, 4, {5.0, 10.0, 25.0, 50.0}, d), d};
  });

  report.add("H3c", "heatmap, kappa1 x Lambda2, K=0.001", [] {
    const SweepResult r = window_grid(KerrParams{0.001, 2.0, 1.0, 0.01, 25},
                                      {"kappa1", logspace(1e-3, 0.3, 4)}, {"lambda2", linspace(0.5, 5.0, 4)});
    std::string d = "levels {50,100,250,500}: ";
    return Outcome{contours_exist(r, 4, {50.0, 100.0, 250.0, 500.0}, d), d};
  });

  report.add("H5", "heatmaps t_r and f_max", [] {
    const std::vector<double> k1 = logspace(0.01, 0.1, 3);
    const std::vector<double> l2 = linspace(2.0, 4.0, 3);
    int complete = 0;
    double tr_lo = INFINITY, tr_hi = -INFINITY, f_lo = INFINITY, f_hi = -INFINITY;
    for (double a : k1) {
      for (double b : l2) {
        const ProtocolResult r = fig5_run(b, 25, a);
        if (std::isfinite(r.t_r) && std::isfinite(r.f_max) && !r.boundary_maximum) ++complete;
        tr_lo = std::min(tr_lo, r.t_r);
        tr_hi = std::max(tr_hi, r.t_r);
        f_lo = std::min(f_lo, r.f_max);
        f_hi = std::max(f_hi, r.f_max);
      }
    }
    return Outcome{complete == 9, std::to_string(complete) + "/9 interior maxima, t_r [" + fmt(tr_lo) + ", " +
                                      fmt(tr_hi) + "], f_max [" + fmt(f_lo) + ", " + fmt(f_hi) + "]"};
  });

  std::printf("%d criteria failed\n", report.failed());
  return report.failed() == 0 ? 0 : 1;
}
