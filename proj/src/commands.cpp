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


#include "metastab/cli.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace metastab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    row_strings(header);
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format_number(v);
      first = false;
    }
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
    out_ << '\n';
  }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// NaN is not representable in JSON.
json number_or_null(double v) { return std::isfinite(v) || std::isinf(v) ? json(v) : json(nullptr); }

json window_json(const MetastabilityReport& r) {
  return {{"m", r.m},
          {"tau_fast", r.tau_fast},
          {"tau_slow", std::isinf(r.tau_slow) ? json("inf") : json(r.tau_slow)},
          {"window", std::isinf(r.window) ? json("inf") : json(r.window)},
          {"gap_ratio", r.gap_ratio}};
}

struct Context {
  const RunConfig& config;
  fs::path dir;
  bool csv;
  bool json_out;
  int jobs;
  std::ostream& log;
  json summary = json::object();
};

void run_spectrum(Context& ctx) {
  const LindbladModel model = build_model(ctx.config.model);
  for (const auto& w : model.warnings) ctx.log << "warning: " << w << '\n';
  const Spectrum spec = spectrum(build_superoperator(model), evolve_options(ctx.config).spectrum);
  const Index m = ctx.config.numerics.m;
  if (ctx.csv) {
    CsvWriter w(ctx.dir / "eigenvalues.csv", {"re", "im"});
    for (Index k = 0; k < spec.size(); ++k) w.row({spec.eigenvalue(k).real(), spec.eigenvalue(k).imag()});
  }
  json s;
  s["hdim"] = spec.hdim();
  s["eigenvalue_count"] = spec.size();
  s["condition_number"] = spec.condition_number();
  s["left_fallback"] = spec.used_left_fallback();
  s["biorthogonality_error"] = spec.biorthogonality_error();
  try {
    s["window"] = window_json(metastable_window(spec, m));
  } catch (const IllPosedWindowError& e) {
    s["window"] = nullptr;
    s["window_error"] = e.what();
  }
  const Index m_max = std::min<Index>(8, spec.size() - 1);
  json gaps = json::array();
  if (m_max >= 2) {
    for (const auto& g : detect_gap(spec, m_max)) gaps.push_back({{"m", g.m}, {"ratio", g.ratio}});
  }
  s["gap_candidates"] = gaps;
  s["warnings"] = model.warnings;
  ctx.summary = s;
  if (ctx.json_out) {
    json eig = json::array();
    for (Index k = 0; k < spec.size(); ++k) {
      eig.push_back({{"re", spec.eigenvalue(k).real()}, {"im", spec.eigenvalue(k).imag()}});
    }
    write_json(ctx.dir / "spectrum.json", {{"eigenvalues", eig}, {"report", s}});
  }
}

void run_evolve(Context& ctx) {
  const EvolveConfig& ec = *ctx.config.evolve;
  const LindbladModel model = build_model(ctx.config.model);
  for (const auto& w : model.warnings) ctx.log << "warning: " << w << '\n';
  const DensityMatrix rho0 = DensityMatrix::pure(initial_state(ctx.config.model, ec.initial_state));
  const auto times = ec.grid.points();
  const Propagator prop(build_superoperator(model), evolve_options(ctx.config));
  Trajectory traj = evolve(prop, rho0, times);
  const LabeledOperator leak{"leakage", dfs_projector(ctx.config.model)};
  observe(traj, std::span<const LabeledOperator>(&leak, 1), rho0);
  const auto fid = traj.real_series("fidelity");
  const auto lk = traj.real_series("leakage");
  std::vector<double> purity;
  for (const auto& rho : traj.states) purity.push_back(rho.purity());
  if (ctx.csv) {
    CsvWriter w(ctx.dir / "trajectory.csv", {"t", "fidelity", "leakage", "purity"});
    for (std::size_t i = 0; i < times.size(); ++i) w.row({times[i], fid[i], lk[i], purity[i]});
  }
  ctx.summary = {{"method", std::string(to_string(prop.last_method()))},
                 {"final_fidelity", fid.back()},
                 {"final_leakage", lk.back()},
                 {"final_purity", purity.back()},
                 {"warnings", model.warnings}};
  if (ctx.json_out) {
    write_json(ctx.dir / "trajectory.json",
               {{"t", times}, {"fidelity", fid}, {"leakage", lk}, {"purity", purity}});
  }
}

json protocol_summary(const ProtocolResult& r) {
  json s = {{"t_e", r.t_e},
            {"t_r", r.t_r},
            {"f_max", r.f_max},
            {"residual_leakage", r.residual_leakage},
            {"fidelity_at_t_e", r.fidelity_at_t_e},
            {"boundary_maximum", r.boundary_maximum},
            {"error_method", r.error_method},
            {"recovery_method", r.recovery_method},
            {"warnings", r.warnings}};
  s["window"] = r.window ? window_json(*r.window) : json(nullptr);
  return s;
}

void run_protocol_cmd(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto opts = evolve_options(c);
  const ProtocolResult r =
      run_protocol(make_protocol_spec(c.model, c.error->kind, c.error->rate, *c.protocol, opts));
  for (const auto& w : r.warnings) ctx.log << "warning: " << w << '\n';
  if (ctx.csv) {
    CsvWriter w(ctx.dir / "trajectory.csv", {"t", "fidelity", "leakage"});
    for (std::size_t i = 0; i < r.times.size(); ++i) w.row({r.times[i], r.fidelity[i], r.leakage[i]});
  }
  json s = protocol_summary(r);
  if (std::holds_alternative<KerrParams>(c.model)) {
    s["leakage_observable"] = "cat-manifold projector at the unperturbed alpha (extension)";
    if (c.numerics.convergence_check) {
      const ConvergenceReport conv =
          check_truncation(c.model, c.error->kind, c.error->rate, *c.protocol, r, opts);
      s["convergence"] = {{"n_trunc", conv.n_trunc},
                          {"n_trunc_check", conv.n_trunc_check},
                          {"max_shift", conv.max_shift},
                          {"converged", conv.converged}};
      if (!conv.converged) {
        ctx.log << "warning: truncation shift " << conv.max_shift << " exceeds 1e-5\n";
      }
    }
  }
  ctx.summary = s;
  if (ctx.json_out) {
    write_json(ctx.dir / "trajectory.json",
               {{"t", r.times}, {"fidelity", r.fidelity}, {"leakage", r.leakage}});
  }
}

void run_sweep_cmd(Context& ctx) {
  const RunConfig& c = ctx.config;
  const SweepConfig& sc = *c.sweep;
  SweepSpec spec{c.model,
                 sc.axis1,
                 sc.axis2,
                 sc.metric,
                 c.numerics.m,
                 c.error ? std::optional(c.error->kind) : std::nullopt,
                 c.error ? c.error->rate : 1.0,
                 c.protocol.value_or(ProtocolSettings{}),
                 evolve_options(c),
                 ctx.jobs};
  const SweepResult r = sweep(spec);
  if (ctx.csv) {
    CsvWriter w(ctx.dir / "sweep.csv", {"axis1", "axis2", "metric"});
    for (const auto& p : r.points) w.row({p.axis1, p.axis2, p.value});
  }
  json failures = json::array();
  for (const auto& p : r.points) {
    if (!p.error.empty()) failures.push_back({{"axis1", p.axis1}, {"axis2", p.axis2}, {"reason", p.error}});
  }
  ctx.summary = {{"axis1", r.axis1},
                 {"axis2", r.axis2},
                 {"metric", std::string(to_string(r.metric))},
                 {"m", c.numerics.m},
                 {"points", r.points.size()},
                 {"failures", r.failures}};
  if (r.failures > 0) ctx.log << "warning: " << r.failures << " sweep points failed (see sweep.json)\n";
  if (ctx.json_out) {
    json values = json::array();
    for (const auto& p : r.points) values.push_back(number_or_null(p.value));
    write_json(ctx.dir / "sweep.json", {{"axis1", {{"name", r.axis1}, {"values", sc.axis1.values}}},
                                        {"axis2", {{"name", r.axis2}, {"values", sc.axis2.values}}},
                                        {"metric", std::string(to_string(r.metric))},
                                        {"order", "axis1-major"},
                                        {"values", values},
                                        {"failures", failures},
                                        {"spec", to_json(c)}});
  }
}

void run_wigner_cmd(Context& ctx) {
  const WignerConfig& wc = *ctx.config.wigner;
  const LindbladModel model = build_model(ctx.config.model);
  for (const auto& w : model.warnings) ctx.log << "warning: " << w << '\n';
  DensityMatrix rho = DensityMatrix::pure(initial_state(ctx.config.model, wc.initial_state));
  std::string method = "none";
  if (wc.time > 0.0) {
    const Propagator prop(build_superoperator(model), evolve_options(ctx.config));
    rho = to_density(prop.propagate(vectorize(rho.op()), wc.time), rho.dim());
    method = to_string(prop.last_method());
  }
  const auto xs = linspace(wc.x_min, wc.x_max, wc.nx);
  const auto ps = linspace(wc.p_min, wc.p_max, wc.np);
  const WignerGrid g = wigner(rho, xs, ps);
  if (g.boundary_warning) {
    ctx.log << "warning: |W| reaches " << g.boundary_max << " on the grid boundary; widen the window\n";
  }
  if (ctx.csv) {
    CsvWriter w(ctx.dir / "wigner.csv", {"x", "p", "W"});
    for (Index ix = 0; ix < wc.nx; ++ix) {
      for (Index ip = 0; ip < wc.np; ++ip) {
        w.row({xs[static_cast<std::size_t>(ix)], ps[static_cast<std::size_t>(ip)], g.at(ix, ip)});
      }
    }
  }
  ctx.summary = {{"integral", g.integral()},
                 {"max_imaginary", g.max_imaginary},
                 {"boundary_max", g.boundary_max},
                 {"boundary_warning", g.boundary_warning},
                 {"method", method},
                 {"convention", "W(beta) = (2/pi) Tr[rho D(beta) Pi D(beta)^dagger], beta = x + i p"}};
  if (ctx.json_out) {
    std::vector<std::vector<double>> rows;
    for (Index ip = 0; ip < wc.np; ++ip) {
      std::vector<double> row;
      for (Index ix = 0; ix < wc.nx; ++ix) row.push_back(g.at(ix, ip));
      rows.push_back(std::move(row));
    }
    write_json(ctx.dir / "wigner.json", {{"xs", xs}, {"ps", ps}, {"values", rows}, {"summary", ctx.summary}});
  }
}

void run_crossing_cmd(Context& ctx) {
  const CrossingConfig& cc = *ctx.config.crossing;
  const auto& base = std::get<KerrParams>(ctx.config.model);
  const CrossingReport rep =
      crossing_report(base, cc.kappa1, cc.ms, evolve_options(ctx.config).spectrum, ctx.jobs);
  std::vector<std::string> header{"kappa1"};
  for (Index m : rep.ms) header.push_back("window_m" + std::to_string(m));
  if (ctx.csv) {
    CsvWriter w(ctx.dir / "crossing.csv", header);
    for (const auto& row : rep.rows) {
      std::vector<double> v{row.kappa1};
      v.insert(v.end(), row.windows.begin(), row.windows.end());
      w.row(v);
    }
  }
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json r = {{"kappa1", row.kappa1}};
    for (std::size_t j = 0; j < rep.ms.size(); ++j) {
      r[header[j + 1]] = number_or_null(row.windows[j]);
      if (!row.notes[j].empty()) r[header[j + 1] + "_note"] = row.notes[j];
    }
    rows.push_back(r);
  }
  ctx.summary = {{"ms", rep.ms}, {"rows", rows}};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

void run(Command command, const RunConfig& config, const RunOptions& options, std::ostream& log) {
  RunConfig resolved = config;
  if (options.out_dir) resolved.output.directory = *options.out_dir;
  if (options.formats) {
    resolved.output.csv = resolved.output.json = false;
    for (const auto& f : *options.formats) {
      if (f == "csv") {
        resolved.output.csv = true;
      } else if (f == "json") {
        resolved.output.json = true;
      } else {
        throw ConfigError("--format: entries must be csv or json (got '" + f + "')");
      }
    }
  }
  for (const auto& w : check_dispatch(resolved, command)) log << "warning: " << w << '\n';

  const fs::path dir(resolved.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output.directory: cannot create '" + dir.string() + "'");
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  Context ctx{resolved, dir, resolved.output.csv, resolved.output.json,
              options.jobs > 0 ? options.jobs : omp_get_num_procs(), log};
  switch (command) {
    case Command::Spectrum: run_spectrum(ctx); break;
    case Command::Evolve: run_evolve(ctx); break;
    case Command::Protocol: run_protocol_cmd(ctx); break;
    case Command::Sweep: run_sweep_cmd(ctx); break;
    case Command::Wigner: run_wigner_cmd(ctx); break;
    case Command::Crossing: run_crossing_cmd(ctx); break;
  }
  if (resolved.output.json) write_json(dir / "summary.json", ctx.summary);

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest = to_json(resolved);
  manifest["manifest"] = {{"tool", "metastab"},
                          {"version", std::string(kToolVersion)},
                          {"subcommand", std::string(to_string(command))},
                          {"started_at", started_at},
                          {"wall_clock_seconds", wall},
                          {"jobs", ctx.jobs}};
  write_json(dir / "manifest.json", manifest);
}

int main(int argc, char** argv) {
  CLI::App app{"Metastability analysis of open quantum systems"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::string formats;
  int jobs = 0;
  for (const char* name : {"spectrum", "evolve", "protocol", "sweep", "wigner", "crossing"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--jobs", jobs, "worker threads for sweeps (default: logical processors)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", formats, "comma-separated subset of csv,json");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string sub_name = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("--config: cannot read '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const RunConfig config = parse_config(buf.str());
    RunOptions opts;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    if (!formats.empty()) {
      std::vector<std::string> list;
      std::stringstream fs_(formats);
      for (std::string item; std::getline(fs_, item, ',');) list.push_back(item);
      opts.formats = list;
    }
    opts.jobs = jobs;
    run(parse_command(sub_name), config, opts, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace metastab::cli
