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

#include <cmath>
#include <set>
#include <sstream>

namespace metastab::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Reads keys of one JSON object and rejects the ones never asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? "config" : path_) : key_path(key);
    throw ConfigError(where + ": " + what);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) fail(key, "is required");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    return has(key) ? number(key) : fallback;
  }

  Index integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<Index>();
  }
  Index integer(const std::string& key, Index fallback) {
    seen_.insert(key);
    return has(key) ? integer(key) : fallback;
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  Section child(const std::string& key) {
    raw(key);
    return Section(node_.at(key), key_path(key));
  }

  void ignore(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) fail(item.key(), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto guarded(const Section& s, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    s.fail(key, e.what());
  }
}

ModelParams parse_model(Section m, std::optional<Index> numerics_trunc) {
  const std::string kind = m.string("kind");
  ModelParams out;
  if (kind == "two_qubit") {
    TwoQubitParams p;
    p.omega1 = m.number("omega1");
    p.omega2 = m.number("omega2");
    p.gamma1 = m.number("gamma1");
    p.gamma2 = m.number("gamma2");
    if (p.omega1 < 0.0) m.fail("omega1", "must be >= 0 (got " + fmt(p.omega1) + ")");
    if (p.omega2 < 0.0) m.fail("omega2", "must be >= 0 (got " + fmt(p.omega2) + ")");
    if (p.gamma1 <= 0.0) m.fail("gamma1", "must be > 0 (got " + fmt(p.gamma1) + ")");
    if (p.gamma2 <= 0.0) m.fail("gamma2", "must be > 0 (got " + fmt(p.gamma2) + ")");
    if (numerics_trunc) throw ConfigError("numerics.n_trunc: only applies to kerr models");
    out = p;
  } else if (kind == "kerr") {
    KerrParams p;
    p.kerr_K = m.number("K");
    p.lambda2 = m.number("lambda2");
    p.kappa1 = m.number("kappa1", 0.0);
    p.kappa2 = m.number("kappa2", 1.0);
    p.n_trunc = m.integer("n_trunc", numerics_trunc.value_or(25));
    if (numerics_trunc && m.has("n_trunc") && *numerics_trunc != p.n_trunc) {
      throw ConfigError("numerics.n_trunc: conflicts with model.n_trunc");
    }
    if (p.kappa2 <= 0.0) m.fail("kappa2", "must be > 0 (got " + fmt(p.kappa2) + ")");
    if (p.kappa1 < 0.0) m.fail("kappa1", "must be >= 0 (got " + fmt(p.kappa1) + ")");
    if (p.n_trunc < 2) m.fail("n_trunc", "must be >= 2");
    out = p;
  } else {
    m.fail("kind", "must be two_qubit or kerr (got '" + kind + "')");
  }
  m.finish();
  return out;
}

std::vector<double> parse_values(Section& s) {
  std::vector<double> values;
  if (s.has("values")) {
    const json& v = s.raw("values");
    if (!v.is_array() || v.empty()) s.fail("values", "must be a non-empty array of numbers");
    for (const json& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        s.fail("values", "must be a non-empty array of finite numbers");
      }
      values.push_back(x.get<double>());
    }
    for (const char* k : {"min", "max", "n", "spacing"}) {
      if (s.has(k)) s.fail(k, "cannot be combined with values");
    }
  } else {
    const double lo = s.number("min");
    const double hi = s.number("max");
    const Index n = s.integer("n");
    const std::string spacing = s.string("spacing", "linear");
    if (n < 2) s.fail("n", "must be >= 2");
    if (!(hi > lo)) s.fail("max", "must exceed min");
    values = guarded(s, "spacing", [&] {
      return parse_spacing(spacing) == Spacing::Linear ? linspace(lo, hi, n) : logspace(lo, hi, n);
    });
  }
  return values;
}

SweepAxis parse_axis(Section s) {
  SweepAxis a;
  a.name = s.string("name");
  a.values = parse_values(s);
  s.finish();
  return a;
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "spectrum") return Command::Spectrum;
  if (name == "evolve") return Command::Evolve;
  if (name == "protocol") return Command::Protocol;
  if (name == "sweep") return Command::Sweep;
  if (name == "wigner") return Command::Wigner;
  if (name == "crossing") return Command::Crossing;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Spectrum: return "spectrum";
    case Command::Evolve: return "evolve";
    case Command::Protocol: return "protocol";
    case Command::Sweep: return "sweep";
    case Command::Wigner: return "wigner";
    case Command::Crossing: return "crossing";
  }
  return "spectrum";
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON (") + e.what() + ")");
  }
  return parse_config_json(doc);
}

RunConfig parse_config_json(const json& doc) {
  Section root(doc, "");
  const json& schema = root.raw("schema");
  if (!schema.is_number_integer() || schema.get<long>() != 1) root.fail("schema", "must be 1");
  root.ignore("manifest");

  RunConfig cfg;

  std::optional<Index> numerics_trunc;
  if (root.has("numerics")) {
    Section n = root.child("numerics");
    cfg.numerics.rtol = n.number("rtol", 1e-8);
    cfg.numerics.atol = n.number("atol", 1e-10);
    cfg.numerics.m = n.integer("m", 4);
    cfg.numerics.method = guarded(n, "method", [&] { return parse_method(n.string("method", "auto")); });
    cfg.numerics.convergence_check = n.boolean("convergence_check", true);
    if (n.has("n_trunc")) numerics_trunc = n.integer("n_trunc");
    if (!(cfg.numerics.rtol > 0.0)) n.fail("rtol", "must be > 0");
    if (!(cfg.numerics.atol > 0.0)) n.fail("atol", "must be > 0");
    if (cfg.numerics.m < 1) n.fail("m", "must be >= 1");
    n.finish();
  }

  cfg.model = parse_model(root.child("model"), numerics_trunc);
  const bool kerr = std::holds_alternative<KerrParams>(cfg.model);
  const Index hdim = hilbert_dim(cfg.model);

  auto check_state = [&](Section& s, const std::string& key, const std::string& name) {
    guarded(s, key, [&] {
      initial_state(cfg.model, name);
      return 0;
    });
  };

  if (root.has("error")) {
    Section e = root.child("error");
    ErrorConfig ec;
    ec.kind = guarded(e, "kind", [&] { return parse_error_kind(e.string("kind")); });
    ec.rate = e.number("rate");
    if (!(ec.rate > 0.0)) e.fail("rate", "must be > 0 (got " + fmt(ec.rate) + ")");
    guarded(e, "kind", [&] {
      error_channel(ec.kind, ec.rate, hdim);
      return 0;
    });
    e.finish();
    cfg.error = ec;
  }

  if (root.has("protocol")) {
    Section p = root.child("protocol");
    ProtocolSettings s;
    s.t_e = p.number("t_e");
    s.t_f = p.number("t_f");
    s.n_error = p.integer("n_error", 50);
    s.n_recovery = p.integer("n_recovery", 400);
    s.recovery_spacing = guarded(p, "recovery_spacing",
                                 [&] { return parse_spacing(p.string("recovery_spacing", "log")); });
    s.first_offset = p.number("first_offset", 1e-3);
    s.refine_tol = p.number("refine_tol", 1e-3);
    s.initial_state = p.string("initial_state", std::string(default_initial_state(cfg.model)));
    s.m = cfg.numerics.m;
    if (!(s.t_e > 0.0)) p.fail("t_e", "must be > 0");
    if (!(s.t_f > s.t_e)) p.fail("t_f", "must exceed t_e");
    guarded(p, "n_error", [&] {
      s.validate();
      return 0;
    });
    check_state(p, "initial_state", s.initial_state);
    p.finish();
    cfg.protocol = s;
  }

  if (root.has("evolve")) {
    Section e = root.child("evolve");
    EvolveConfig ec;
    ec.grid.t_start = e.number("t_start", 0.0);
    ec.grid.t_end = e.number("t_end");
    ec.grid.n_points = e.integer("n_points", 200);
    ec.grid.spacing = guarded(e, "spacing", [&] { return parse_spacing(e.string("spacing", "linear")); });
    ec.initial_state = e.string("initial_state", std::string(default_initial_state(cfg.model)));
    guarded(e, "t_end", [&] {
      ec.grid.validate();
      return 0;
    });
    check_state(e, "initial_state", ec.initial_state);
    e.finish();
    cfg.evolve = ec;
  }

  if (root.has("wigner")) {
    Section w = root.child("wigner");
    if (!kerr) w.fail("", "needs a kerr model");
    WignerConfig wc;
    wc.x_min = w.number("x_min", -4.0);
    wc.x_max = w.number("x_max", 4.0);
    wc.nx = w.integer("nx", 81);
    wc.p_min = w.number("p_min", -4.0);
    wc.p_max = w.number("p_max", 4.0);
    wc.np = w.integer("np", 81);
    wc.time = w.number("time", 0.0);
    wc.initial_state = w.string("initial_state", std::string(default_initial_state(cfg.model)));
    if (!(wc.x_max > wc.x_min)) w.fail("x_max", "must exceed x_min");
    if (!(wc.p_max > wc.p_min)) w.fail("p_max", "must exceed p_min");
    if (wc.nx < 2) w.fail("nx", "must be >= 2");
    if (wc.np < 2) w.fail("np", "must be >= 2");
    if (wc.time < 0.0) w.fail("time", "must be >= 0");
    check_state(w, "initial_state", wc.initial_state);
    w.finish();
    cfg.wigner = wc;
  }

  if (root.has("sweep")) {
    Section s = root.child("sweep");
    SweepConfig sc;
    const json& axes = s.raw("axes");
    if (!axes.is_array() || axes.size() != 2) s.fail("axes", "must list exactly two axes");
    sc.axis1 = parse_axis(Section(axes[0], s.key_path("axes[0]")));
    sc.axis2 = parse_axis(Section(axes[1], s.key_path("axes[1]")));
    sc.metric = guarded(s, "metric", [&] { return parse_sweep_metric(s.string("metric", "window")); });
    if (s.has("m")) {
      const Index m = s.integer("m");
      if (m != cfg.numerics.m && root.has("numerics") && doc.at("numerics").contains("m")) {
        s.fail("m", "conflicts with numerics.m");
      }
      cfg.numerics.m = m;
      if (cfg.protocol) cfg.protocol->m = m;
    }
    SweepSpec probe{cfg.model, sc.axis1, sc.axis2, sc.metric, cfg.numerics.m,
                    cfg.error ? std::optional(cfg.error->kind) : std::nullopt,
                    cfg.error ? cfg.error->rate : 1.0, cfg.protocol.value_or(ProtocolSettings{}),
                    {}, 0};
    if (sc.metric != SweepMetric::Window && !cfg.protocol) {
      s.fail("metric", "'" + std::string(to_string(sc.metric)) + "' needs a protocol block");
    }
    guarded(s, "axes", [&] {
      probe.validate();
      return 0;
    });
    s.finish();
    cfg.sweep = sc;
  }

  if (root.has("crossing")) {
    Section c = root.child("crossing");
    if (!kerr) c.fail("", "needs a kerr model");
    CrossingConfig cc;
    Section k1 = c.child("kappa1");
    cc.kappa1 = parse_values(k1);
    k1.finish();
    if (c.has("m")) {
      const json& ms = c.raw("m");
      if (!ms.is_array() || ms.empty()) c.fail("m", "must be a non-empty array of integers");
      cc.ms.clear();
      for (const json& v : ms) {
        if (!v.is_number_integer() || v.get<Index>() < 1) c.fail("m", "entries must be integers >= 1");
        cc.ms.push_back(v.get<Index>());
      }
    }
    for (std::size_t i = 0; i < cc.kappa1.size(); ++i) {
      if (!(cc.kappa1[i] > 0.0) || (i > 0 && !(cc.kappa1[i] > cc.kappa1[i - 1]))) {
        c.fail("kappa1", "values must be positive and ascending");
      }
    }
    c.finish();
    cfg.crossing = cc;
  }

  if (root.has("output")) {
    Section o = root.child("output");
    cfg.output.directory = o.string("directory", "out");
    if (o.has("formats")) {
      const json& f = o.raw("formats");
      if (!f.is_array() || f.empty()) o.fail("formats", "must be a non-empty subset of [csv, json]");
      cfg.output.csv = cfg.output.json = false;
      for (const json& v : f) {
        const std::string s = v.is_string() ? v.get<std::string>() : "";
        if (s == "csv") {
          cfg.output.csv = true;
        } else if (s == "json") {
          cfg.output.json = true;
        } else {
          o.fail("formats", "entries must be csv or json");
        }
      }
    }
    o.finish();
  }

  root.finish();
  return cfg;
}

namespace {

json model_json(const ModelParams& p) {
  if (const auto* q = std::get_if<TwoQubitParams>(&p)) {
    return {{"kind", "two_qubit"}, {"omega1", q->omega1}, {"omega2", q->omega2},
            {"gamma1", q->gamma1}, {"gamma2", q->gamma2}};
  }
  const auto& k = std::get<KerrParams>(p);
  return {{"kind", "kerr"},        {"K", k.kerr_K},         {"lambda2", k.lambda2},
          {"kappa1", k.kappa1},    {"kappa2", k.kappa2},    {"n_trunc", k.n_trunc}};
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = 1;
  j["model"] = model_json(c.model);
  if (c.error) j["error"] = {{"kind", std::string(to_string(c.error->kind))}, {"rate", c.error->rate}};
  if (c.protocol) {
    const auto& p = *c.protocol;
    j["protocol"] = {{"t_e", p.t_e},
                     {"t_f", p.t_f},
                     {"n_error", p.n_error},
                     {"n_recovery", p.n_recovery},
                     {"recovery_spacing", std::string(to_string(p.recovery_spacing))},
                     {"first_offset", p.first_offset},
                     {"refine_tol", p.refine_tol},
                     {"initial_state", p.initial_state}};
  }
  if (c.evolve) {
    const auto& e = *c.evolve;
    j["evolve"] = {{"t_start", e.grid.t_start},
                   {"t_end", e.grid.t_end},
                   {"n_points", e.grid.n_points},
                   {"spacing", std::string(to_string(e.grid.spacing))},
                   {"initial_state", e.initial_state}};
  }
  if (c.wigner) {
    const auto& w = *c.wigner;
    j["wigner"] = {{"x_min", w.x_min}, {"x_max", w.x_max}, {"nx", w.nx},
                   {"p_min", w.p_min}, {"p_max", w.p_max}, {"np", w.np},
                   {"time", w.time},   {"initial_state", w.initial_state}};
  }
  if (c.sweep) {
    const auto& s = *c.sweep;
    j["sweep"] = {{"axes", json::array({{{"name", s.axis1.name}, {"values", s.axis1.values}},
                                        {{"name", s.axis2.name}, {"values", s.axis2.values}}})},
                  {"metric", std::string(to_string(s.metric))}};
  }
  if (c.crossing) {
    j["crossing"] = {{"kappa1", {{"values", c.crossing->kappa1}}}, {"m", c.crossing->ms}};
  }
  json formats = json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  j["output"] = {{"directory", c.output.directory}, {"formats", formats}};
  j["numerics"] = {{"rtol", c.numerics.rtol},
                   {"atol", c.numerics.atol},
                   {"m", c.numerics.m},
                   {"method", std::string(to_string(c.numerics.method))},
                   {"convergence_check", c.numerics.convergence_check}};
  return j;
}

EvolveOptions evolve_options(const RunConfig& config) {
  EvolveOptions o;
  o.method = config.numerics.method;
  o.integrator.rtol = config.numerics.rtol;
  o.integrator.atol = config.numerics.atol;
  return o;
}

std::vector<std::string> check_dispatch(const RunConfig& c, Command command) {
  std::vector<std::string> warnings;
  auto need = [&](bool present, const char* block) {
    if (!present) {
      throw ConfigError(std::string(block) + ": required by subcommand " +
                        std::string(to_string(command)));
    }
  };
  auto ignored = [&](bool present, const char* block) {
    if (present) {
      warnings.push_back(std::string(block) + " block ignored by subcommand " +
                         std::string(to_string(command)));
    }
  };
  const bool kerr = std::holds_alternative<KerrParams>(c.model);
  switch (command) {
    case Command::Spectrum:
      break;
    case Command::Evolve:
      need(c.evolve.has_value(), "evolve");
      break;
    case Command::Protocol:
      need(c.protocol.has_value(), "protocol");
      need(c.error.has_value(), "error");
      break;
    case Command::Sweep:
      need(c.sweep.has_value(), "sweep");
      if (c.sweep->metric != SweepMetric::Window) {
        need(c.protocol.has_value(), "protocol");
        need(c.error.has_value(), "error");
      }
      break;
    case Command::Wigner:
      need(c.wigner.has_value(), "wigner");
      break;
    case Command::Crossing:
      need(c.crossing.has_value(), "crossing");
      if (!kerr) throw ConfigError("model.kind: crossing needs a kerr model");
      break;
  }
  const bool protocol_used = command == Command::Protocol ||
                             (command == Command::Sweep && c.sweep->metric != SweepMetric::Window);
  ignored(c.error.has_value() && !protocol_used, "error");
  ignored(c.protocol.has_value() && !protocol_used, "protocol");
  ignored(c.evolve.has_value() && command != Command::Evolve, "evolve");
  ignored(c.wigner.has_value() && command != Command::Wigner, "wigner");
  ignored(c.sweep.has_value() && command != Command::Sweep, "sweep");
  ignored(c.crossing.has_value() && command != Command::Crossing, "crossing");
  return warnings;
}

}  // namespace metastab::cli
