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


// Config schema, subcommand execution and file output for the metastab tool.

#pragma once

#include "metastab/core.hpp"
#include "metastab/dynamics.hpp"
#include "metastab/models.hpp"
#include "metastab/protocol.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metastab::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

// Schema violation; message starts with the offending key path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Command { Spectrum, Evolve, Protocol, Sweep, Wigner, Crossing };

Command parse_command(std::string_view name);
std::string_view to_string(Command command);

struct ErrorConfig {
  ErrorKind kind = ErrorKind::PhaseFlip;
  double rate = 1.0;
};

struct EvolveConfig {
  TimeGrid grid;
  std::string initial_state;
};

struct WignerConfig {
  double x_min = -4.0;
  double x_max = 4.0;
  Index nx = 81;
  double p_min = -4.0;
  double p_max = 4.0;
  Index np = 81;
  // Evolution time under the model before sampling.
  double time = 0.0;
  std::string initial_state;
};

struct SweepConfig {
  SweepAxis axis1;
  SweepAxis axis2;
  SweepMetric metric = SweepMetric::Window;
};

struct CrossingConfig {
  std::vector<double> kappa1;
  std::vector<Index> ms{4, 2};
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct NumericsConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  Index m = 4;
  Method method = Method::Auto;
  // Kerr protocol: rerun at n_trunc + 5 and report the shift.
  bool convergence_check = true;
};

struct RunConfig {
  ModelParams model;
  std::optional<ErrorConfig> error;
  std::optional<ProtocolSettings> protocol;
  std::optional<EvolveConfig> evolve;
  std::optional<WignerConfig> wigner;
  std::optional<SweepConfig> sweep;
  std::optional<CrossingConfig> crossing;
  OutputConfig output;
  NumericsConfig numerics;
};

// Strict parse of a `schema: 1` JSON document; throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig parse_config_json(const nlohmann::json& doc);

// Fully resolved config (defaults filled, generated axes expanded); parsing
// it again yields the same RunConfig.
nlohmann::json to_json(const RunConfig& config);

EvolveOptions evolve_options(const RunConfig& config);

// Checks that `command` has the blocks it needs; returns warnings for blocks
// it ignores. Throws ConfigError.
std::vector<std::string> check_dispatch(const RunConfig& config, Command command);

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::vector<std::string>> formats;
  int jobs = 0;
};

// Runs one subcommand and writes its artifacts plus manifest.json. Numerical
// failures propagate as metastab::Error.
void run(Command command, const RunConfig& config, const RunOptions& options, std::ostream& log);

// Full entry point; returns the process exit code (0 ok, 1 numerical, 2 config).
int main(int argc, char** argv);

// CSV number formatting (%.17g, NaN for missing values).
std::string format_number(double value);

}  // namespace metastab::cli
