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

// Builders for the two physical models (two qubits under collective
// dissipation, two-photon driven-dissipative Kerr resonator) and their error
// channels.

#pragma once

#include "metastab/core.hpp"
#include "metastab/liouville.hpp"
#include "metastab/qops.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace metastab {

struct LabeledOperator {
  std::string label;
  Operator op;
};

struct LindbladModel {
  Operator hamiltonian;
  std::vector<LabeledOperator> jumps;
  std::string rate_unit;
  std::vector<std::string> warnings;

  Index hdim() const noexcept { return hamiltonian.dim(); }
  std::vector<Operator> jump_operators() const;
};

// Rates in units of gamma2.
struct TwoQubitParams {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double gamma1 = 4.0;
  double gamma2 = 1.0;

  void validate() const;
};

// Rates in units of kappa2.
struct KerrParams {
  double kerr_K = 1.0;
  double lambda2 = 2.0;
  double kappa2 = 1.0;
  double kappa1 = 0.0;
  Index n_trunc = 25;

  void validate() const;
};

// H = Omega1 sx1 + Omega2 sx2, J = sqrt(g1) n1 s2- + sqrt(g2) (1 - n1) s2+.
LindbladModel two_qubit_model(const TwoQubitParams& p);

// H = (K/2)(a^dag a)^2 + (Lambda2/2)(a^dag^2 + a^2), J2 = sqrt(k2) a^2,
// J1 = sqrt(k1) a (omitted when k1 = 0).
LindbladModel kerr_model(const KerrParams& p);

// i sqrt(Lambda2 / (K - i kappa2)), principal branch.
Complex alpha_from_params(const KerrParams& p);

enum class ErrorKind { PhaseFlip, BitFlip, SpontaneousEmission, BosonDephasing };

ErrorKind parse_error_kind(std::string_view name);
std::string_view to_string(ErrorKind kind);

struct ErrorChannel {
  ErrorKind kind;
  double rate;
  std::vector<LabeledOperator> jumps;

  // Dissipator-only generator L' of the channel.
  Superoperator superoperator() const;
};

// Qubit kinds need hdim = 4; BosonDephasing takes hdim as the Fock cutoff.
ErrorChannel error_channel(ErrorKind kind, double rate, Index hdim);

// Orthonormal basis of the cat manifold {|C+>, |C->} (symmetric
// orthogonalization when the overlap exceeds 1e-10).
struct CatBasis {
  CVector even;
  CVector odd;
  Complex alpha;
};
CatBasis cat_basis(const KerrParams& p);

// 1 - |01><01| - |10><10|
Operator dfs_projector(const TwoQubitParams& p);
// 1 - |C+><C+| - |C-><C-| at alpha_from_params(p)
Operator dfs_projector(const KerrParams& p);

// Parameter set of either model; keys match the config schema.
using ModelParams = std::variant<TwoQubitParams, KerrParams>;

LindbladModel build_model(const ModelParams& params);
Operator dfs_projector(const ModelParams& params);
Index hilbert_dim(const ModelParams& params);
std::string_view model_kind_name(const ModelParams& params);

// Keys: omega1 omega2 gamma1 gamma2 | K lambda2 kappa1 kappa2 n_trunc.
bool has_parameter(const ModelParams& params, std::string_view key);
double get_parameter(const ModelParams& params, std::string_view key);
ModelParams with_parameter(ModelParams params, std::string_view key, double value);

// Named initial states:
//   two-qubit: dfs_plus, dfs_minus, 00, 01, 10, 11
//   kerr:      cat_plus, cat_minus, coherent_plus, coherent_minus, vacuum, fock:<k>
CVector initial_state(const ModelParams& params, std::string_view name);
std::string_view default_initial_state(const ModelParams& params);

}  // namespace metastab
