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

#include "metastab/models.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

namespace metastab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ArgumentError(message);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::vector<Operator> LindbladModel::jump_operators() const {
  std::vector<Operator> out;
  out.reserve(jumps.size());
  for (const auto& j : jumps) out.push_back(j.op);
  return out;
}

void TwoQubitParams::validate() const {
  require(std::isfinite(omega1) && omega1 >= 0.0, "omega1 must be >= 0 (got " + fmt(omega1) + ")");
  require(std::isfinite(omega2) && omega2 >= 0.0, "omega2 must be >= 0 (got " + fmt(omega2) + ")");
  require(std::isfinite(gamma1) && gamma1 > 0.0, "gamma1 must be > 0 (got " + fmt(gamma1) + ")");
  require(std::isfinite(gamma2) && gamma2 > 0.0, "gamma2 must be > 0 (got " + fmt(gamma2) + ")");
}

void KerrParams::validate() const {
  require(std::isfinite(kerr_K), "K must be finite");
  require(std::isfinite(lambda2), "lambda2 must be finite");
  require(std::isfinite(kappa2) && kappa2 > 0.0, "kappa2 must be > 0 (got " + fmt(kappa2) + ")");
  require(std::isfinite(kappa1) && kappa1 >= 0.0, "kappa1 must be >= 0 (got " + fmt(kappa1) + ")");
  require(n_trunc >= 2, "n_trunc must be >= 2 (got " + std::to_string(n_trunc) + ")");
}

LindbladModel two_qubit_model(const TwoQubitParams& p) {
  p.validate();
  const Operator sx1 = pauli(PauliKind::X, 1);
  const Operator sx2 = pauli(PauliKind::X, 2);
  const Operator n1 = pauli(PauliKind::Number, 1);
  const Operator id = Operator::identity(4);
  LindbladModel m;
  m.hamiltonian = Complex(p.omega1) * sx1 + Complex(p.omega2) * sx2;
  const Operator jump = Complex(std::sqrt(p.gamma1)) * (n1 * pauli(PauliKind::Minus, 2)) +
                        Complex(std::sqrt(p.gamma2)) * ((id - n1) * pauli(PauliKind::Plus, 2));
  m.jumps.push_back({"J", jump});
  m.rate_unit = "gamma2";
  return m;
}

Complex alpha_from_params(const KerrParams& p) {
  const Complex denom(p.kerr_K, -p.kappa2);
  if (std::abs(denom) == 0.0) throw ArgumentError("alpha_from_params: K - i kappa2 = 0");
  return kI * std::sqrt(Complex(p.lambda2) / denom);
}

LindbladModel kerr_model(const KerrParams& p) {
  p.validate();
  const FockOps f = fock_ops(p.n_trunc);
  const Operator a2 = f.a * f.a;
  const Operator ad2 = f.a_dag * f.a_dag;
  LindbladModel m;
  m.hamiltonian = Complex(0.5 * p.kerr_K) * (f.number * f.number) + Complex(0.5 * p.lambda2) * (ad2 + a2);
  m.jumps.push_back({"J2", Complex(std::sqrt(p.kappa2)) * a2});
  if (p.kappa1 > 0.0) m.jumps.push_back({"J1", Complex(std::sqrt(p.kappa1)) * f.a});
  m.rate_unit = "kappa2";
  const double n_alpha = std::norm(alpha_from_params(p));
  if (n_alpha > static_cast<double>(p.n_trunc) / 4.0) {
    m.warnings.push_back("|alpha|^2 = " + fmt(n_alpha) + " exceeds n_trunc/4 = " +
                         fmt(static_cast<double>(p.n_trunc) / 4.0) + "; truncation may be inadequate");
  }
  return m;
}

ErrorKind parse_error_kind(std::string_view name) {
  if (name == "phase_flip") return ErrorKind::PhaseFlip;
  if (name == "bit_flip") return ErrorKind::BitFlip;
  if (name == "spont_emission") return ErrorKind::SpontaneousEmission;
  if (name == "dephasing_boson") return ErrorKind::BosonDephasing;
  throw ArgumentError("unknown error kind '" + std::string(name) +
                      "' (expected phase_flip, bit_flip, spont_emission, dephasing_boson)");
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PhaseFlip: return "phase_flip";
    case ErrorKind::BitFlip: return "bit_flip";
    case ErrorKind::SpontaneousEmission: return "spont_emission";
    case ErrorKind::BosonDephasing: return "dephasing_boson";
  }
  return "unknown";
}

Superoperator ErrorChannel::superoperator() const {
  if (jumps.empty()) throw ArgumentError("ErrorChannel: no jump operators");
  const Index n = jumps.front().op.dim();
  std::vector<Operator> ops;
  for (const auto& j : jumps) ops.push_back(j.op);
  return build_superoperator(Operator::zero(n), ops);
}

ErrorChannel error_channel(ErrorKind kind, double rate, Index hdim) {
  if (!(std::isfinite(rate) && rate > 0.0)) {
    throw ArgumentError("error rate must be > 0 (got " + fmt(rate) + ")");
  }
  ErrorChannel ch{kind, rate, {}};
  const Complex s(std::sqrt(rate));
  if (kind == ErrorKind::BosonDephasing) {
    if (hdim == 4) {
      throw ArgumentError("dephasing_boson needs a Fock space; hdim = 4 is the two-qubit space");
    }
    ch.jumps.push_back({"J_phi", s * fock_ops(hdim).number});
    return ch;
  }
  if (hdim != 4) {
    throw ArgumentError(std::string(to_string(kind)) + " acts on the two-qubit space (hdim 4), got " +
                        std::to_string(hdim));
  }
  const PauliKind pk = kind == ErrorKind::PhaseFlip ? PauliKind::Z
                       : kind == ErrorKind::BitFlip ? PauliKind::X
                                                    : PauliKind::Minus;
  for (int site = 1; site <= 2; ++site) {
    ch.jumps.push_back({"site" + std::to_string(site), s * pauli(pk, site)});
  }
  return ch;
}

CatBasis cat_basis(const KerrParams& p) {
  p.validate();
  const Complex alpha = alpha_from_params(p);
  if (std::abs(alpha) == 0.0) throw DegenerateStateError("cat manifold degenerate at alpha = 0");
  CVector even = cat_state({alpha, Parity::Even, p.n_trunc});
  CVector odd = cat_state({alpha, Parity::Odd, p.n_trunc});
  const Complex overlap = even.dot(odd);
  if (std::abs(overlap) > 1e-10) {
    // S^{-1/2} applied to the pair
    Eigen::Matrix2cd s;
    s << 1.0, overlap, std::conj(overlap), 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(s);
    const Eigen::Matrix2cd inv_sqrt = es.eigenvectors() *
                                      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                      es.eigenvectors().adjoint();
    CMatrix pair(even.size(), 2);
    pair.col(0) = even;
    pair.col(1) = odd;
    const CMatrix ortho = pair * inv_sqrt;
    even = ortho.col(0);
    odd = ortho.col(1);
  }
  return {even, odd, alpha};
}

Operator dfs_projector(const TwoQubitParams& p) {
  p.validate();
  return Operator::identity(4) - projector(two_qubit_ket(0, 1)) - projector(two_qubit_ket(1, 0));
}

Operator dfs_projector(const KerrParams& p) {
  const CatBasis b = cat_basis(p);
  return Operator::identity(p.n_trunc) - projector(b.even) - projector(b.odd);
}

LindbladModel build_model(const ModelParams& params) {
  return std::visit(Overloaded{[](const TwoQubitParams& p) { return two_qubit_model(p); },
                               [](const KerrParams& p) { return kerr_model(p); }},
                    params);
}

Operator dfs_projector(const ModelParams& params) {
  return std::visit([](const auto& p) { return dfs_projector(p); }, params);
}

Index hilbert_dim(const ModelParams& params) {
  return std::visit(Overloaded{[](const TwoQubitParams&) { return Index{4}; },
                               [](const KerrParams& p) { return p.n_trunc; }},
                    params);
}

std::string_view model_kind_name(const ModelParams& params) {
  return std::holds_alternative<TwoQubitParams>(params) ? "two_qubit" : "kerr";
}

namespace {

double* field(TwoQubitParams& p, std::string_view key) {
  if (key == "omega1") return &p.omega1;
  if (key == "omega2") return &p.omega2;
  if (key == "gamma1") return &p.gamma1;
  if (key == "gamma2") return &p.gamma2;
  return nullptr;
}

double* field(KerrParams& p, std::string_view key) {
  if (key == "K") return &p.kerr_K;
  if (key == "lambda2") return &p.lambda2;
  if (key == "kappa1") return &p.kappa1;
  if (key == "kappa2") return &p.kappa2;
  return nullptr;
}

}  // namespace

bool has_parameter(const ModelParams& params, std::string_view key) {
  ModelParams copy = params;
  if (auto* k = std::get_if<KerrParams>(&copy); k != nullptr && key == "n_trunc") return true;
  return std::visit([&](auto& p) { return field(p, key) != nullptr; }, copy);
}

double get_parameter(const ModelParams& params, std::string_view key) {
  ModelParams copy = params;
  if (auto* k = std::get_if<KerrParams>(&copy); k != nullptr && key == "n_trunc") {
    return static_cast<double>(k->n_trunc);
  }
  const double* f = std::visit([&](auto& p) -> const double* { return field(p, key); }, copy);
  if (f == nullptr) {
    throw ArgumentError("parameter '" + std::string(key) + "' does not exist for model " +
                        std::string(model_kind_name(params)));
  }
  return *f;
}

ModelParams with_parameter(ModelParams params, std::string_view key, double value) {
  if (auto* k = std::get_if<KerrParams>(&params); k != nullptr && key == "n_trunc") {
    if (value != std::floor(value) || value < 2) {
      throw ArgumentError("n_trunc must be an integer >= 2 (got " + fmt(value) + ")");
    }
    k->n_trunc = static_cast<Index>(value);
    return params;
  }
  double* f = std::visit([&](auto& p) { return field(p, key); }, params);
  if (f == nullptr) {
    throw ArgumentError("parameter '" + std::string(key) + "' does not exist for model " +
                        std::string(model_kind_name(params)));
  }
  *f = value;
  return params;
}

CVector initial_state(const ModelParams& params, std::string_view name) {
  if (const auto* q = std::get_if<TwoQubitParams>(&params)) {
    (void)q;
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "dfs_plus") return r * (two_qubit_ket(0, 1) + two_qubit_ket(1, 0));
    if (name == "dfs_minus") return r * (two_qubit_ket(0, 1) - two_qubit_ket(1, 0));
    if (name.size() == 2 && (name[0] == '0' || name[0] == '1') && (name[1] == '0' || name[1] == '1')) {
      return two_qubit_ket(name[0] - '0', name[1] - '0');
    }
    throw ArgumentError("unknown two_qubit initial state '" + std::string(name) +
                        "' (expected dfs_plus, dfs_minus, 00, 01, 10, 11)");
  }
  const auto& k = std::get<KerrParams>(params);
  k.validate();
  if (name == "vacuum") return fock_ket(k.n_trunc, 0);
  if (name.starts_with("fock:")) {
    Index level = -1;
    const auto digits = name.substr(5);
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), level);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
      throw ArgumentError("bad Fock level in '" + std::string(name) + "'");
    }
    return fock_ket(k.n_trunc, level);
  }
  const Complex alpha = alpha_from_params(k);
  if (name == "cat_plus") return cat_state({alpha, Parity::Even, k.n_trunc});
  if (name == "cat_minus") return cat_state({alpha, Parity::Odd, k.n_trunc});
  if (name == "coherent_plus") return coherent_state(k.n_trunc, alpha).amplitudes;
  if (name == "coherent_minus") return coherent_state(k.n_trunc, -alpha).amplitudes;
  throw ArgumentError("unknown kerr initial state '" + std::string(name) +
                      "' (expected cat_plus, cat_minus, coherent_plus, coherent_minus, vacuum, fock:<k>)");
}

std::string_view default_initial_state(const ModelParams& params) {
  return std::holds_alternative<TwoQubitParams>(params) ? "dfs_plus" : "cat_minus";
}

}  // namespace metastab
