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

#include "metastab/liouville.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <vector>

namespace metastab {
namespace {

const TwoQubitParams kFig2{0.02, 0.01, 4.0, 1.0};

CMatrix parity(Index n) {
  CMatrix p = CMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

// Superoperator of rho -> left * rho * right.
CMatrix sandwich(const CMatrix& left, const CMatrix& right) {
  return Eigen::kroneckerProduct(right.transpose(), left).eval();
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(TwoQubitModel, StructureAndUnits) {
  const LindbladModel m = two_qubit_model(kFig2);
  EXPECT_EQ(m.rate_unit, "gamma2");
  ASSERT_EQ(m.jumps.size(), 1u);
  const CMatrix h_expect = (0.02 * pauli(PauliKind::X, 1) + 0.01 * pauli(PauliKind::X, 2)).matrix();
  EXPECT_LT(max_abs(m.hamiltonian.matrix() - h_expect), 1e-15);
  EXPECT_NO_THROW(build_superoperator(m));
}

TEST(TwoQubitModel, JumpAnnihilatesDfs) {
  const Operator j = two_qubit_model(kFig2).jumps.front().op;
  EXPECT_LT((j.matrix() * two_qubit_ket(0, 1)).norm(), 1e-14);
  EXPECT_LT((j.matrix() * two_qubit_ket(1, 0)).norm(), 1e-14);
  const CVector out = j.matrix() * two_qubit_ket(1, 1);
  EXPECT_LT((out - 2.0 * two_qubit_ket(1, 0)).norm(), 1e-14);
}

TEST(TwoQubitModel, RestrictionToDfsVanishes) {
  CMatrix basis(4, 2);
  basis.col(0) = two_qubit_ket(0, 1);
  basis.col(1) = two_qubit_ket(1, 0);
  for (double g1 : {0.5, 4.0, 9.0}) {
    const Operator j = two_qubit_model({0.0, 0.0, g1, 1.3}).jumps.front().op;
    EXPECT_LE((j.matrix() * basis).norm(), 1e-14);
  }
}

TEST(TwoQubitModel, RejectsInvalidParameters) {
  EXPECT_THROW(two_qubit_model({-0.1, 0.0, 4.0, 1.0}), ArgumentError);
  EXPECT_THROW(two_qubit_model({0.0, 0.0, 0.0, 1.0}), ArgumentError);
  EXPECT_THROW(two_qubit_model({0.0, 0.0, 4.0, -1.0}), ArgumentError);
}

TEST(KerrModel, StructureAndOptionalLoss) {
  const LindbladModel a = kerr_model({1.0, 2.0, 1.0, 0.0, 10});
  EXPECT_EQ(a.rate_unit, "kappa2");
  ASSERT_EQ(a.jumps.size(), 1u);
  EXPECT_EQ(a.jumps[0].label, "J2");
  const LindbladModel b = kerr_model({1.0, 2.0, 1.0, 0.01, 10});
  ASSERT_EQ(b.jumps.size(), 2u);
  EXPECT_EQ(b.jumps[1].label, "J1");
  const FockOps f = fock_ops(10);
  const CMatrix n = f.number.matrix();
  const CMatrix h = 0.5 * n * n + (f.a_dag.matrix() * f.a_dag.matrix() + f.a.matrix() * f.a.matrix());
  EXPECT_LT(max_abs(a.hamiltonian.matrix() - h), 1e-13);
  EXPECT_LT(max_abs(b.jumps[1].op.matrix() - 0.1 * f.a.matrix()), 1e-15);
}

TEST(KerrModel, TruncationWarning) {
  EXPECT_TRUE(kerr_model({1.0, 2.0, 1.0, 0.0, 25}).warnings.empty());
  EXPECT_FALSE(kerr_model({0.0, 8.0, 1.0, 0.0, 10}).warnings.empty());
  EXPECT_THROW(kerr_model({1.0, 2.0, 0.0, 0.0, 25}), ArgumentError);
  EXPECT_THROW(kerr_model({1.0, 2.0, 1.0, -0.1, 25}), ArgumentError);
  EXPECT_THROW(kerr_model({1.0, 2.0, 1.0, 0.0, 1}), ArgumentError);
}

TEST(KerrModel, DissipativeDarkStates) {
  const KerrParams p{0.0, 2.0, 1.0, 0.0, 25};
  const Superoperator l = build_superoperator(kerr_model(p));
  const Complex root = std::sqrt(Complex(p.lambda2, 0.0) / Complex(0.0, p.kappa2));
  for (Complex alpha : {root, -root}) {
    const DensityMatrix rho = DensityMatrix::pure(coherent_state(25, alpha).amplitudes);
    EXPECT_LE(max_abs(l.apply(rho.op()).matrix()), 1e-6) << alpha;
  }
}

TEST(KerrModel, ParityConjugationCommutes) {
  const Index n = 12;
  const CMatrix pi = parity(n);
  const CMatrix conj = sandwich(pi, pi);
  for (double k1 : {0.0, 0.05, 0.5}) {
    const CMatrix l = build_superoperator(kerr_model({1.0, 2.0, 1.0, k1, n})).matrix();
    EXPECT_LE(max_abs(l * conj - conj * l), 1e-10) << k1;
  }
}

TEST(KerrModel, OneSidedParityBreaksWithSinglePhotonLoss) {
  const Index n = 12;
  const CMatrix left = sandwich(parity(n), CMatrix::Identity(n, n));
  double previous = -1.0;
  for (double k1 : {0.0, 0.001, 0.01, 0.1, 0.3, 1.0}) {
    const CMatrix l = build_superoperator(kerr_model({1.0, 2.0, 1.0, k1, n})).matrix();
    const double c = (l * left - left * l).norm();
    if (k1 == 0.0) EXPECT_LE(c, 1e-10);
    EXPECT_GT(c, previous) << k1;
    previous = c;
  }
}

TEST(Alpha, Examples) {
  const Complex a = alpha_from_params({1.0, 2.0, 1.0, 0.0, 25});
  EXPECT_NEAR(a.real(), -0.4551, 1e-4);
  EXPECT_NEAR(a.imag(), 1.0987, 1e-4);
  const Complex b = alpha_from_params({0.0, 1.0, 1.0, 0.0, 25});
  EXPECT_NEAR(b.real(), -std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(b.imag(), std::sqrt(0.5), 1e-12);
  EXPECT_EQ(alpha_from_params({1.0, 0.0, 1.0, 0.0, 25}), Complex(0.0));
  EXPECT_NEAR(std::norm(alpha_from_params({1.0, 4.0, 1.0, 0.0, 25})), 4.0 / std::sqrt(2.0), 1e-12);
}

TEST(Alpha, ZeroDenominator) {
  KerrParams p;
  p.kerr_K = 0.0;
  p.kappa2 = 0.0;
  EXPECT_THROW(alpha_from_params(p), ArgumentError);
}

TEST(ErrorChannel, JumpSets) {
  const ErrorChannel pf = error_channel(ErrorKind::PhaseFlip, 0.25, 4);
  ASSERT_EQ(pf.jumps.size(), 2u);
  EXPECT_LT(max_abs(pf.jumps[0].op.matrix() - 0.5 * pauli(PauliKind::Z, 1).matrix()), 1e-15);
  EXPECT_LT(max_abs(pf.jumps[1].op.matrix() - 0.5 * pauli(PauliKind::Z, 2).matrix()), 1e-15);
  const ErrorChannel bf = error_channel(ErrorKind::BitFlip, 1.0, 4);
  EXPECT_LT(max_abs(bf.jumps[1].op.matrix() - pauli(PauliKind::X, 2).matrix()), 1e-15);
  const ErrorChannel se = error_channel(ErrorKind::SpontaneousEmission, 1.0, 4);
  EXPECT_LT(max_abs(se.jumps[0].op.matrix() - pauli(PauliKind::Minus, 1).matrix()), 1e-15);
  const ErrorChannel de = error_channel(ErrorKind::BosonDephasing, 4.0, 10);
  ASSERT_EQ(de.jumps.size(), 1u);
  EXPECT_LT(max_abs(de.jumps[0].op.matrix() - 2.0 * fock_ops(10).number.matrix()), 1e-15);
}

TEST(ErrorChannel, Names) {
  for (ErrorKind k : {ErrorKind::PhaseFlip, ErrorKind::BitFlip, ErrorKind::SpontaneousEmission,
                      ErrorKind::BosonDephasing}) {
    EXPECT_EQ(parse_error_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(ErrorKind::SpontaneousEmission), "spont_emission");
  EXPECT_THROW(parse_error_kind("amplitude"), ArgumentError);
}

TEST(ErrorChannel, Validation) {
  EXPECT_THROW(error_channel(ErrorKind::PhaseFlip, 0.0, 4), ArgumentError);
  EXPECT_THROW(error_channel(ErrorKind::BitFlip, -1.0, 4), ArgumentError);
  EXPECT_THROW(error_channel(ErrorKind::BosonDephasing, 1.0, 4), ArgumentError);
  EXPECT_THROW(error_channel(ErrorKind::PhaseFlip, 1.0, 10), ArgumentError);
}

TEST(ErrorChannel, PhaseFlipCoherenceDecay) {
  const Superoperator l = error_channel(ErrorKind::PhaseFlip, 1.0, 4).superoperator();
  const DensityMatrix psi = DensityMatrix::pure(two_qubit_ket(0, 1) + two_qubit_ket(1, 0));
  const CVector v0 = vectorize(psi.op());
  for (double t : {0.0, 0.1, 0.25, 0.7}) {
    const Operator rho = devectorize((l.matrix() * t).exp() * v0, 4);
    // Each sigma_z dephaser decays the |01><10| coherence at rate 2 gamma_e; both qubits differ.
    EXPECT_NEAR(std::abs(rho.matrix()(1, 2) - 0.5 * std::exp(-4.0 * t)), 0.0, 1e-12) << t;
  }
}

TEST(ErrorChannel, TracePreservingAndUnital) {
  const CVector mixed = vectorize(Operator(CMatrix::Identity(4, 4) / 4.0));
  for (ErrorKind k : {ErrorKind::PhaseFlip, ErrorKind::BitFlip, ErrorKind::SpontaneousEmission}) {
    const Superoperator l = error_channel(k, 0.7, 4).superoperator();
    EXPECT_LT(l.trace_preservation_error(), 1e-12);
    if (k != ErrorKind::SpontaneousEmission) EXPECT_LT((l.matrix() * mixed).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_LT(error_channel(ErrorKind::BosonDephasing, 3.0, 8).superoperator().trace_preservation_error(),
            1e-12);
}

TEST(ErrorChannel, BosonDephasingKeepsPopulations) {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  CMatrix a(8, 8);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  const Superoperator l = error_channel(ErrorKind::BosonDephasing, 2.0, 8).superoperator();
  const CMatrix d = l.apply(Operator(rho)).matrix();
  for (Index k = 0; k < 8; ++k) EXPECT_LT(std::abs(d(k, k)), 1e-14);
  const Operator n = fock_ops(8).number;
  EXPECT_LT(std::abs((n.matrix() * d).trace()), 1e-13);
}

TEST(DfsProjector, TwoQubit) {
  const Operator p = dfs_projector(kFig2);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(p.matrix());
  const std::vector<double> expect{0.0, 0.0, 1.0, 1.0};
  for (Index k = 0; k < 4; ++k) EXPECT_NEAR(es.eigenvalues()(k), expect[static_cast<std::size_t>(k)], 1e-14);
  EXPECT_LT((p.matrix() * two_qubit_ket(0, 1)).norm(), 1e-15);
}

TEST(DfsProjector, KerrCatManifold) {
  const KerrParams p{1.0, 4.0, 1.0, 0.01, 25};
  const Operator proj = dfs_projector(p);
  const CatBasis basis = cat_basis(p);
  EXPECT_LT(std::abs(basis.even.dot(basis.odd)), 1e-12);
  const Complex alpha = alpha_from_params(p);
  const CVector odd = cat_state({alpha, Parity::Odd, 25});
  EXPECT_LE(std::abs(expectation(proj, DensityMatrix::pure(odd))), 1e-10);
  EXPECT_LT(max_abs(proj.matrix() * proj.matrix() - proj.matrix()), 1e-12);
  KerrParams flat = p;
  flat.lambda2 = 0.0;
  EXPECT_THROW(dfs_projector(flat), DegenerateStateError);
}

TEST(ModelParams, ParameterAccess) {
  ModelParams q = kFig2;
  EXPECT_TRUE(has_parameter(q, "omega1"));
  EXPECT_FALSE(has_parameter(q, "K"));
  EXPECT_DOUBLE_EQ(get_parameter(with_parameter(q, "gamma1", 2.5), "gamma1"), 2.5);
  EXPECT_THROW(with_parameter(q, "kappa1", 1.0), ArgumentError);
  ModelParams k = KerrParams{};
  EXPECT_DOUBLE_EQ(get_parameter(with_parameter(k, "n_trunc", 30.0), "n_trunc"), 30.0);
  EXPECT_THROW(with_parameter(k, "n_trunc", 12.5), ArgumentError);
  EXPECT_THROW(with_parameter(k, "n_trunc", 1.0), ArgumentError);
  EXPECT_THROW(get_parameter(k, "omega2"), ArgumentError);
  EXPECT_EQ(hilbert_dim(k), 25);
  EXPECT_EQ(model_kind_name(q), "two_qubit");
}

TEST(ModelParams, InitialStates) {
  const ModelParams q = kFig2;
  const CVector plus = initial_state(q, default_initial_state(q));
  EXPECT_NEAR(plus.norm(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(plus(1)), std::sqrt(0.5), 1e-14);
  EXPECT_THROW(initial_state(q, "cat_plus"), ArgumentError);
  const ModelParams k = KerrParams{1.0, 2.0, 1.0, 0.0, 25};
  EXPECT_NEAR(std::abs(initial_state(k, "fock:3")(3)), 1.0, 1e-15);
  EXPECT_THROW(initial_state(k, "fock:30"), ArgumentError);
  EXPECT_THROW(initial_state(k, "fock:x"), ArgumentError);
  EXPECT_NEAR(initial_state(k, default_initial_state(k)).norm(), 1.0, 1e-12);
}

}  // namespace
}  // namespace metastab
