#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotq/errors.hpp"
#include "pilotq/gates.hpp"

using namespace pilotq;

TEST(Gates, HadamardGeneratorReproducesGate) {
  for (double t : {0.5, 1.0, 3.0}) {
    const auto g = hadamard_generator(t);
    EXPECT_LT(hermiticity_error(g.matrix), 1e-15);
    EXPECT_LT(oracle::max_abs(g.unitary() - oracle::hadamard()), 1e-12);
  }
}

TEST(Gates, OracleGeneratorsReproducePermutations) {
  for (const auto& f : OracleFunction::all()) {
    const CMatrix expected = oracle::oracle_permutation(f.index());
    EXPECT_LT(oracle::max_abs(oracle_unitary(f).matrix - expected), 1e-15) << f.name();
    for (double t : {kPi / 2.0, 1.0}) {
      const auto g = oracle_generator(f, t);
      EXPECT_LT(oracle::max_abs(g.unitary() - expected), 1e-12) << f.name();
    }
  }
  EXPECT_LT(oracle::max_abs(oracle_generator(OracleFunction::parse("f0"), 1.0).matrix), 1e-15);
}

TEST(Gates, BalancedOracleIdentity) {
  // U_f2 = X_d CNOT X_d
  CMatrix xd = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) xd(i ^ 2, i) = 1.0;
  EXPECT_LT(oracle::max_abs(xd * gates::cnot() * xd - oracle_unitary(OracleFunction::parse("f2")).matrix),
            1e-15);
}

TEST(Gates, Pi8Generator) {
  Eigen::Matrix2cd t;
  t << 1, 0, 0, std::polar(1.0, kPi / 4);
  EXPECT_LT(oracle::max_abs(pi8_generator(2.0).unitary() - CMatrix(t)), 1e-12);
  EXPECT_LT(oracle::max_abs(gates::t_gate() - CMatrix(t)), 1e-15);
}

TEST(Gates, PartialHadamardFollowsGenerator) {
  const auto g = hadamard_generator(1.0);
  for (int k = 0; k <= 50; ++k) {
    const double a = k / 50.0;
    const CMatrix expected = oracle::expm_taylor(g.matrix, a);
    EXPECT_LT(oracle::max_abs(partial_gate_unitary(a).matrix - expected), 1e-12) << a;
  }
}

TEST(Gates, RotationsMatchSeries) {
  for (double th : {-2.0, 0.3, kPi}) {
    EXPECT_LT(oracle::max_abs(gates::rz(th) - oracle::expm_taylor(gates::pauli_z() / 2.0, th)), 1e-13);
    EXPECT_LT(oracle::max_abs(gates::rx(th) - oracle::expm_taylor(gates::pauli_x() / 2.0, th)), 1e-13);
  }
}

TEST(Gates, CnotDirections) {
  const CMatrix fwd = oracle::two_qubit_from_action([](const Eigen::Vector4cd& v) {
    Eigen::Vector4cd out = v;
    std::swap(out(2), out(3));
    return out;
  });
  const CMatrix rev = oracle::two_qubit_from_action([](const Eigen::Vector4cd& v) {
    Eigen::Vector4cd out = v;
    std::swap(out(1), out(3));
    return out;
  });
  EXPECT_LT(oracle::max_abs(gates::cnot() - fwd), 1e-15);
  EXPECT_LT(oracle::max_abs(gates::cnot_reversed() - rev), 1e-15);
}

TEST(Gates, OracleTruthTables) {
  for (const auto& f : OracleFunction::all())
    for (int p = 0; p < 2; ++p) EXPECT_EQ(f(p), oracle::truth(f.index(), p));
  EXPECT_TRUE(OracleFunction::parse("f0").is_constant());
  EXPECT_TRUE(OracleFunction::parse("f3").is_constant());
  EXPECT_FALSE(OracleFunction::parse("f1").is_constant());
  EXPECT_THROW(OracleFunction::parse("f4"), InvalidArgument);
}

TEST(Gates, RegisterStateChecks) {
  EXPECT_EQ(RegisterState::basis("10").amplitudes()(2), Complex(1.0));
  EXPECT_THROW(RegisterState::basis("012"), InvalidArgument);
  EXPECT_THROW(RegisterState::basis("2"), InvalidArgument);
  EXPECT_THROW(RegisterState(CVector::Zero(2)), InvalidArgument);
  EXPECT_THROW(RegisterState(CVector::Ones(3) / std::sqrt(3.0)), InvalidArgument);
}

TEST(Gates, InvolutionGeneratorForRandomReflections) {
  std::mt19937_64 gen(17);
  for (int k = 0; k < 10; ++k) {
    const CMatrix v = oracle::haar_unitary(4, gen);
    CMatrix d = CMatrix::Identity(4, 4);
    d(0, 0) = -1.0;
    d(3, 3) = -1.0;
    const CMatrix u = v * d * v.adjoint();
    EXPECT_LT(oracle::max_abs(involution_generator(u, 0.7).unitary() - u), 1e-12);
  }
}
