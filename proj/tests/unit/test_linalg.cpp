#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotq/errors.hpp"
#include "pilotq/linalg.hpp"

using namespace pilotq;

TEST(Linalg, ExponentialMatchesTaylorSeries) {
  std::mt19937_64 gen(7);
  for (int n : {2, 4}) {
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix h = oracle::random_hermitian(n, gen, 2.0);
      const double t = 0.1 + 0.3 * trial;
      EXPECT_LT(max_abs(matrix_exponential(h, t) - oracle::expm_taylor(h, t)), 1e-11);
    }
  }
}

TEST(Linalg, ExponentialIsUnitaryAndComposes) {
  std::mt19937_64 gen(11);
  const CMatrix h = oracle::random_hermitian(4, gen);
  const CMatrix a = matrix_exponential(h, 0.4);
  const CMatrix b = matrix_exponential(h, 0.9);
  EXPECT_LT(unitarity_error(a), 1e-13);
  EXPECT_LT(max_abs(a * b - matrix_exponential(h, 1.3)), 1e-12);
  EXPECT_LT(max_abs(matrix_exponential(h, 0.0) - CMatrix::Identity(4, 4)), 1e-14);
}

TEST(Linalg, SpectrumReconstructs) {
  std::mt19937_64 gen(3);
  const CMatrix h = oracle::random_hermitian(4, gen);
  const auto s = hermitian_spectrum(h);
  const CMatrix back = s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() *
                       s.eigenvectors.adjoint();
  EXPECT_LT(max_abs(back - h), 1e-12);
}

TEST(Linalg, RejectsNonHermitian) {
  CMatrix h = CMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(hermitian_spectrum(h), InvalidArgument);
  EXPECT_THROW(matrix_exponential(h, 1.0), InvalidArgument);
}

TEST(Linalg, PhaseInsensitiveDistance) {
  std::mt19937_64 gen(5);
  const CMatrix u = oracle::haar_unitary(2, gen);
  EXPECT_LT(phase_insensitive_distance(u, std::polar(1.0, 2.1) * u), 1e-13);
  EXPECT_GT(phase_insensitive_distance(u, oracle::haar_unitary(2, gen)), 1e-3);
}

TEST(Linalg, KronOrdering) {
  CMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  const CMatrix k = kron(x, z);
  // (X (x) Z)|m n> = (-1)^n |1-m, n>
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      EXPECT_EQ(k(2 * (1 - m) + n, 2 * m + n), Complex(n ? -1.0 : 1.0));
}
