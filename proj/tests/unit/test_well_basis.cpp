#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotq/well_basis.hpp"

using namespace pilotq;
using namespace pilotq::well;
using oracle::simpson;

namespace {

double dv(double x) { return -(9.0 * kPi * kPi / 16.0) * (x - 0.5); }
double phi(int n, double x) { return std::sqrt(2.0) * std::sin(n * kPi * x); }

// Coupling elements built as a product of two independent 1-D integrals,
// with an arbitrary x-profile g.
template <class G>
Eigen::Matrix4cd product_elements(G&& g) {
  Eigen::Matrix4cd out;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
          const double gx = simpson([&](double x) { return phi(k + 1, x) * phi(l + 1, x) * g(x); }, 0, 1);
          const double uy =
              simpson([&](double y) { return phi(m + 1, y) * phi(n + 1, y) * (dv(y) - 1.0); }, 0, 1);
          out(2 * k + m, 2 * l + n) = gx * uy;
        }
  return out;
}

}  // namespace

TEST(WellBasis, SpectrumAndBeat) {
  const WellBasis b{2.0};
  EXPECT_NEAR(b.energy(1), kPi * kPi / 4.0, 1e-15);
  EXPECT_NEAR(b.energy(2), kPi * kPi, 1e-14);
  EXPECT_NEAR(b.omega(), -3.0 * kPi * kPi / 8.0, 1e-14);
  EXPECT_NEAR(b.phase_rate(), 5.0 * kPi * kPi / 8.0, 1e-14);
  EXPECT_NEAR(b.beat_period(), kPi / (3.0 * kPi * kPi / 8.0), 1e-14);
  EXPECT_THROW((WellBasis{0.0}.validate()), InvalidArgument);
}

TEST(WellBasis, ModesAndDerivatives) {
  for (int n = 1; n <= 2; ++n)
    for (double x : {0.1, 0.37, 0.8}) {
      EXPECT_NEAR(mode(n, x), phi(n, x), 1e-15);
      const double h = 1e-5;
      EXPECT_NEAR(mode_d1(n, x), (phi(n, x + h) - phi(n, x - h)) / (2 * h), 1e-8);
      EXPECT_NEAR(mode_d2(n, x), -n * n * kPi * kPi * phi(n, x), 1e-12);
    }
}

TEST(WellBasis, ClosedFormIntegrals) {
  for (int m = 1; m <= 2; ++m)
    for (int k = 1; k <= 2; ++k)
      for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const double cdf = simpson([&](double s) { return phi(m, s) * phi(k, s); }, 0.0, x, 2000);
        EXPECT_NEAR(mode_overlap_cdf(m, k, x), cdf, 1e-12);
        EXPECT_NEAR(mode_flux_integral(m, k, x), cdf - (m == k ? x : 0.0), 1e-12);
      }
  EXPECT_NEAR(mode_flux_integral(1, 2, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(mode_flux_integral(2, 2, 1.0), 0.0, 1e-15);
}

TEST(WellBasis, MomentsInClosedForm) {
  // Moments the coupling constants are built from.
  EXPECT_NEAR(simpson([](double x) { return phi(1, x) * phi(1, x) * x; }, 0, 1), 0.5, 1e-13);
  EXPECT_NEAR(simpson([](double x) { return phi(1, x) * phi(2, x) * x; }, 0, 1), -16.0 / (9 * kPi * kPi),
              1e-13);
  EXPECT_NEAR(simpson([](double x) { return phi(1, x) * phi(1, x) * std::cos(kPi * x); }, 0, 1), 0.0,
              1e-13);
  EXPECT_NEAR(simpson([](double x) { return phi(1, x) * phi(2, x) * std::cos(kPi * x); }, 0, 1), 0.5,
              1e-13);
  EXPECT_NEAR(simpson([](double x) { return phi(1, x) * phi(1, x) * x * std::cos(kPi * x); }, 0, 1),
              -8.0 / (9 * kPi * kPi), 1e-13);
  EXPECT_NEAR(simpson([](double x) { return phi(1, x) * phi(2, x) * x * std::cos(kPi * x); }, 0, 1), 0.25,
              1e-13);
  EXPECT_NEAR(simpson([](double x) { return phi(2, x) * phi(2, x) * x * std::cos(kPi * x); }, 0, 1),
              -416.0 / (225 * kPi * kPi), 1e-13);
}

TEST(WellBasis, DeltaVIsPauliX) {
  const QuadratureRule rule;
  const Eigen::Matrix2d m = delta_v_matrix(rule);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double ref = simpson([&](double x) { return phi(i + 1, x) * dv(x) * phi(j + 1, x); }, 0, 1);
      EXPECT_NEAR(m(i, j), ref, 1e-12);
      EXPECT_NEAR(m(i, j), i == j ? 0.0 : 1.0, 1e-10);
    }
  for (double x : {0.0, 0.3, 1.0}) EXPECT_NEAR(delta_v(x), dv(x), 1e-15);
}

TEST(WellBasis, CouplingMatchesTarget) {
  const CouplingConstants k;
  const CMatrix got = oracle_coupling_matrix(QuadratureRule{});
  const Eigen::Matrix4cd ref = product_elements([&](double x) {
    return k.a + k.b * std::cos(kPi * x) + k.c * x * std::cos(kPi * x);
  });
  EXPECT_LT(oracle::max_abs(got - CMatrix(ref)), 1e-10);
  Eigen::Matrix4cd target = Eigen::Matrix4cd::Zero();
  target << -1, 1, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0;
  EXPECT_LT(oracle::max_abs(got - CMatrix(target)), 1e-8);
  EXPECT_LT(oracle::max_abs(oracle_coupling_target() - CMatrix(target)), 1e-15);
  for (double x : {0.2, 0.6})
    EXPECT_NEAR(coupling_potential(k, x, 0.3), coupling_x_factor(k, x) * (dv(0.3) - 1.0), 1e-14);
}

TEST(WellBasis, LiteralCosReadingMisses) {
  // cos(x) in place of cos(pi x) leaves the data-excited block nonzero.
  const CouplingConstants k;
  const Eigen::Matrix4cd literal = product_elements([&](double x) {
    return k.a + k.b * std::cos(x) + k.c * x * std::cos(x);
  });
  Eigen::Matrix4cd target = Eigen::Matrix4cd::Zero();
  target.topLeftCorner<2, 2>() << -1, 1, 1, -1;
  EXPECT_GT(oracle::max_abs(literal - target), 0.1);

  CouplingConstants off = k;
  off.c *= 1.01;
  try {
    oracle_coupling_matrix(QuadratureRule{}, off);
    FAIL() << "expected CouplingMismatch";
  } catch (const CouplingMismatch& e) {
    EXPECT_GT(e.residual(), 1e-6);
    EXPECT_NEAR(e.recomputed().a, k.a, 1e-10);
    EXPECT_NEAR(e.recomputed().b, k.b, 1e-9);
    EXPECT_NEAR(e.recomputed().c, k.c, 1e-9);
  }
}

TEST(WellBasis, SolvedConstantsAreTheClosedForms) {
  const auto k = solve_coupling_constants(QuadratureRule{});
  EXPECT_NEAR(k.a, 52.0 / 27.0, 1e-11);
  EXPECT_NEAR(k.b, -225.0 * kPi * kPi / 432.0, 1e-10);
  EXPECT_NEAR(k.c, 225.0 * kPi * kPi / 216.0, 1e-10);
}

TEST(WellBasis, VerificationReport) {
  const auto r = verify_matrix_elements(QuadratureRule{});
  EXPECT_LT(r.delta_v_residual, 1e-10);
  EXPECT_LT(r.coupling_residual, 1e-8);
  EXPECT_LT(r.normalisation_residual, 1e-12);
  EXPECT_GT(verify_matrix_elements(QuadratureRule(4, 2)).delta_v_residual, 1e-10);
}

TEST(WellBasis, FreeEvolutionIsOmegaZ) {
  const WellBasis b{1.0};
  const auto f = free_generator(b, 1);
  const double t = 0.37;
  const CMatrix u = f.unitary(t);
  EXPECT_NEAR(std::abs(u(0, 0) - std::exp(Complex(0, -b.energy(1) * t))), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(u(1, 1) - std::exp(Complex(0, -b.energy(2) * t))), 0.0, 1e-13);
  const auto f2 = free_generator(b, 2);
  const CMatrix u2 = f2.unitary(t);
  EXPECT_NEAR(std::abs(u2(3, 3) - std::exp(Complex(0, -2 * b.energy(2) * t))), 0.0, 1e-13);
}
