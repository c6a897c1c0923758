#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotq/bell.hpp"
#include "pilotq/errors.hpp"

using namespace pilotq;
using namespace pilotq::bell;

namespace {

double gaussian(double y, double c, double s) {
  return std::exp(-(y - c) * (y - c) / (2 * s * s)) / std::sqrt(2 * oracle::kPi * s * s);
}

RegisterState plus_zero() {
  CVector v = CVector::Zero(4);
  v(0) = v(2) = 1.0 / std::sqrt(2.0);
  return RegisterState(v);
}

BellRunParams small_run(int n = 100) {
  BellRunParams p;
  p.n = n;
  p.integrator.dt = 1e-2;
  return p;
}

}  // namespace

TEST(Bell, PacketIsNormalisedGaussian) {
  const PointerPacket p{0.3, 0.07, 0.0};
  for (double y : {-0.1, 0.2, 0.3, 0.45}) EXPECT_NEAR(p.density(y), gaussian(y, 0.3, 0.07), 1e-12);
  const double mass = oracle::simpson([&](double y) { return p.density(y); }, -0.5, 1.1);
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_NEAR(p.cdf(0.3), 0.5, 1e-15);
  for (double u : {0.01, 0.3, 0.9}) EXPECT_NEAR(p.cdf(p.quantile(u)), u, 1e-10);
}

TEST(Bell, MeasurementTranslatesRigidly) {
  const BellState s(plus_zero(), PointerPacket{0.0, 0.05, 0.0});
  EXPECT_TRUE(s.factorized());
  const MeasurementCoupling c{2.0, 1.0};
  const auto after = apply_measurement(s, c, 0.5);
  EXPECT_FALSE(after.factorized());
  EXPECT_NEAR(after.packets()[0].center, 1.0, 1e-15);
  EXPECT_NEAR(after.packets()[2].center, -1.0, 1e-15);
  // each branch is the original packet moved, with its amplitude untouched
  for (double y : {-1.05, -0.98, 0.97, 1.02})
    EXPECT_NEAR(after.density(y), 0.5 * (gaussian(y, 1.0, 0.05) + gaussian(y, -1.0, 0.05)), 1e-12);
  EXPECT_NEAR(after.total_norm(), 1.0, 1e-14);
}

TEST(Bell, VelocityIsPlusOrMinusCoupling) {
  const MeasurementCoupling c{1.5, 1.0};
  for (const char* bits : {"00", "01"}) {
    const auto s = apply_measurement(BellState(RegisterState::basis(bits), {}), c, 0.3);
    EXPECT_NEAR(pointer_velocity(s, 0.45), 1.5, 1e-15);
  }
  for (const char* bits : {"10", "11"}) {
    const auto s = apply_measurement(BellState(RegisterState::basis(bits), {}), c, 0.3);
    EXPECT_NEAR(pointer_velocity(s, -0.45), -1.5, 1e-15);
  }
  // no coupling, no motion
  EXPECT_EQ(pointer_velocity(BellState(RegisterState::basis("00"), {}), 0.0), 0.0);
}

TEST(Bell, SymmetricSuperpositionHasZeroVelocityAtMidpoint) {
  const auto s = apply_measurement(BellState(plus_zero(), {}), MeasurementCoupling{1.0, 1.0}, 0.05);
  EXPECT_NEAR(pointer_velocity(s, 0.0), 0.0, 1e-15);
  EXPECT_GT(pointer_velocity(s, 0.01), 0.0);
  EXPECT_THROW(pointer_velocity(s, 5.0), NodeError);
}

TEST(Bell, DeutschOutcomes) {
  const auto p = small_run();
  for (const auto& f : OracleFunction::all()) {
    const auto r = run_deutsch_bell(f, p);
    EXPECT_EQ(r.outcome, f.is_constant() ? "constant" : "balanced");
    EXPECT_TRUE(r.unanimous);
    EXPECT_NEAR(r.displacement, (f.is_constant() ? 1.0 : -1.0) * p.g * p.interaction_time, 1e-9);
    EXPECT_LT(r.displacement_spread, 1e-9);
    EXPECT_EQ(r.premeasurement_drift, 0.0);
    EXPECT_LT(r.separation_drift, 1e-9);
    EXPECT_EQ(r.ensemble.size(), 100u);
  }
}

TEST(Bell, DisplacementScalesWithCouplingAndTime) {
  auto p = small_run(20);
  p.g = -0.7;
  p.interaction_time = 2.0;
  const auto r = run_deutsch_bell(OracleFunction::parse("f3"), p);
  EXPECT_NEAR(r.displacement, -1.4, 1e-9);
  EXPECT_EQ(r.outcome, "constant");
}

TEST(Bell, NarrowCouplingIsAmbiguous) {
  auto p = small_run(20);
  p.sigma = 0.5;
  EXPECT_THROW(run_deutsch_bell(OracleFunction::parse("f1"), p), AmbiguousReadout);
}

TEST(Bell, RejectsBadParameters) {
  auto p = small_run();
  p.sigma = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = small_run();
  p.n = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}
