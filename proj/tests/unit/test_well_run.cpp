#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotq/errors.hpp"
#include "pilotq/well_run.hpp"

using namespace pilotq;
using namespace pilotq::well;

namespace {

WellRunParams quick(int n = 20) {
  WellRunParams p;
  p.n = n;
  p.integrator.dt = 5e-3;
  return p;
}

}  // namespace

TEST(WellRun, HadamardIsWaitPulseWait) {
  const WellBasis basis;
  const auto s = schedule_for_gate(oracle::hadamard(), "d", basis);
  ASSERT_EQ(s.segments().size(), 3u);
  EXPECT_EQ(s.segments()[0].drive.kind, DriveKind::FreeWell);
  EXPECT_EQ(s.segments()[1].drive.kind, DriveKind::XDrive);
  EXPECT_NEAR(s.segments()[1].duration, kPi / 4.0, 1e-12);
  EXPECT_EQ(s.segments()[2].drive.kind, DriveKind::FreeWell);
  // each wait realises a quarter turn about z
  for (int k : {0, 2})
    EXPECT_NEAR(std::remainder(2.0 * basis.omega() * s.segments()[k].duration - kPi / 2.0, 2 * kPi), 0.0,
                1e-12);
  CMatrix target = kron(oracle::hadamard(), CMatrix::Identity(2, 2));
  EXPECT_LT(schedule_residual(s, target, basis), 1e-10);
}

TEST(WellRun, OracleSchedules) {
  const WellBasis basis;
  GateApplication g;
  g.kind = GateKind::Oracle;
  g.oracle = OracleFunction::parse("f0");
  EXPECT_TRUE(schedule_for_gate(g, basis).empty());
  g.oracle = OracleFunction::parse("f3");
  const auto f3 = schedule_for_gate(g, basis);
  ASSERT_EQ(f3.segments().size(), 1u);
  EXPECT_EQ(f3.segments()[0].drive.target, "a");
  EXPECT_NEAR(f3.segments()[0].duration, kPi / 2.0, 1e-15);
  g.oracle = OracleFunction::parse("f2");
  const auto f2 = schedule_for_gate(g, basis);
  ASSERT_EQ(f2.segments().size(), 1u);
  EXPECT_EQ(f2.segments()[0].drive.kind, DriveKind::OracleCoupling);
  for (const auto& f : OracleFunction::all()) {
    g.oracle = f;
    EXPECT_LT(schedule_residual(schedule_for_gate(g, basis), oracle::oracle_permutation(f.index()), basis),
              1e-10)
        << f.name();
  }
}

TEST(WellRun, IdentityCompilesToNothing) {
  EXPECT_TRUE(schedule_for_gate(CMatrix::Identity(2, 2), "d", WellBasis{}).empty());
  EXPECT_EQ(rz_wait(4 * kPi, WellBasis{}), 0.0);
  EXPECT_GT(rz_wait(-0.3, WellBasis{}), 0.0);
}

TEST(WellRun, RandomUnitariesCompileExactly) {
  std::mt19937_64 gen(31);
  for (double mass : {1.0, 3.0})
    for (int k = 0; k < 50; ++k) {
      const WellBasis basis{mass};
      const CMatrix u = oracle::haar_unitary(2, gen);
      const std::string target = k % 2 ? "a" : "d";
      const auto s = schedule_for_gate(u, target, basis);
      const CMatrix full = target == "d" ? kron(u, CMatrix::Identity(2, 2)) : kron(CMatrix::Identity(2, 2), u);
      EXPECT_LT(schedule_residual(s, full, basis), 1e-9);
      for (const auto& seg : s.segments()) EXPECT_GE(seg.duration, 0.0);
    }
}

TEST(WellRun, DeutschCircuitCompiles) {
  const WellBasis basis;
  for (const auto& f : OracleFunction::all()) {
    const auto ir = deutsch_circuit(f);
    EXPECT_LT(schedule_residual(compile_well_circuit(ir, basis), well_target(ir), basis), 1e-9);
  }
  WellCompileOptions physical;
  physical.phase = PhasePolicy::Physical;
  EXPECT_THROW(compile_well_circuit(deutsch_circuit(OracleFunction::parse("f2")), basis, physical),
               UnschedulablePhase);
}

TEST(WellRun, CnotBothDirections) {
  const WellBasis basis;
  GateApplication g;
  g.kind = GateKind::CNOT;
  g.control = "d";
  g.target = "a";
  EXPECT_LT(schedule_residual(schedule_for_gate(g, basis), gates::cnot(), basis), 1e-9);
  g.control = "a";
  g.target = "d";
  EXPECT_LT(schedule_residual(schedule_for_gate(g, basis), gates::cnot_reversed(), basis), 1e-9);
}

TEST(WellRun, RegisterLabels) {
  const CVector pm = register_from_label("+-");
  EXPECT_NEAR(std::abs(pm(0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(pm(3) + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(pm(1) + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(pm(2) - 0.5), 0.0, 1e-15);
  const CVector one = register_from_label("1");
  EXPECT_EQ(one(2), Complex(1.0));
  EXPECT_THROW(register_from_label("x"), InvalidArgument);
}

TEST(WellRun, DeutschSmallEnsembles) {
  const auto p = quick();
  for (const auto& f : OracleFunction::all()) {
    const auto r = run_deutsch_well(f, p);
    EXPECT_EQ(r.outcome, f.is_constant() ? "constant" : "balanced") << f.name();
    EXPECT_TRUE(r.unanimous);
    EXPECT_EQ(r.final_mode, f.is_constant() ? 1 : 2);
    const double n2 = r.final_mode * r.final_mode;
    EXPECT_NEAR(r.displacement, p.meter.a * p.meter.duration * n2 * kPi * kPi, 1e-9);
    EXPECT_LT(r.displacement_error, 1e-9);
    EXPECT_LT(r.schedule_residual, 1e-9);
    EXPECT_TRUE(std::isnan(r.final_x_l1));
    EXPECT_TRUE(verify_ordering(r.ensemble, 0).preserved);
  }
}

TEST(WellRun, OracleKeepsAuxStill) {
  const auto r = run_deutsch_well(OracleFunction::parse("f2"), quick());
  EXPECT_LT(r.window.max_abs_vy, 1e-10);
  EXPECT_LT(r.window.max_abs_dy, 1e-10);
}

TEST(WellRun, AuxMarginalUnchangedBySingleQubitDataGate) {
  const WellBasis basis;
  const CVector c0 = register_from_label("1+");
  const auto s = schedule_for_gate(oracle::hadamard(), "d", basis);
  const WellFlow flow(basis, c0, s);
  const auto before = flow.state_at(0.0);
  const auto after = flow.state_at(flow.schedule_end());
  for (double y : {0.1, 0.4, 0.75}) EXPECT_NEAR(before.marginal_density_y(y), after.marginal_density_y(y), 1e-12);
}

TEST(WellRun, GateScenariosHitTheirTargets) {
  const WellBasis basis;
  for (const auto& name : gate_scenario_names()) {
    const auto sc = gate_scenario(name, "", basis);
    if (!sc.target) continue;
    EXPECT_LT(schedule_residual(sc.schedule, *sc.target, basis), 1e-9) << name;
  }
  EXPECT_THROW(gate_scenario("toffoli", "", basis), InvalidArgument);
}

TEST(WellRun, EquilibriumSurvivesGates) {
  // x and y marginals after the pi/8 gate and the f2 oracle, compared with
  // the marginals of the exact final coefficients.
  const WellBasis basis;
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  for (const auto& [gate, initial] : {std::pair{"t", "+"}, std::pair{"f2", "+-"}}) {
    const auto sc = gate_scenario(gate, initial, basis);
    const auto run = run_well_ensemble(basis, sc.coefficients, sc.schedule, std::nullopt,
                                       SamplerSpec::equilibrium(), 2000, 4, cfg);
    const CVector c = *sc.target * sc.coefficients;
    const WellWavefunction end(basis, c / c.norm());
    const auto last = run.ensemble.times().size() - 1;
    const double lx = equivariance_distance(run.ensemble.column(last, 0),
                                            [&](double x) { return end.marginal_cdf_x(x); }, 0, 1);
    const double ly = equivariance_distance(run.ensemble.column(last, 1),
                                            [&](double y) { return end.marginal_cdf_y(y); }, 0, 1);
    EXPECT_LT(lx, 0.08) << gate;
    EXPECT_LT(ly, 0.12) << gate;  // y is drawn conditionally, see the sampler test
  }
}

TEST(WellRun, FreeEvolutionIsApproximate) {
  WellCompileOptions opts;
  opts.include_free_evolution = true;
  const WellBasis heavy{1e4};
  const auto s = schedule_for_gate(oracle::hadamard(), "d", heavy, opts);
  const double r = schedule_residual(s, kron(oracle::hadamard(), CMatrix::Identity(2, 2)), heavy);
  EXPECT_GT(r, 1e-12);
  EXPECT_LT(r, 1e-2);
}
