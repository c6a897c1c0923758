#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pilotq/circuit.hpp"
#include "pilotq/errors.hpp"
#include "pilotq/schedule.hpp"

using namespace pilotq;

namespace {

// Statevector simulation that applies gates by index arithmetic.
Eigen::Vector4cd simulate_deutsch(int f) {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0;  // |0>_d |1>_a
  v = oracle::apply_single(oracle::hadamard(), 0, v);
  v = oracle::apply_single(oracle::hadamard(), 1, v);
  Eigen::Vector4cd w = Eigen::Vector4cd::Zero();
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) w(2 * p + (q ^ oracle::truth(f, p))) += v(2 * p + q);
  return oracle::apply_single(oracle::hadamard(), 0, w);
}

GateApplication gate(GateKind k, std::string target = "d") {
  GateApplication g;
  g.kind = k;
  g.target = std::move(target);
  return g;
}

}  // namespace

TEST(Circuit, DeutschMatchesStatevectorOracle) {
  for (const auto& f : OracleFunction::all()) {
    const auto ir = deutsch_circuit(f);
    const CVector got = circuit_unitary(ir) * ir.initial_state().amplitudes();
    const Eigen::Vector4cd want = simulate_deutsch(f.index());
    EXPECT_LT((got - CVector(want)).cwiseAbs().maxCoeff(), 1e-14) << f.name();
    // data qubit reads f(0) xor f(1)
    const double p1 = std::norm(got(2)) + std::norm(got(3));
    EXPECT_NEAR(p1, f.is_constant() ? 0.0 : 1.0, 1e-14);
  }
}

TEST(Circuit, CompiledScheduleReproducesCircuit) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> ang(-4.0, 4.0);
  std::uniform_int_distribution<int> pick(0, 7);
  for (int trial = 0; trial < 30; ++trial) {
    CircuitIR ir;
    ir.initial = "01";
    for (int k = 0; k < 8; ++k) {
      auto g = gate(static_cast<GateKind>(pick(gen)), k % 2 ? "a" : "d");
      if (g.kind == GateKind::CNOT) {
        g.control = g.target == "a" ? "d" : "a";
      } else if (g.kind == GateKind::Oracle) {
        g.oracle = OracleFunction(static_cast<OracleFunction::Id>(k % 4));
        g.target.clear();
      }
      g.angle = ang(gen);
      ir.gates.push_back(g);
    }
    const auto schedule = compile_circuit(ir);
    EXPECT_LT(oracle::max_abs(schedule.unitary() - circuit_unitary(ir)), 1e-10);
  }
}

TEST(Circuit, EvolveRegisterHalfwayAndEnd) {
  CircuitIR ir;
  ir.initial = "0";
  ir.gates = {gate(GateKind::H)};
  GateTimings timings;
  timings.hadamard = 2.0;
  const auto schedule = compile_circuit(ir, timings);
  const auto end = evolve_register(ir.initial_state(), schedule, 2.0);
  EXPECT_NEAR(end.amplitudes()(0).real(), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(end.amplitudes()(1).real(), 1.0 / std::sqrt(2.0), 1e-12);
  const auto half = evolve_register(ir.initial_state(), schedule, 1.0);
  const CVector want = partial_gate_unitary(0.5).matrix.col(0);
  EXPECT_LT((half.amplitudes() - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(evolve_register(ir.initial_state(), schedule, 2.5), InvalidArgument);
  EXPECT_THROW(evolve_register(RegisterState::basis("00"), schedule, 1.0), InvalidArgument);
}

TEST(Circuit, PhaseCorrectionAppliedAtEnd) {
  HamiltonianSchedule s(2);
  s.append(ScheduleSegment{"z", {gates::pauli_z(), 1.0}, 0.0});
  s.add_phase_correction(0.7);
  EXPECT_LT(oracle::max_abs(s.unitary_at(0.5) - gates::rz(1.0)), 1e-14);
  EXPECT_LT(oracle::max_abs(s.unitary() - std::polar(1.0, 0.7) * gates::rz(2.0)), 1e-14);
}

TEST(Circuit, JsonRoundTrip) {
  auto ir = deutsch_circuit(OracleFunction::parse("f2"));
  auto rz = gate(GateKind::RZ, "a");
  rz.angle = 0.25;
  ir.gates.push_back(rz);
  auto cn = gate(GateKind::CNOT, "d");
  cn.control = "a";
  ir.gates.push_back(cn);
  ir.measure = MeasurementSpec{"d", {{"g", 2.0}}};
  const auto j = circuit_to_json(ir);
  const auto back = circuit_from_json(j);
  EXPECT_EQ(circuit_to_json(back), j);
  EXPECT_LT(oracle::max_abs(circuit_unitary(back) - circuit_unitary(ir)), 1e-15);
}

TEST(Circuit, RejectsMalformedJson) {
  using nlohmann::json;
  EXPECT_THROW(circuit_from_json(json{{"initial", "01"}, {"bogus", 1}}), InvalidArgument);
  EXPECT_THROW(circuit_from_json(json{{"gates", json::array({{{"name", "Q"}}})}}), InvalidArgument);
  EXPECT_THROW(circuit_from_json(json{{"gates", json::array({{{"name", "RZ"}}})}}), InvalidArgument);
  EXPECT_THROW(circuit_from_json(json{{"initial", "0"},
                                      {"gates", json::array({{{"name", "ORACLE"}, {"oracle", "f1"}}})}}),
               InvalidArgument);
  EXPECT_THROW(circuit_from_json(json{{"gates", json::array({{{"name", "H"}, {"target", "b"}}})}}),
               InvalidArgument);
  EXPECT_THROW(circuit_from_json(json::array()), InvalidArgument);
}

TEST(Circuit, ScheduleHashIsStable) {
  const auto a = compile_circuit(deutsch_circuit(OracleFunction::parse("f1")));
  const auto b = compile_circuit(deutsch_circuit(OracleFunction::parse("f1")));
  const auto c = compile_circuit(deutsch_circuit(OracleFunction::parse("f2")));
  EXPECT_EQ(schedule_hash(a), schedule_hash(b));
  EXPECT_NE(schedule_hash(a), schedule_hash(c));
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Circuit, MatrixJsonRoundTrip) {
  std::mt19937_64 gen(1);
  const CMatrix u = oracle::haar_unitary(4, gen);
  EXPECT_LT(oracle::max_abs(matrix_from_json(matrix_to_json(u), 4) - u), 1e-16);
  EXPECT_THROW(matrix_from_json(matrix_to_json(u), 2), InvalidArgument);
}
