#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pilotq/circuit.hpp"
#include "pilotq/gates.hpp"

namespace pilotq {

/// One piecewise-constant stretch of evolution. The segment unitary is
/// e^{-i phase_rate t} exp(-i H t); the scalar rate lets callers keep an
/// overall phase (such as the free-well energy offset) out of H.
struct ScheduleSegment {
  std::string label;
  HermitianGenerator generator;
  double phase_rate = 0.0;

  double duration() const { return generator.duration; }
  CMatrix unitary_at(double t) const;
};

/// Ordered generator segments plus a phase correction applied once the last
/// segment has finished.
class HamiltonianSchedule {
 public:
  HamiltonianSchedule() = default;
  explicit HamiltonianSchedule(int dim) : dim_(dim) {}

  void append(ScheduleSegment segment);
  void append(const HamiltonianSchedule& other);

  int dim() const noexcept { return dim_; }
  const std::vector<ScheduleSegment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }
  double total_duration() const;

  /// Phase e^{i phi} applied at the end of the schedule.
  double phase_correction() const noexcept { return phase_correction_; }
  void add_phase_correction(double phi) { phase_correction_ += phi; }

  /// Ordered product of all segment unitaries, including the correction.
  CMatrix unitary() const;
  /// Evolution from 0 to t; the correction is included once t reaches the end.
  CMatrix unitary_at(double t) const;

  /// Index of the segment active at t and the start time of that segment.
  std::pair<std::size_t, double> locate(double t) const;

 private:
  int dim_ = 4;
  std::vector<ScheduleSegment> segments_;
  double phase_correction_ = 0.0;
};

/// Durations used when turning gates into generator segments.
struct GateTimings {
  double hadamard = 1.0;
  double oracle = kPi / 2.0;
  double pi8 = 1.0;
  /// X, Z, CNOT, RZ and RX.
  double other = 1.0;
};

/// Generator for a single gate application embedded in the register.
HermitianGenerator gate_generator(const GateApplication& gate, int qubits,
                                  const GateTimings& timings);

/// One segment per gate; the product of segment unitaries is the circuit
/// unitary.
HamiltonianSchedule compile_circuit(const CircuitIR& ir, const GateTimings& timings = {});

/// Propagates through completed segments and partially through the active one.
RegisterState evolve_register(const RegisterState& state, const HamiltonianSchedule& schedule,
                              double t);

/// [{label, duration, phase_rate, dim, matrix: [[re, im], ...] row-major}, ...]
nlohmann::json schedule_to_json(const HamiltonianSchedule& schedule);
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j, int dim);

/// FNV-1a over the compact JSON dump, rendered as 16 hex digits.
std::string schedule_hash(const HamiltonianSchedule& schedule);
std::string fnv1a_hex(const std::string& text);

}  // namespace pilotq
