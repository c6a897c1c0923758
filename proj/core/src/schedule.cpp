#include "pilotq/schedule.hpp"

#include <cmath>
#include <cstdio>

#include "pilotq/errors.hpp"

namespace pilotq {

CMatrix ScheduleSegment::unitary_at(double t) const {
  return std::exp(Complex{0.0, -phase_rate * t}) * generator.unitary_at(t);
}

void HamiltonianSchedule::append(ScheduleSegment segment) {
  if (segment.generator.matrix.rows() != dim_)
    throw InvalidArgument("segment dimension does not match schedule");
  if (segment.generator.duration < 0.0) throw InvalidArgument("negative segment duration");
  segments_.push_back(std::move(segment));
}

void HamiltonianSchedule::append(const HamiltonianSchedule& other) {
  if (other.dim_ != dim_) throw InvalidArgument("schedule dimensions differ");
  for (const auto& s : other.segments_) segments_.push_back(s);
  phase_correction_ += other.phase_correction_;
}

double HamiltonianSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments_) total += s.duration();
  return total;
}

CMatrix HamiltonianSchedule::unitary() const { return unitary_at(total_duration()); }

std::pair<std::size_t, double> HamiltonianSchedule::locate(double t) const {
  double start = 0.0;
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const double end = start + segments_[k].duration();
    if (t < end) return {k, start};
    start = end;
  }
  return {segments_.size(), start};
}

CMatrix HamiltonianSchedule::unitary_at(double t) const {
  const double total = total_duration();
  if (t < 0.0 || t > total * (1.0 + 1e-15) + 1e-15)
    throw InvalidArgument("time outside the schedule");
  CMatrix u = CMatrix::Identity(dim_, dim_);
  double start = 0.0;
  for (const auto& s : segments_) {
    const double local = std::min(s.duration(), t - start);
    if (local <= 0.0) break;
    u = s.unitary_at(local) * u;
    start += s.duration();
  }
  if (t >= total) u *= std::exp(Complex{0.0, phase_correction_});
  return u;
}

HermitianGenerator gate_generator(const GateApplication& gate, int qubits,
                                  const GateTimings& timings) {
  auto embed = [&](const HermitianGenerator& g) {
    return HermitianGenerator{embed_single(g.matrix, gate.target, qubits), g.duration};
  };
  switch (gate.kind) {
    case GateKind::H: return embed(hadamard_generator(timings.hadamard));
    case GateKind::X: return embed(involution_generator(gates::pauli_x(), timings.other));
    case GateKind::Z: return embed(involution_generator(gates::pauli_z(), timings.other));
    case GateKind::T: return embed(pi8_generator(timings.pi8));
    case GateKind::RZ:
    case GateKind::RX: {
      if (!(timings.other > 0.0)) throw InvalidArgument("gate duration must be positive");
      const CMatrix axis = gate.kind == GateKind::RZ ? gates::pauli_z() : gates::pauli_x();
      return embed({(gate.angle / 2.0) * axis / timings.other, timings.other});
    }
    case GateKind::CNOT:
      return involution_generator(gate_unitary(gate, qubits), timings.other);
    case GateKind::Oracle:
      if (qubits != 2 || !gate.oracle) throw InvalidArgument("malformed oracle gate");
      return oracle_generator(*gate.oracle, timings.oracle);
  }
  throw InvalidArgument("gate has no generator");
}

HamiltonianSchedule compile_circuit(const CircuitIR& ir, const GateTimings& timings) {
  validate(ir);
  const int qubits = ir.qubits();
  HamiltonianSchedule schedule(qubits == 1 ? 2 : 4);
  for (const auto& g : ir.gates)
    schedule.append(ScheduleSegment{g.label(), gate_generator(g, qubits, timings), 0.0});
  return schedule;
}

RegisterState evolve_register(const RegisterState& state, const HamiltonianSchedule& schedule,
                              double t) {
  if (state.dim() != schedule.dim()) throw InvalidArgument("state and schedule dimensions differ");
  if (t < 0.0 || t > schedule.total_duration() * (1.0 + 1e-15) + 1e-15)
    throw InvalidArgument("time outside the schedule");
  CVector psi = schedule.unitary_at(t) * state.amplitudes();
  return RegisterState(std::move(psi));
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out.push_back({m(i, j).real(), m(i, j).imag()});
  return out;
}

CMatrix matrix_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim * dim)
    throw InvalidArgument("matrix JSON has the wrong size");
  CMatrix m(dim, dim);
  for (int k = 0; k < dim * dim; ++k)
    m(k / dim, k % dim) = Complex{j[k].at(0).get<double>(), j[k].at(1).get<double>()};
  return m;
}

nlohmann::json schedule_to_json(const HamiltonianSchedule& schedule) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : schedule.segments()) {
    out.push_back({{"label", s.label},
                   {"duration", s.duration()},
                   {"phase_rate", s.phase_rate},
                   {"dim", s.generator.matrix.rows()},
                   {"matrix", matrix_to_json(s.generator.matrix)}});
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string schedule_hash(const HamiltonianSchedule& schedule) {
  nlohmann::json j{{"segments", schedule_to_json(schedule)},
                   {"phase_correction", schedule.phase_correction()}};
  return fnv1a_hex(j.dump());
}

}  // namespace pilotq
