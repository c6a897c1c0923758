#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pilotq/gates.hpp"

namespace pilotq {

/// Gate names understood by the compiler.
enum class GateKind { H, X, Z, T, RZ, RX, CNOT, Oracle };

/// One gate application. Targets are qubit names "d" (data) or "a"
/// (auxiliary); CNOT additionally has a control, RZ/RX an angle, Oracle a
/// function id and acts on both qubits.
struct GateApplication {
  GateKind kind = GateKind::H;
  std::string target = "d";
  std::string control;
  double angle = 0.0;
  std::optional<OracleFunction> oracle;

  std::string label() const;
};

struct MeasurementSpec {
  std::string qubit = "d";
  /// Free-form apparatus parameters (coupling, duration, packet width...).
  nlohmann::json apparatus = nlohmann::json::object();
};

struct CircuitIR {
  std::string initial = "01";
  std::vector<GateApplication> gates;
  std::optional<MeasurementSpec> measure;

  int qubits() const { return static_cast<int>(initial.size()); }
  RegisterState initial_state() const { return RegisterState::basis(initial); }
};

/// Rejects unknown qubit names, missing oracle ids and two-qubit gates on a
/// one-qubit register.
void validate(const CircuitIR& ir);

/// [H(d), H(a), U_f, H(d)] then measure d, starting from |0>_d |1>_a.
CircuitIR deutsch_circuit(const OracleFunction& f);

/// The gate as a unitary on the full register (single-qubit gates are
/// tensored with the identity on the other qubit).
CMatrix gate_unitary(const GateApplication& gate, int qubits);

/// Product of gate unitaries, last gate leftmost.
CMatrix circuit_unitary(const CircuitIR& ir);

/// Embeds a 2x2 operator acting on `target` into a register of `qubits`.
CMatrix embed_single(const CMatrix& op, const std::string& target, int qubits);

GateKind parse_gate_kind(const std::string& name);
std::string gate_kind_name(GateKind kind);

CircuitIR circuit_from_json(const nlohmann::json& j);
nlohmann::json circuit_to_json(const CircuitIR& ir);

}  // namespace pilotq
