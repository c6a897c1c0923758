#include "pilotq/circuit.hpp"

#include <sstream>

#include "pilotq/errors.hpp"

namespace pilotq {

namespace {

void check_qubit(const std::string& q, int qubits) {
  if (q == "d") return;
  if (q == "a" && qubits == 2) return;
  throw InvalidArgument("invalid qubit name '" + q + "'");
}

}  // namespace

GateKind parse_gate_kind(const std::string& name) {
  if (name == "H") return GateKind::H;
  if (name == "X") return GateKind::X;
  if (name == "Z") return GateKind::Z;
  if (name == "T") return GateKind::T;
  if (name == "RZ") return GateKind::RZ;
  if (name == "RX") return GateKind::RX;
  if (name == "CNOT") return GateKind::CNOT;
  if (name == "ORACLE") return GateKind::Oracle;
  throw InvalidArgument("unknown gate '" + name + "'");
}

std::string gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::T: return "T";
    case GateKind::RZ: return "RZ";
    case GateKind::RX: return "RX";
    case GateKind::CNOT: return "CNOT";
    case GateKind::Oracle: return "ORACLE";
  }
  return "?";
}

std::string GateApplication::label() const {
  std::ostringstream out;
  if (kind == GateKind::Oracle) {
    out << "U_" << (oracle ? oracle->name() : std::string("?"));
    return out.str();
  }
  out << gate_kind_name(kind);
  if (kind == GateKind::RZ || kind == GateKind::RX) out << "(" << angle << ")";
  if (kind == GateKind::CNOT) out << "(" << control << "->" << target << ")";
  else out << "(" << target << ")";
  return out.str();
}

void validate(const CircuitIR& ir) {
  const int n = ir.qubits();
  if (n != 1 && n != 2) throw InvalidArgument("initial state must name 1 or 2 qubits");
  (void)RegisterState::basis(ir.initial);
  for (const auto& g : ir.gates) {
    switch (g.kind) {
      case GateKind::Oracle:
        if (n != 2) throw InvalidArgument("oracle needs a two-qubit register");
        if (!g.oracle) throw InvalidArgument("oracle gate without a function id");
        break;
      case GateKind::CNOT:
        if (n != 2) throw InvalidArgument("CNOT needs a two-qubit register");
        check_qubit(g.control, n);
        check_qubit(g.target, n);
        if (g.control == g.target) throw InvalidArgument("CNOT control equals target");
        break;
      default:
        check_qubit(g.target, n);
    }
  }
  if (ir.measure) check_qubit(ir.measure->qubit, n);
}

CircuitIR deutsch_circuit(const OracleFunction& f) {
  CircuitIR ir;
  ir.initial = "01";
  ir.gates.push_back({GateKind::H, "d", "", 0.0, std::nullopt});
  ir.gates.push_back({GateKind::H, "a", "", 0.0, std::nullopt});
  ir.gates.push_back({GateKind::Oracle, "", "", 0.0, f});
  ir.gates.push_back({GateKind::H, "d", "", 0.0, std::nullopt});
  ir.measure = MeasurementSpec{};
  return ir;
}

CMatrix embed_single(const CMatrix& op, const std::string& target, int qubits) {
  if (qubits == 1) {
    check_qubit(target, 1);
    return op;
  }
  check_qubit(target, 2);
  const CMatrix one = gates::identity(2);
  return target == "d" ? kron(op, one) : kron(one, op);
}

CMatrix gate_unitary(const GateApplication& gate, int qubits) {
  switch (gate.kind) {
    case GateKind::H: return embed_single(gates::hadamard(), gate.target, qubits);
    case GateKind::X: return embed_single(gates::pauli_x(), gate.target, qubits);
    case GateKind::Z: return embed_single(gates::pauli_z(), gate.target, qubits);
    case GateKind::T: return embed_single(gates::t_gate(), gate.target, qubits);
    case GateKind::RZ: return embed_single(gates::rz(gate.angle), gate.target, qubits);
    case GateKind::RX: return embed_single(gates::rx(gate.angle), gate.target, qubits);
    case GateKind::CNOT:
      if (qubits != 2) throw InvalidArgument("CNOT needs a two-qubit register");
      return gate.control == "d" ? gates::cnot() : gates::cnot_reversed();
    case GateKind::Oracle:
      if (qubits != 2 || !gate.oracle) throw InvalidArgument("malformed oracle gate");
      return oracle_unitary(*gate.oracle).matrix;
  }
  throw InvalidArgument("unknown gate");
}

CMatrix circuit_unitary(const CircuitIR& ir) {
  validate(ir);
  const int dim = ir.qubits() == 1 ? 2 : 4;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& g : ir.gates) u = gate_unitary(g, ir.qubits()) * u;
  return u;
}

CircuitIR circuit_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("circuit must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "initial" && key != "gates" && key != "measure")
      throw InvalidArgument("unknown circuit key '" + key + "'");
  }
  CircuitIR ir;
  ir.initial = j.value("initial", std::string("01"));
  if (j.contains("gates")) {
    if (!j["gates"].is_array()) throw InvalidArgument("'gates' must be an array");
    for (const auto& g : j["gates"]) {
      if (!g.is_object() || !g.contains("name") || !g["name"].is_string())
        throw InvalidArgument("each gate needs a string 'name'");
      GateApplication app;
      app.kind = parse_gate_kind(g["name"].get<std::string>());
      app.target = g.value("target", std::string(app.kind == GateKind::CNOT ? "a" : "d"));
      if (app.kind == GateKind::CNOT) app.control = g.value("control", std::string("d"));
      if (app.kind == GateKind::RZ || app.kind == GateKind::RX) {
        if (!g.contains("angle") || !g["angle"].is_number())
          throw InvalidArgument("rotation gate needs a numeric 'angle'");
        app.angle = g["angle"].get<double>();
      }
      if (app.kind == GateKind::Oracle) {
        if (!g.contains("oracle") || !g["oracle"].is_string())
          throw InvalidArgument("oracle gate needs an 'oracle' id");
        app.oracle = OracleFunction::parse(g["oracle"].get<std::string>());
        app.target.clear();
      }
      ir.gates.push_back(std::move(app));
    }
  }
  if (j.contains("measure") && !j["measure"].is_null()) {
    const auto& m = j["measure"];
    if (!m.is_object()) throw InvalidArgument("'measure' must be an object");
    MeasurementSpec spec;
    spec.qubit = m.value("qubit", std::string("d"));
    if (m.contains("apparatus")) spec.apparatus = m["apparatus"];
    ir.measure = spec;
  }
  validate(ir);
  return ir;
}

nlohmann::json circuit_to_json(const CircuitIR& ir) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : ir.gates) {
    nlohmann::json e{{"name", gate_kind_name(g.kind)}};
    if (g.kind == GateKind::Oracle) {
      e["oracle"] = g.oracle->name();
    } else {
      e["target"] = g.target;
    }
    if (g.kind == GateKind::CNOT) e["control"] = g.control;
    if (g.kind == GateKind::RZ || g.kind == GateKind::RX) e["angle"] = g.angle;
    gates.push_back(std::move(e));
  }
  nlohmann::json out{{"initial", ir.initial}, {"gates", std::move(gates)}};
  if (ir.measure) {
    out["measure"] = {{"qubit", ir.measure->qubit}};
    if (!ir.measure->apparatus.empty()) out["measure"]["apparatus"] = ir.measure->apparatus;
  }
  return out;
}

}  // namespace pilotq
