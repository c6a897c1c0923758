#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "pilotq/linalg.hpp"

namespace pilotq {

/// Amplitude vector of the abstract register. Dimension 2 holds a single
/// qubit; dimension 4 holds data (x) auxiliary with index 2*m + n.
class RegisterState {
 public:
  explicit RegisterState(CVector amplitudes);

  /// Computational basis state from a bit string such as "0" or "01"
  /// (data bit first).
  static RegisterState basis(std::string_view bits);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  int qubits() const noexcept { return dim() == 2 ? 1 : 2; }
  double norm() const { return amplitudes_.norm(); }

 private:
  CVector amplitudes_;
};

/// A unitary matrix with a display label.
struct UnitaryGate {
  CMatrix matrix;
  std::string label;
};

/// Hermitian generator H (inverse time units) switched on for `duration`;
/// the gate it realises is exp(-i H duration).
struct HermitianGenerator {
  CMatrix matrix;
  double duration = 0.0;

  CMatrix unitary() const;
  CMatrix unitary_at(double t) const;
};

/// The four functions {0,1} -> {0,1} enumerated f0..f3.
class OracleFunction {
 public:
  enum class Id { f0 = 0, f1 = 1, f2 = 2, f3 = 3 };

  explicit OracleFunction(Id id) : id_(id) {}
  static OracleFunction parse(std::string_view name);
  static std::array<OracleFunction, 4> all();

  Id id() const noexcept { return id_; }
  int index() const noexcept { return static_cast<int>(id_); }
  std::string name() const;
  /// f(p) for p in {0,1}.
  int operator()(int p) const;
  bool is_constant() const { return (*this)(0) == (*this)(1); }

  friend bool operator==(const OracleFunction&, const OracleFunction&) = default;

 private:
  Id id_;
};

namespace gates {
CMatrix identity(int dim);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix hadamard();
/// pi/8 gate diag(1, e^{i pi/4}).
CMatrix t_gate();
/// exp(-i theta Z / 2)
CMatrix rz(double theta);
/// exp(-i theta X / 2)
CMatrix rx(double theta);
/// Control on the data qubit, target the auxiliary.
CMatrix cnot();
/// Control on the auxiliary qubit, target the data qubit.
CMatrix cnot_reversed();
}  // namespace gates

/// Hadamard generator (pi/2)(H - 1) / t_had.
HermitianGenerator hadamard_generator(double t_had);

/// Evolution operator a fraction `a` of the way through a Hadamard gate:
/// [cos(a pi/2) 1 - i sin(a pi/2) H] e^{i a pi/2}.
UnitaryGate partial_gate_unitary(double a);

/// Block-diagonal oracle U_f acting as |p>|q> -> |p>|q xor f(p)>.
UnitaryGate oracle_unitary(const OracleFunction& f);

/// Generator of U_f over t_or; zero for f0.
HermitianGenerator oracle_generator(const OracleFunction& f, double t_or);

/// Generator (pi/8)(Z - 1)/t of the pi/8 gate.
HermitianGenerator pi8_generator(double t);

/// For a Hermitian involution U (U^2 = 1) the generator (pi/2)(U - 1)/t
/// reproduces U exactly after time t.
HermitianGenerator involution_generator(const CMatrix& u, double t);

}  // namespace pilotq
