#include "pilotq/gates.hpp"

#include <cmath>

#include "pilotq/errors.hpp"

namespace pilotq {

RegisterState::RegisterState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != 2 && amplitudes_.size() != 4)
    throw InvalidArgument("register dimension must be 2 or 4");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw InvalidArgument("register state is not normalised");
}

RegisterState RegisterState::basis(std::string_view bits) {
  if (bits.empty() || bits.size() > 2) throw InvalidArgument("basis label must have 1 or 2 bits");
  Eigen::Index index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidArgument("basis label must contain only 0/1");
    index = 2 * index + (c - '0');
  }
  CVector v = CVector::Zero(bits.size() == 1 ? 2 : 4);
  v(index) = 1.0;
  return RegisterState(std::move(v));
}

CMatrix HermitianGenerator::unitary() const { return unitary_at(duration); }

CMatrix HermitianGenerator::unitary_at(double t) const { return matrix_exponential(matrix, t); }

OracleFunction OracleFunction::parse(std::string_view name) {
  if (name == "f0") return OracleFunction(Id::f0);
  if (name == "f1") return OracleFunction(Id::f1);
  if (name == "f2") return OracleFunction(Id::f2);
  if (name == "f3") return OracleFunction(Id::f3);
  throw InvalidArgument("unknown oracle '" + std::string(name) + "' (expected f0..f3)");
}

std::array<OracleFunction, 4> OracleFunction::all() {
  return {OracleFunction(Id::f0), OracleFunction(Id::f1), OracleFunction(Id::f2),
          OracleFunction(Id::f3)};
}

std::string OracleFunction::name() const { return "f" + std::to_string(index()); }

int OracleFunction::operator()(int p) const {
  if (p != 0 && p != 1) throw InvalidArgument("oracle argument must be 0 or 1");
  // f0: 00, f1: 01, f2: 10, f3: 11 (values at p = 0, 1).
  switch (id_) {
    case Id::f0: return 0;
    case Id::f1: return p;
    case Id::f2: return 1 - p;
    case Id::f3: return 1;
  }
  return 0;
}

namespace gates {

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMatrix hadamard() {
  CMatrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

CMatrix t_gate() {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = std::exp(Complex{0.0, kPi / 4.0});
  return m;
}

CMatrix rz(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::exp(Complex{0.0, -theta / 2.0});
  m(1, 1) = std::exp(Complex{0.0, theta / 2.0});
  return m;
}

CMatrix rx(double theta) {
  CMatrix m(2, 2);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  m << c, Complex{0.0, -s}, Complex{0.0, -s}, c;
  return m;
}

CMatrix cnot() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return m;
}

CMatrix cnot_reversed() {
  CMatrix m = CMatrix::Zero(4, 4);
  // |m n> -> |m xor n, n>
  m(0, 0) = 1.0;
  m(3, 1) = 1.0;
  m(2, 2) = 1.0;
  m(1, 3) = 1.0;
  return m;
}

}  // namespace gates

HermitianGenerator involution_generator(const CMatrix& u, double t) {
  if (!(t > 0.0)) throw InvalidArgument("gate duration must be positive");
  const CMatrix one = CMatrix::Identity(u.rows(), u.cols());
  return {(kPi / 2.0) * (u - one) / t, t};
}

HermitianGenerator hadamard_generator(double t_had) {
  return involution_generator(gates::hadamard(), t_had);
}

UnitaryGate partial_gate_unitary(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("gate fraction must lie in [0, 1]");
  const double half = a * kPi / 2.0;
  CMatrix u = (std::cos(half) * gates::identity(2) - kI * std::sin(half) * gates::hadamard()) *
              std::exp(Complex{0.0, half});
  return {std::move(u), "H(" + std::to_string(a) + ")"};
}

UnitaryGate oracle_unitary(const OracleFunction& f) {
  CMatrix u = CMatrix::Zero(4, 4);
  for (int p = 0; p < 2; ++p) {
    const CMatrix block = f(p) == 0 ? gates::identity(2) : gates::pauli_x();
    u.block(2 * p, 2 * p, 2, 2) = block;
  }
  return {std::move(u), "U_" + f.name()};
}

HermitianGenerator oracle_generator(const OracleFunction& f, double t_or) {
  if (!(t_or > 0.0)) throw InvalidArgument("oracle duration must be positive");
  CMatrix h = CMatrix::Zero(4, 4);
  const CMatrix x_minus_one = gates::pauli_x() - gates::identity(2);
  for (int p = 0; p < 2; ++p)
    if (f(p) == 1) h.block(2 * p, 2 * p, 2, 2) = (kPi / 2.0) * x_minus_one / t_or;
  return {std::move(h), t_or};
}

HermitianGenerator pi8_generator(double t) {
  if (!(t > 0.0)) throw InvalidArgument("pi/8 gate duration must be positive");
  return {(kPi / 8.0) * (gates::pauli_z() - gates::identity(2)) / t, t};
}

}  // namespace pilotq
