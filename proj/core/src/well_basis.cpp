#include "pilotq/well_basis.hpp"

#include <array>
#include <cmath>
#include <functional>

#include "pilotq/gates.hpp"

namespace pilotq::well {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kCouplingTolerance = 1e-6;

void check_mode(int n) {
  if (n != 1 && n != 2) throw InvalidArgument("well mode index must be 1 or 2");
}

double sinc_integral(int k, double x) {
  // integral_0^x cos(k pi s) ds
  return k == 0 ? x : std::sin(k * kPi * x) / (k * kPi);
}

}  // namespace

void WellBasis::validate() const {
  if (!(mass > 0.0)) throw InvalidArgument("particle mass must be positive");
}

double WellBasis::energy(int n) const {
  check_mode(n);
  return n * n * kPi * kPi / (2.0 * mass);
}

double WellBasis::omega() const { return 0.5 * (energy(1) - energy(2)); }

double WellBasis::phase_rate() const { return 0.5 * (energy(1) + energy(2)); }

double WellBasis::beat_period() const { return kPi / std::abs(omega()); }

double mode(int n, double x) { return kSqrt2 * std::sin(n * kPi * x); }

double mode_d1(int n, double x) { return kSqrt2 * n * kPi * std::cos(n * kPi * x); }

double mode_d2(int n, double x) { return -(n * kPi) * (n * kPi) * mode(n, x); }

double mode_overlap_cdf(int m, int k, double x) {
  // 2 sin(a) sin(b) = cos(a - b) - cos(a + b)
  return sinc_integral(std::abs(m - k), x) - sinc_integral(m + k, x);
}

double mode_flux_integral(int m, int k, double x) {
  return mode_overlap_cdf(m, k, x) - (m == k ? x : 0.0);
}

double delta_v(double x) { return -(9.0 * kPi * kPi / 16.0) * (x - 0.5); }

double coupling_x_factor(const CouplingConstants& k, double x) {
  const double c = std::cos(kPi * x);
  return k.a + k.b * c + k.c * x * c;
}

double coupling_potential(const CouplingConstants& k, double x, double y) {
  return coupling_x_factor(k, x) * (delta_v(y) - 1.0);
}

namespace {

Eigen::Matrix2d mode_matrix(const QuadratureRule& rule, const std::function<double(double)>& w,
                            bool checked) {
  Eigen::Matrix2d m;
  for (int n = 1; n <= 2; ++n)
    for (int k = 1; k <= 2; ++k) {
      auto f = [&](double x) { return mode(n, x) * w(x) * mode(k, x); };
      m(n - 1, k - 1) = checked ? integrate_checked(rule, f, 0.0, 1.0) : rule.integrate(f, 0.0, 1.0);
    }
  return m;
}

CMatrix coupling_from_factors(const Eigen::Matrix2d& gx, const Eigen::Matrix2d& hy) {
  CMatrix out(4, 4);
  for (int k = 0; k < 2; ++k)
    for (int m = 0; m < 2; ++m)
      for (int l = 0; l < 2; ++l)
        for (int n = 0; n < 2; ++n) out(2 * k + m, 2 * l + n) = gx(k, l) * hy(m, n);
  return out;
}

}  // namespace

Eigen::Matrix2d delta_v_elements(const QuadratureRule& rule) {
  return mode_matrix(rule, delta_v, false);
}

Eigen::Matrix2d delta_v_matrix(const QuadratureRule& rule) {
  return mode_matrix(rule, delta_v, true);
}

CMatrix oracle_coupling_target() {
  CMatrix t = CMatrix::Zero(4, 4);
  t.block(0, 0, 2, 2) = gates::pauli_x() - gates::identity(2);
  return t;
}

CMatrix oracle_coupling_elements(const QuadratureRule& rule, const CouplingConstants& k) {
  // U(x,y) is separable, so its elements factor into x and y moments.
  const Eigen::Matrix2d gx = mode_matrix(
      rule, [&](double x) { return coupling_x_factor(k, x); }, false);
  const Eigen::Matrix2d hy = mode_matrix(
      rule, [](double y) { return delta_v(y) - 1.0; }, false);
  return coupling_from_factors(gx, hy);
}

CMatrix oracle_coupling_matrix(const QuadratureRule& rule, const CouplingConstants& k) {
  const Eigen::Matrix2d gx = mode_matrix(
      rule, [&](double x) { return coupling_x_factor(k, x); }, true);
  const Eigen::Matrix2d hy = mode_matrix(
      rule, [](double y) { return delta_v(y) - 1.0; }, true);
  CMatrix elements = coupling_from_factors(gx, hy);
  const double residual = max_abs(elements - oracle_coupling_target());
  if (residual > kCouplingTolerance)
    throw CouplingMismatch("oracle coupling constants miss the target elements (residual " +
                               std::to_string(residual) + ")",
                           residual, solve_coupling_constants(rule));
  return elements;
}

CouplingConstants solve_coupling_constants(const QuadratureRule& rule) {
  // g-factor elements: G_11 = 1, G_12 = 0, G_22 = 0, linear in (A, B, C).
  std::array<std::function<double(double)>, 3> basis_fns = {
      [](double) { return 1.0; }, [](double x) { return std::cos(kPi * x); },
      [](double x) { return x * std::cos(kPi * x); }};
  const std::array<std::pair<int, int>, 3> rows = {{{1, 1}, {1, 2}, {2, 2}}};
  Eigen::Matrix3d lhs;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const auto [n, k] = rows[r];
      lhs(r, c) = rule.integrate(
          [&](double x) { return mode(n, x) * basis_fns[c](x) * mode(k, x); }, 0.0, 1.0);
    }
  const Eigen::Vector3d rhs(1.0, 0.0, 0.0);
  const Eigen::Vector3d sol = lhs.fullPivLu().solve(rhs);
  return {sol(0), sol(1), sol(2)};
}

MatrixElementReport verify_matrix_elements(const QuadratureRule& rule, const CouplingConstants& k) {
  MatrixElementReport r;
  r.delta_v = delta_v_elements(rule);
  Eigen::Matrix2d x;
  x << 0.0, 1.0, 1.0, 0.0;
  r.delta_v_residual = (r.delta_v - x).cwiseAbs().maxCoeff();
  r.coupling = oracle_coupling_elements(rule, k);
  r.coupling_residual = max_abs(r.coupling - oracle_coupling_target());
  const Eigen::Matrix2d gram = mode_matrix(rule, [](double) { return 1.0; }, false);
  r.normalisation_residual = (gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
  r.recomputed = solve_coupling_constants(rule);
  return r;
}

CMatrix FreeEvolution::unitary(double t) const {
  return std::exp(Complex{0.0, -phase_rate * t}) * matrix_exponential(generator, t);
}

FreeEvolution free_generator(const WellBasis& basis, int n_qubits) {
  basis.validate();
  if (n_qubits != 1 && n_qubits != 2) throw InvalidArgument("well register has 1 or 2 qubits");
  const CMatrix wz = basis.omega() * gates::pauli_z();
  if (n_qubits == 1) return {wz, basis.phase_rate()};
  const CMatrix one = gates::identity(2);
  return {kron(wz, one) + kron(one, wz), 2.0 * basis.phase_rate()};
}

}  // namespace pilotq::well
