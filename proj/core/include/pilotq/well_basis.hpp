#pragma once

#include <Eigen/Dense>

#include "pilotq/errors.hpp"
#include "pilotq/linalg.hpp"
#include "pilotq/quadrature.hpp"

namespace pilotq::well {

/// Two lowest modes of a unit-length infinite well. Ket |0> is the ground
/// mode phi_1, ket |1> the first excited mode phi_2.
struct WellBasis {
  double mass = 1.0;

  void validate() const;
  /// E_n = n^2 pi^2 / (2 m)
  double energy(int n) const;
  /// (E_1 - E_2) / 2, negative for positive mass.
  double omega() const;
  /// (E_1 + E_2) / 2: rate of the overall phase per qubit.
  double phase_rate() const;
  /// Period of the two-mode density beat, pi / |omega|.
  double beat_period() const;
};

/// phi_n(x) = sqrt(2) sin(n pi x) and its first two derivatives.
double mode(int n, double x);
double mode_d1(int n, double x);
double mode_d2(int n, double x);

/// Closed form of the integral from 0 to x of (phi_m phi_k - delta_mk).
/// Vanishes at both walls.
double mode_flux_integral(int m, int k, double x);

/// Closed form of the integral from 0 to x of phi_m phi_k.
double mode_overlap_cdf(int m, int k, double x);

/// delta V(x) = -(9 pi^2 / 16)(x - 1/2)
double delta_v(double x);

/// Constants of the oracle coupling U(x,y) = g(x) [delta V(y) - 1] with
/// g(x) = A + B cos(pi x) + C x cos(pi x).
struct CouplingConstants {
  double a = 52.0 / 27.0;
  double b = -225.0 * kPi * kPi / 432.0;
  double c = 225.0 * kPi * kPi / 216.0;
};

double coupling_x_factor(const CouplingConstants& k, double x);
double coupling_potential(const CouplingConstants& k, double x, double y);

/// Raised when the supplied constants do not reproduce the required matrix
/// elements; carries the constants that would.
class CouplingMismatch : public Error {
 public:
  CouplingMismatch(const std::string& what, double residual, CouplingConstants recomputed)
      : Error(what), residual_(residual), recomputed_(recomputed) {}
  double residual() const noexcept { return residual_; }
  const CouplingConstants& recomputed() const noexcept { return recomputed_; }

 private:
  double residual_;
  CouplingConstants recomputed_;
};

/// <phi_n | delta V | phi_m> for n, m in {1, 2} by quadrature, without the
/// convergence check.
Eigen::Matrix2d delta_v_elements(const QuadratureRule& rule);

/// Checked version: throws QuadratureError if the rule has not converged.
Eigen::Matrix2d delta_v_matrix(const QuadratureRule& rule);

/// <phi_k phi_m | U | phi_l phi_n> in register order (data k,l; aux m,n),
/// unchecked.
CMatrix oracle_coupling_elements(const QuadratureRule& rule, const CouplingConstants& k = {});

/// Checked version: the target is (X - 1)_{mn} for k = l = 1 and zero
/// otherwise. Throws QuadratureError on non-convergence and CouplingMismatch
/// when the elements miss the target by more than 1e-6.
CMatrix oracle_coupling_matrix(const QuadratureRule& rule, const CouplingConstants& k = {});

/// The 4x4 target (X - 1) (+) 0.
CMatrix oracle_coupling_target();

/// Solves the 3x3 system for (A, B, C) from quadrature moments.
CouplingConstants solve_coupling_constants(const QuadratureRule& rule);

struct MatrixElementReport {
  Eigen::Matrix2d delta_v;
  double delta_v_residual = 0.0;
  CMatrix coupling;
  double coupling_residual = 0.0;
  double normalisation_residual = 0.0;
  CouplingConstants recomputed;
};

/// Everything checked by `pilotq verify`: residuals against X and
/// (X - 1) (+) 0, plus orthonormality of the basis under the rule.
MatrixElementReport verify_matrix_elements(const QuadratureRule& rule,
                                           const CouplingConstants& k = {});

/// Free well evolution: H = omega Z per qubit plus an overall phase rate.
struct FreeEvolution {
  CMatrix generator;
  double phase_rate = 0.0;

  CMatrix unitary(double t) const;
};

FreeEvolution free_generator(const WellBasis& basis, int n_qubits);

}  // namespace pilotq::well
