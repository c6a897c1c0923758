#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace pilotq {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Largest absolute entry of `m`.
double max_abs(const CMatrix& m);

/// max |H - H^dagger| entrywise.
double hermiticity_error(const CMatrix& h);

/// max |U^dagger U - 1| entrywise.
double unitarity_error(const CMatrix& u);

/// Distance between two matrices after removing the best global phase.
double phase_insensitive_distance(const CMatrix& a, const CMatrix& b);

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Spectral data of a Hermitian matrix, H = V diag(lambda) V^dagger.
struct HermitianSpectrum {
  Eigen::VectorXd eigenvalues;
  CMatrix eigenvectors;
};

/// Eigendecomposition of a Hermitian matrix. Throws InvalidArgument when the
/// input deviates from Hermitian by more than 1e-9.
HermitianSpectrum hermitian_spectrum(const CMatrix& h);

/// exp(-i H t) computed from the Hermitian eigendecomposition of H.
CMatrix matrix_exponential(const CMatrix& h, double t);

/// exp(-i H t) from a precomputed spectrum.
CMatrix matrix_exponential(const HermitianSpectrum& spectrum, double t);

}  // namespace pilotq
