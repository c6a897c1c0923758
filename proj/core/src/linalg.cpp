#include "pilotq/linalg.hpp"

#include <cmath>
#include <string>

#include "pilotq/errors.hpp"

namespace pilotq {

namespace {
constexpr double kHermitianTolerance = 1e-9;
}

double max_abs(const CMatrix& m) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out = std::max(out, std::abs(m(i, j)));
  return out;
}

double hermiticity_error(const CMatrix& h) {
  if (h.rows() != h.cols()) throw InvalidArgument("matrix is not square");
  return max_abs(h - h.adjoint());
}

double unitarity_error(const CMatrix& u) {
  if (u.rows() != u.cols()) throw InvalidArgument("matrix is not square");
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols()));
}

double phase_insensitive_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("matrix shapes differ");
  // Best phase aligns the Frobenius inner product <a, b>.
  const Complex overlap = (a.adjoint() * b).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0};
  return max_abs(a * phase - b);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianSpectrum hermitian_spectrum(const CMatrix& h) {
  const double asym = hermiticity_error(h);
  if (asym > kHermitianTolerance)
    throw InvalidArgument("generator is not Hermitian (max asymmetry " + std::to_string(asym) +
                          ")");
  // Symmetrise so the solver only sees round-off-free input.
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix matrix_exponential(const HermitianSpectrum& spectrum, double t) {
  const auto n = spectrum.eigenvalues.size();
  CVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k)
    phases(k) = std::exp(Complex{0.0, -spectrum.eigenvalues(k) * t});
  return spectrum.eigenvectors * phases.asDiagonal() * spectrum.eigenvectors.adjoint();
}

CMatrix matrix_exponential(const CMatrix& h, double t) {
  return matrix_exponential(hermitian_spectrum(h), t);
}

}  // namespace pilotq
