#include "pilotq/quadrature.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "pilotq/errors.hpp"

namespace pilotq {

QuadratureRule::QuadratureRule(int panels, int order, double tolerance)
    : panels_(panels), order_(order), tolerance_(tolerance) {
  if (panels < 1) throw InvalidArgument("quadrature needs at least one panel");
  if (order < 1 || order > 64) throw InvalidArgument("quadrature order must be in [1, 64]");
  if (!(tolerance > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");

  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // Legendre recurrence, weights 2 * (first eigenvector component)^2.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  nodes_.resize(order);
  weights_.resize(order);
  for (int k = 0; k < order; ++k) {
    nodes_[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    weights_[k] = 2.0 * v * v;
  }
}

double QuadratureRule::integrate(const std::function<double(double)>& f, double a,
                                 double b) const {
  const double h = (b - a) / panels_;
  double sum = 0.0;
  for (int p = 0; p < panels_; ++p) {
    const double mid = a + (p + 0.5) * h;
    double panel = 0.0;
    for (int k = 0; k < order_; ++k) panel += weights_[k] * f(mid + 0.5 * h * nodes_[k]);
    sum += 0.5 * h * panel;
  }
  return sum;
}

double integrate_checked(const QuadratureRule& rule, const std::function<double(double)>& f,
                         double a, double b) {
  const double coarse = rule.integrate(f, a, b);
  const double fine = rule.refined().integrate(f, a, b);
  const double residual = std::abs(fine - coarse);
  if (residual > rule.tolerance())
    throw QuadratureError("quadrature did not converge (residual " + std::to_string(residual) + ")",
                          residual);
  return fine;
}

}  // namespace pilotq
