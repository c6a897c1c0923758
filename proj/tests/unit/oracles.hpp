#pragma once

// Independent reference computations shared by the unit tests. Nothing here
// calls into the library's own algorithms.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
inline constexpr double kPi = 3.14159265358979323846;

/// exp(-i H t) by scaled Taylor series and repeated squaring.
inline M expm_taylor(const M& h, double t) {
  M a = C(0.0, -t) * h;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  a /= std::pow(2.0, squarings);
  M term = M::Identity(h.rows(), h.cols());
  M sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline double max_abs(const M& m) { return m.cwiseAbs().maxCoeff(); }

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
inline M haar_unitary(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  M z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = C(g(gen), g(gen));
  Eigen::HouseholderQR<M> qr(z);
  M q = qr.householderQ();
  M r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
  return q;
}

inline M random_hermitian(int n, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> g;
  M a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = C(g(gen), g(gen));
  return scale * 0.5 * (a + a.adjoint());
}

/// Two-qubit gate acting on basis index 2*d + a, built from its action on
/// basis states rather than by Kronecker products.
template <class F>
M two_qubit_from_action(F&& action) {
  M u = M::Zero(4, 4);
  for (int col = 0; col < 4; ++col) {
    Eigen::Vector4cd in = Eigen::Vector4cd::Zero();
    in(col) = 1.0;
    u.col(col) = action(in);
  }
  return u;
}

/// 1-qubit gate g applied to qubit q (0 = data, 1 = aux) of a 4-vector.
inline Eigen::Vector4cd apply_single(const Eigen::Matrix2cd& g, int q, const Eigen::Vector4cd& v) {
  Eigen::Vector4cd out = Eigen::Vector4cd::Zero();
  for (int i = 0; i < 4; ++i) {
    const int bit = q == 0 ? (i >> 1) & 1 : i & 1;
    for (int b = 0; b < 2; ++b) {
      const int j = q == 0 ? (b << 1) | (i & 1) : (i & 2) | b;
      out(i) += g(bit, b) * v(j);
    }
  }
  return out;
}

inline Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

/// Truth tables f0..f3: f0 = 0, f1 = identity, f2 = NOT, f3 = 1.
inline int truth(int f, int p) {
  switch (f) {
    case 0: return 0;
    case 1: return p;
    case 2: return 1 - p;
    default: return 1;
  }
}

/// |p>|q> -> |p>|q xor f(p)> as a permutation matrix.
inline M oracle_permutation(int f) {
  M u = M::Zero(4, 4);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) u(2 * p + (q ^ truth(f, p)), 2 * p + q) = 1.0;
  return u;
}

/// Analytic integral of 2 sin^2(n pi s) from 0 to x.
inline double mode_cdf(int n, double x) {
  return x - std::sin(2.0 * n * kPi * x) / (2.0 * n * kPi);
}

/// Composite Simpson on [a, b] with an even number of intervals.
template <class F>
double simpson(F&& f, double a, double b, int intervals = 20000) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
