#include "pilotq/zxz.hpp"

#include <cmath>

#include "pilotq/errors.hpp"
#include "pilotq/gates.hpp"

namespace pilotq {

namespace {
constexpr double kUnitaryTolerance = 1e-9;
constexpr double kGimbalTolerance = 1e-12;
}  // namespace

CMatrix ZXZDecomposition::reconstruct() const {
  return std::exp(Complex{0.0, alpha}) * gates::rz(beta) * gates::rx(gamma) * gates::rz(delta);
}

ZXZDecomposition zxz_decompose(const CMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) throw InvalidArgument("ZXZ decomposition needs a 2x2 matrix");
  if (unitarity_error(u) > kUnitaryTolerance) throw InvalidArgument("matrix is not unitary");

  ZXZDecomposition out;
  out.alpha = std::arg(u.determinant()) / 2.0;
  if (out.alpha <= -kPi / 2.0 + kGimbalTolerance) out.alpha += kPi;

  // V = e^{-i alpha} U lies in SU(2):
  //   V00 = cos(g/2) e^{-i(b+d)/2},  V10 = -i sin(g/2) e^{i(b-d)/2}
  const CMatrix v = std::exp(Complex{0.0, -out.alpha}) * u;
  const double c = std::abs(v(0, 0));
  const double s = std::abs(v(1, 0));
  out.gamma = 2.0 * std::atan2(s, c);

  if (s < kGimbalTolerance) {
    out.gamma = 0.0;
    out.beta = -2.0 * std::arg(v(0, 0));
    out.delta = 0.0;
  } else if (c < kGimbalTolerance) {
    out.gamma = kPi;
    out.beta = 2.0 * std::arg(kI * v(1, 0));
    out.delta = 0.0;
  } else {
    const double sum = -2.0 * std::arg(v(0, 0));
    const double diff = 2.0 * std::arg(kI * v(1, 0));
    out.beta = 0.5 * (sum + diff);
    out.delta = 0.5 * (sum - diff);
  }
  return out;
}

}  // namespace pilotq
