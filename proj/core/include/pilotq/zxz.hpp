#pragma once

#include "pilotq/linalg.hpp"

namespace pilotq {

/// U = e^{i alpha} Rz(beta) Rx(gamma) Rz(delta), with R_a(t) = exp(-i t A / 2).
///
/// Canonical form: gamma in [0, pi], alpha in (-pi/2, pi/2]; when gamma is 0
/// or pi the whole z rotation is carried by beta and delta = 0.
struct ZXZDecomposition {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  CMatrix reconstruct() const;
};

/// Throws InvalidArgument for non-2x2 or non-unitary input.
ZXZDecomposition zxz_decompose(const CMatrix& u);

}  // namespace pilotq
