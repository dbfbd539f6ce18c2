#pragma once

#include <optional>

#include "subavg/linalg.hpp"

namespace subavg::detail {

/// Logarithm at the standard projector, expressed in a rotated frame.
///
/// `theta` is a unitary frame [X1 X2] of the base point (base = X1 X1^H) and
/// `y` an orthonormal basis of the target. With Y' = theta^H y split into
/// blocks Y1 (m x m) and Y2 ((n-m) x m), the thin CS decomposition
/// Y1 = U diag(cos) W^H, Y2 W = V diag(sin) gives the principal angles and
/// Z = V diag(angle) U^H, so that the target equals
/// exp([[0, -Z^H], [Z, 0]]) E exp(-[[0, -Z^H], [Z, 0]]) in the frame.
struct FrameLog {
  ComplexMatrix z;        // (n-m) x m
  RealVector angles;      // descending cosines -> ascending angles
  double min_cos_sq = 1;  // cos^2 of the largest principal angle
};

/// Returns nullopt when the largest principal angle is at the cut locus
/// (cos^2 <= cut_tol).
std::optional<FrameLog> frame_log(const ComplexMatrix& theta, const ComplexMatrix& y, Index m,
                                  double cut_tol);

/// theta [[0, Z^H], [Z, 0]] theta^H.
ComplexMatrix embed_tangent(const ComplexMatrix& theta, const ComplexMatrix& z);

/// theta [[0, -Z^H], [Z, 0]] theta^H, the skew-Hermitian geodesic generator.
ComplexMatrix embed_generator(const ComplexMatrix& theta, const ComplexMatrix& z);

}  // namespace subavg::detail
