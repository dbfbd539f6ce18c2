#pragma once

#include <utility>

#include "subavg/linalg.hpp"

namespace subavg {

/// A rank-m Hermitian projector P on C^n, i.e. a point of the complex
/// Grassmannian Gr(m, n). Always satisfies P^H = P, ||P^2 - P||_F < 1e-10
/// and |tr P - m| < 1e-8.
class GrassmannPoint {
 public:
  static constexpr double kIdempotenceTolerance = 1e-10;
  static constexpr double kTraceTolerance = 1e-8;

  /// Validates `p` as a rank-m projector. Throws InvalidInput otherwise.
  GrassmannPoint(const HermitianMatrix& p, Index rank);

  /// The standard projector diag(I_m, 0).
  static GrassmannPoint standard(Index n, Index m);

  const HermitianMatrix& projector() const noexcept { return p_; }
  const ComplexMatrix& matrix() const noexcept { return p_.matrix(); }
  Index dim() const noexcept { return p_.dim(); }
  Index rank() const noexcept { return m_; }

 private:
  HermitianMatrix p_;
  Index m_;
};

/// Hermitian H tangent to the Grassmannian at `base`: [P, [P, H]] = H.
class TangentVector {
 public:
  static constexpr double kTangencyTolerance = 1e-10;

  /// Validates tangency (relative to max(1, ||H||_F)). Throws InvalidInput.
  TangentVector(GrassmannPoint base, HermitianMatrix h);

  static TangentVector zero(const GrassmannPoint& base);

  const GrassmannPoint& base() const noexcept { return base_; }
  const HermitianMatrix& hermitian() const noexcept { return h_; }
  const ComplexMatrix& matrix() const noexcept { return h_.matrix(); }

  /// Frobenius norm, i.e. the norm induced by the Riemannian metric.
  double norm() const { return h_.matrix().norm(); }

  TangentVector scaled(double s) const;

 private:
  TangentVector(GrassmannPoint base, HermitianMatrix h, bool /*trusted*/)
      : base_(std::move(base)), h_(std::move(h)) {}

  friend TangentVector operator+(const TangentVector& a, const TangentVector& b);
  friend TangentVector operator-(const TangentVector& a, const TangentVector& b);

  GrassmannPoint base_;
  HermitianMatrix h_;
};

TangentVector operator+(const TangentVector& a, const TangentVector& b);
TangentVector operator-(const TangentVector& a, const TangentVector& b);

/// n x m matrix with orthonormal columns, ||X^H X - I_m||_F < tol.
class StiefelBasis {
 public:
  static constexpr double kOrthonormalityTolerance = 1e-10;

  explicit StiefelBasis(ComplexMatrix x, double tol = kOrthonormalityTolerance);

  /// Span-preserving orthonormalization (thin Householder QR) of a full
  /// column rank matrix. Throws InvalidInput when `x` is rank deficient.
  static StiefelBasis orthonormalize(const ComplexMatrix& x);

  const ComplexMatrix& matrix() const noexcept { return x_; }
  Index rows() const noexcept { return x_.rows(); }
  Index cols() const noexcept { return x_.cols(); }

 private:
  ComplexMatrix x_;
};

namespace gr {

/// Cut-locus threshold on cos^2 of the largest principal angle.
inline constexpr double kCutLocusTolerance = 1e-8;

GrassmannPoint projector_from_basis(const StiefelBasis& x);

/// Orthonormal basis of the range of P (top-m eigenvectors).
StiefelBasis basis_from_projector(const GrassmannPoint& p);

/// Unitary Theta = [X1 X2] with P = Theta E Theta^H, X1 spanning range(P).
ComplexMatrix unitary_frame(const GrassmannPoint& p);

/// Orthogonal projection [P, [P, X]] of a Hermitian matrix onto T_P.
TangentVector tangent_project(const GrassmannPoint& p, const HermitianMatrix& x);

/// g_P(H1, H2) = tr(H1 H2).
double metric(const TangentVector& a, const TangentVector& b);

/// e^{t[H,P]} P e^{-t[H,P]}.
GrassmannPoint geodesic(const GrassmannPoint& p, const TangentVector& h, double t);

/// geodesic(p, h, 1).
GrassmannPoint exp_map(const GrassmannPoint& p, const TangentVector& h);

/// The tangent vector xi at Q with exp_map(Q, xi) = P. Throws CutLocus
/// when a principal angle is within the cut-locus tolerance of pi/2.
TangentVector log_map(const GrassmannPoint& q, const GrassmannPoint& p);

/// Transport of `g` along the geodesic through `h` (both at the same base)
/// to parameter t: e^{t[H,P]} G e^{-t[H,P]}.
TangentVector parallel_transport(const TangentVector& g, const TangentVector& h, double t);

/// Principal angles between range(P) and range(Q), ascending, in [0, pi/2].
RealVector principal_angles(const GrassmannPoint& p, const GrassmannPoint& q);

/// Riemannian distance sqrt(2 sum theta_i^2).
double distance(const GrassmannPoint& p, const GrassmannPoint& q);

/// Throws InvalidInput unless both points live in the same Gr(m, n).
void require_same_space(const GrassmannPoint& p, const GrassmannPoint& q, const char* what);

}  // namespace gr
}  // namespace subavg
