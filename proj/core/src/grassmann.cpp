#include "subavg/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "detail/frame_log.hpp"
#include "subavg/errors.hpp"

namespace subavg {

using linalg::commutator;

GrassmannPoint::GrassmannPoint(const HermitianMatrix& p, Index rank) : p_(p), m_(rank) {
  const Index n = p.dim();
  if (rank < 0 || rank > n) {
    throw InvalidInput("GrassmannPoint: rank " + std::to_string(rank) + " out of range for n = " +
                       std::to_string(n));
  }
  const ComplexMatrix& m = p.matrix();
  const double idem = (m * m - m).norm();
  if (idem >= kIdempotenceTolerance) {
    throw InvalidInput("GrassmannPoint: not idempotent (||P^2 - P||_F = " + std::to_string(idem) +
                       ")");
  }
  const double tr = m.trace().real();
  if (std::abs(tr - static_cast<double>(rank)) >= kTraceTolerance) {
    throw InvalidInput("GrassmannPoint: trace " + std::to_string(tr) + " does not match rank " +
                       std::to_string(rank));
  }
}

GrassmannPoint GrassmannPoint::standard(Index n, Index m) {
  RealVector d = RealVector::Zero(n);
  d.head(m).setOnes();
  return GrassmannPoint(HermitianMatrix::diagonal(d), m);
}

TangentVector::TangentVector(GrassmannPoint base, HermitianMatrix h)
    : base_(std::move(base)), h_(std::move(h)) {
  if (h_.dim() != base_.dim()) {
    throw InvalidInput("TangentVector: dimension mismatch with base point");
  }
  const ComplexMatrix& p = base_.matrix();
  const ComplexMatrix& x = h_.matrix();
  const double err = (commutator(p, commutator(p, x)) - x).norm();
  if (err >= kTangencyTolerance * std::max(1.0, x.norm())) {
    throw InvalidInput("TangentVector: not tangent (||[P,[P,H]] - H||_F = " +
                       std::to_string(err) + ")");
  }
}

TangentVector TangentVector::zero(const GrassmannPoint& base) {
  return TangentVector(base, HermitianMatrix::zero(base.dim()), true);
}

TangentVector TangentVector::scaled(double s) const {
  return TangentVector(base_, s * h_, true);
}

namespace {

void require_same_base(const TangentVector& a, const TangentVector& b, const char* what) {
  const ComplexMatrix& pa = a.base().matrix();
  const ComplexMatrix& pb = b.base().matrix();
  if (pa.rows() != pb.rows() || a.base().rank() != b.base().rank() ||
      (pa - pb).norm() > 1e-10) {
    throw InvalidInput(std::string(what) + ": tangent vectors have different base points");
  }
}

}  // namespace

TangentVector operator+(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b, "TangentVector::operator+");
  return TangentVector(a.base_, a.h_ + b.h_, true);
}

TangentVector operator-(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b, "TangentVector::operator-");
  return TangentVector(a.base_, a.h_ - b.h_, true);
}

StiefelBasis::StiefelBasis(ComplexMatrix x, double tol) : x_(std::move(x)) {
  linalg::require_finite(x_, "StiefelBasis");
  if (x_.cols() > x_.rows()) {
    throw InvalidInput("StiefelBasis: more columns than rows");
  }
  const Index m = x_.cols();
  const double err = (x_.adjoint() * x_ - ComplexMatrix::Identity(m, m)).norm();
  if (err >= tol) {
    throw InvalidInput("StiefelBasis: columns are not orthonormal (||X^H X - I||_F = " +
                       std::to_string(err) + ")");
  }
}

StiefelBasis StiefelBasis::orthonormalize(const ComplexMatrix& x) {
  linalg::require_finite(x, "StiefelBasis::orthonormalize");
  const Index n = x.rows();
  const Index m = x.cols();
  if (m > n) throw InvalidInput("StiefelBasis::orthonormalize: more columns than rows");
  Eigen::ColPivHouseholderQR<ComplexMatrix> rank_check(x);
  if (rank_check.rank() < m) {
    throw InvalidInput("StiefelBasis::orthonormalize: matrix is rank deficient");
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(x);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, m);
  return StiefelBasis(std::move(q));
}

namespace gr {

void require_same_space(const GrassmannPoint& p, const GrassmannPoint& q, const char* what) {
  if (p.dim() != q.dim() || p.rank() != q.rank()) {
    throw InvalidInput(std::string(what) + ": points live in different Grassmannians (Gr(" +
                       std::to_string(p.rank()) + "," + std::to_string(p.dim()) + ") vs Gr(" +
                       std::to_string(q.rank()) + "," + std::to_string(q.dim()) + "))");
  }
}

GrassmannPoint projector_from_basis(const StiefelBasis& x) {
  const ComplexMatrix& m = x.matrix();
  return GrassmannPoint(HermitianMatrix::hermitian_part(m * m.adjoint()), m.cols());
}

ComplexMatrix unitary_frame(const GrassmannPoint& p) {
  return linalg::hermitian_eig(p.projector()).vectors;
}

StiefelBasis basis_from_projector(const GrassmannPoint& p) {
  const EigenDecomposition eig = linalg::hermitian_eig(p.projector());
  const Index m = p.rank();
  if (m > 0 && eig.values(m - 1) < 0.5) {
    throw InvalidInput("basis_from_projector: projector is rank deficient");
  }
  return StiefelBasis(eig.vectors.leftCols(m));
}

TangentVector tangent_project(const GrassmannPoint& p, const HermitianMatrix& x) {
  if (x.dim() != p.dim()) {
    throw InvalidInput("tangent_project: dimension mismatch");
  }
  const ComplexMatrix& pm = p.matrix();
  return TangentVector(p, HermitianMatrix::hermitian_part(commutator(pm, commutator(pm, x.matrix()))));
}

double metric(const TangentVector& a, const TangentVector& b) {
  require_same_base(a, b, "metric");
  return linalg::trace_inner(a.matrix(), b.matrix());
}

namespace {

void require_based_at(const GrassmannPoint& p, const TangentVector& h, const char* what) {
  if (h.base().dim() != p.dim() || h.base().rank() != p.rank() ||
      (h.base().matrix() - p.matrix()).norm() > 1e-10) {
    throw InvalidInput(std::string(what) + ": tangent vector is not based at the given point");
  }
}

ComplexMatrix geodesic_rotation(const GrassmannPoint& p, const TangentVector& h, double t) {
  const ComplexMatrix gen = t * commutator(h.matrix(), p.matrix());
  // [H, P] of two Hermitian matrices is skew-Hermitian up to rounding.
  return linalg::expm_skew(0.5 * (gen - gen.adjoint()));
}

}  // namespace

GrassmannPoint geodesic(const GrassmannPoint& p, const TangentVector& h, double t) {
  require_based_at(p, h, "geodesic");
  if (t == 0.0) return p;
  const ComplexMatrix u = geodesic_rotation(p, h, t);
  return GrassmannPoint(HermitianMatrix::hermitian_part(u * p.matrix() * u.adjoint()), p.rank());
}

GrassmannPoint exp_map(const GrassmannPoint& p, const TangentVector& h) {
  return geodesic(p, h, 1.0);
}

TangentVector log_map(const GrassmannPoint& q, const GrassmannPoint& p) {
  require_same_space(q, p, "log_map");
  const Index m = q.rank();
  const ComplexMatrix theta = unitary_frame(q);
  const ComplexMatrix y = basis_from_projector(p).matrix();
  const auto fl = detail::frame_log(theta, y, m, kCutLocusTolerance);
  if (!fl) {
    throw CutLocus("log_map: points are at the cut locus (principal angle ~ pi/2)");
  }
  return TangentVector(q, HermitianMatrix::hermitian_part(detail::embed_tangent(theta, fl->z)));
}

TangentVector parallel_transport(const TangentVector& g, const TangentVector& h, double t) {
  require_same_base(g, h, "parallel_transport");
  const GrassmannPoint& p = h.base();
  if (t == 0.0) return g;
  const ComplexMatrix u = geodesic_rotation(p, h, t);
  GrassmannPoint moved(HermitianMatrix::hermitian_part(u * p.matrix() * u.adjoint()), p.rank());
  return TangentVector(std::move(moved),
                       HermitianMatrix::hermitian_part(u * g.matrix() * u.adjoint()));
}

RealVector principal_angles(const GrassmannPoint& p, const GrassmannPoint& q) {
  require_same_space(p, q, "principal_angles");
  const Index n = p.dim();
  const ComplexMatrix y = basis_from_projector(q).matrix();
  // Cosines from the m x m block Y^H P Y; sines from the residual (I - P) Y w
  // so that small angles keep full relative accuracy.
  const HermitianMatrix block = HermitianMatrix::hermitian_part(y.adjoint() * p.matrix() * y);
  const EigenDecomposition eig = linalg::hermitian_eig(block);
  const ComplexMatrix rotated = y * eig.vectors;
  const ComplexMatrix residual = (ComplexMatrix::Identity(n, n) - p.matrix()) * rotated;
  RealVector angles(eig.values.size());
  for (Index k = 0; k < angles.size(); ++k) {
    const double c = std::sqrt(std::clamp(eig.values(k), 0.0, 1.0));
    const double s = residual.col(k).norm();
    angles(k) = std::atan2(s, c);
  }
  return angles;
}

double distance(const GrassmannPoint& p, const GrassmannPoint& q) {
  return std::sqrt(2.0) * principal_angles(p, q).norm();
}

}  // namespace gr

namespace detail {

std::optional<FrameLog> frame_log(const ComplexMatrix& theta, const ComplexMatrix& y, Index m,
                                  double cut_tol) {
  const Index n = theta.rows();
  const ComplexMatrix rotated = theta.adjoint() * y;
  const ComplexMatrix y1 = rotated.topRows(m);
  const ComplexMatrix y2 = rotated.bottomRows(n - m);

  Eigen::JacobiSVD<ComplexMatrix> cs(y1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& cosines = cs.singularValues();

  FrameLog out;
  out.min_cos_sq = m > 0 ? cosines(m - 1) * cosines(m - 1) : 1.0;
  if (out.min_cos_sq <= cut_tol) return std::nullopt;

  ComplexMatrix sin_part = y2 * cs.matrixV();  // columns V_k sin(theta_k), mutually orthogonal
  out.angles.resize(m);
  for (Index k = 0; k < m; ++k) {
    const double s = sin_part.col(k).norm();
    const double angle = std::atan2(s, cosines(k));
    out.angles(k) = angle;
    // angle / sin(angle) -> 1 as the angle vanishes; when s == 0 the column is
    // zero anyway.
    const double ratio = s > 0.0 ? angle / s : 1.0;
    sin_part.col(k) *= ratio;
  }
  out.z = sin_part * cs.matrixU().adjoint();
  return out;
}

ComplexMatrix embed_tangent(const ComplexMatrix& theta, const ComplexMatrix& z) {
  const Index n = theta.rows();
  const Index m = z.cols();
  ComplexMatrix block = ComplexMatrix::Zero(n, n);
  block.bottomLeftCorner(n - m, m) = z;
  block.topRightCorner(m, n - m) = z.adjoint();
  return theta * block * theta.adjoint();
}

ComplexMatrix embed_generator(const ComplexMatrix& theta, const ComplexMatrix& z) {
  const Index n = theta.rows();
  const Index m = z.cols();
  ComplexMatrix block = ComplexMatrix::Zero(n, n);
  block.bottomLeftCorner(n - m, m) = z;
  block.topRightCorner(m, n - m) = -z.adjoint();
  return theta * block * theta.adjoint();
}

}  // namespace detail
}  // namespace subavg
