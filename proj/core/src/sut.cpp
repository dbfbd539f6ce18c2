#include <algorithm>
#include <cmath>
#include <string>

#include "subavg/blindid.hpp"
#include "subavg/errors.hpp"

namespace subavg::blindid {

namespace {

constexpr double kMaxCovarianceCondition = 1e10;
constexpr double kAmbiguityGap = 1e-3;

}  // namespace

SutResult sut_from_statistics(const ComplexMatrix& covariance,
                              const ComplexMatrix& pseudo_covariance) {
  const Index n = covariance.rows();
  if (covariance.cols() != n || pseudo_covariance.rows() != n || pseudo_covariance.cols() != n) {
    throw InvalidInput("sut: covariance and pseudo-covariance must be n x n");
  }
  linalg::require_finite(pseudo_covariance, "sut");
  const HermitianMatrix c(covariance);
  const EigenDecomposition eig = linalg::hermitian_eig(c);
  const double lmax = eig.values(0);
  const double lmin = eig.values(n - 1);
  if (!(lmin > 0) || lmax / lmin >= kMaxCovarianceCondition) {
    throw IllConditioned("sut: sample covariance is singular or ill-conditioned");
  }

  const RealVector inv_sqrt = eig.values.cwiseSqrt().cwiseInverse();
  const RealVector sqrt = eig.values.cwiseSqrt();
  const ComplexMatrix whiten =
      eig.vectors * inv_sqrt.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  const ComplexMatrix unwhiten =
      eig.vectors * sqrt.cast<Complex>().asDiagonal() * eig.vectors.adjoint();

  // W R W^T is complex symmetric; W^T = conj(W) for Hermitian W.
  ComplexMatrix sym = whiten * pseudo_covariance * whiten.transpose();
  sym = 0.5 * (sym + sym.transpose()).eval();

  // Takagi factorization from the SVD sym = U S V^H: for distinct singular
  // values U = conj(V) D with a unit diagonal D, hence sym = Q S Q^T with
  // Q = U D^{-1/2}.
  const SVDFactors f = linalg::svd(sym);
  const ComplexMatrix d = f.V.transpose() * f.U;
  ComplexMatrix takagi = f.U;
  for (Index k = 0; k < n; ++k) {
    takagi.col(k) *= std::polar(1.0, -0.5 * std::arg(d(k, k)));
  }

  SutResult out;
  out.circularity = f.S;
  out.mixing = unwhiten * takagi;
  for (Index k = 0; k < n; ++k) out.mixing.col(k).normalize();
  for (Index k = 0; k + 1 < n; ++k) {
    if (f.S(k) - f.S(k + 1) < kAmbiguityGap) out.ambiguous = true;
  }
  return out;
}

SutResult sut_estimate(const ComplexMatrix& observations) {
  linalg::require_finite(observations, "sut_estimate");
  const auto samples = static_cast<double>(observations.cols());
  if (observations.cols() < 1) throw InvalidInput("sut_estimate: no samples");
  const ComplexMatrix c = observations * observations.adjoint() / samples;
  const ComplexMatrix r = observations * observations.transpose() / samples;
  return sut_from_statistics(0.5 * (c + c.adjoint()), r);
}

}  // namespace subavg::blindid
