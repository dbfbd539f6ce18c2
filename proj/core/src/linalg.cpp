#include "subavg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subavg/errors.hpp"

namespace subavg {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidInput(std::string(what) + ": expected a square matrix, got " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m, double tol) {
  require_square(m, "HermitianMatrix");
  linalg::require_finite(m, "HermitianMatrix");
  const double asym = (m - m.adjoint()).norm();
  if (asym > tol * std::max(1.0, m.norm())) {
    throw InvalidInput("HermitianMatrix: input is not Hermitian (||M - M^H||_F = " +
                       std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::hermitian_part(const ComplexMatrix& m) {
  require_square(m, "HermitianMatrix::hermitian_part");
  HermitianMatrix h;
  h.m_ = 0.5 * (m + m.adjoint());
  return h;
}

HermitianMatrix HermitianMatrix::zero(Index n) {
  HermitianMatrix h;
  h.m_ = ComplexMatrix::Zero(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::identity(Index n) {
  HermitianMatrix h;
  h.m_ = ComplexMatrix::Identity(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  HermitianMatrix h;
  h.m_ = d.cast<Complex>().asDiagonal();
  return h;
}

HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
  HermitianMatrix h;
  h.m_ = a.m_ + b.m_;
  return h;
}

HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
  HermitianMatrix h;
  h.m_ = a.m_ - b.m_;
  return h;
}

HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  HermitianMatrix h;
  h.m_ = s * a.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-() const {
  HermitianMatrix h;
  h.m_ = -m_;
  return h;
}

namespace linalg {

bool all_finite(const ComplexMatrix& m) {
  return m.real().allFinite() && m.imag().allFinite();
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!all_finite(m)) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

EigenDecomposition hermitian_eig(const HermitianMatrix& m) {
  require_finite(m.matrix(), "hermitian_eig");
  const Index n = m.dim();
  if (n == 0) return {RealVector(0), ComplexMatrix(0, 0)};

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw InvalidInput("hermitian_eig: eigensolver did not converge");
  }
  // Eigen sorts ascending.
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SVDFactors svd(const ComplexMatrix& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

ComplexMatrix expm_i_hermitian(const HermitianMatrix& h) {
  const EigenDecomposition eig = hermitian_eig(h);
  ComplexVector phases(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    phases(k) = std::polar(1.0, eig.values(k));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix expm_skew(const ComplexMatrix& omega) {
  require_square(omega, "expm_skew");
  require_finite(omega, "expm_skew");
  const double sym = (omega + omega.adjoint()).norm();
  if (sym > 1e-12 * std::max(1.0, omega.norm())) {
    throw InvalidInput("expm_skew: input is not skew-Hermitian (||W + W^H||_F = " +
                       std::to_string(sym) + ")");
  }
  // Omega = iH  <=>  H = -i Omega.
  const Complex minus_i(0.0, -1.0);
  return expm_i_hermitian(HermitianMatrix::hermitian_part(minus_i * omega));
}

HermitianMatrix spectral_fn(const HermitianMatrix& m, const std::function<double(double)>& f,
                            const Domain& domain) {
  EigenDecomposition eig = hermitian_eig(m);
  RealVector mapped(eig.values.size());
  for (Index k = 0; k < eig.values.size(); ++k) {
    double x = eig.values(k);
    if (x < domain.lo) {
      if (x < domain.lo - domain.clamp_window) {
        throw DomainError("spectral_fn: eigenvalue " + std::to_string(x) +
                          " below domain bound " + std::to_string(domain.lo));
      }
      x = domain.lo;
    } else if (x > domain.hi) {
      if (x > domain.hi + domain.clamp_window) {
        throw DomainError("spectral_fn: eigenvalue " + std::to_string(x) +
                          " above domain bound " + std::to_string(domain.hi));
      }
      x = domain.hi;
    }
    mapped(k) = f(x);
    if (!std::isfinite(mapped(k))) {
      throw DomainError("spectral_fn: function value is not finite at " + std::to_string(x));
    }
  }
  return HermitianMatrix::hermitian_part(eig.vectors * mapped.cast<Complex>().asDiagonal() *
                                         eig.vectors.adjoint());
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

double trace_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.transpose().cwiseProduct(b).sum().real();
}

}  // namespace linalg
}  // namespace subavg
