#pragma once

#include <complex>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace subavg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Square complex matrix with exact Hermitian symmetry.
///
/// The stored matrix always equals its conjugate transpose bit for bit:
/// the checked constructor accepts inputs whose anti-Hermitian part is
/// below `tol * max(1, ||M||_F)` and then stores (M + M^H) / 2.
class HermitianMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& m, double tol = kDefaultTolerance);

  /// Stores the Hermitian part of `m` without a symmetry check. Use when `m`
  /// is Hermitian by construction and only rounding separates it from M^H.
  static HermitianMatrix hermitian_part(const ComplexMatrix& m);

  static HermitianMatrix zero(Index n);
  static HermitianMatrix identity(Index n);
  static HermitianMatrix diagonal(const RealVector& d);

  Index dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Complex operator()(Index r, Index c) const { return m_(r, c); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b);
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a);
  HermitianMatrix operator-() const;

 private:
  ComplexMatrix m_;
};

/// Real eigenvalues in descending order and a unitary matrix whose columns
/// are the matching eigenvectors.
struct EigenDecomposition {
  RealVector values;
  ComplexMatrix vectors;
};

/// Full SVD, M = U diag(S) V^H with U, V square unitary and S descending.
struct SVDFactors {
  ComplexMatrix U;
  RealVector S;
  ComplexMatrix V;
};

/// Closed interval a scalar function accepts. Eigenvalues that overshoot a
/// finite bound by at most `clamp_window` are clamped onto it.
struct Domain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double clamp_window = 1e-10;

  static Domain real_line() { return {}; }
  static Domain nonnegative() { return {0.0, std::numeric_limits<double>::infinity()}; }
  static Domain unit_interval() { return {0.0, 1.0}; }
};

namespace linalg {

bool all_finite(const ComplexMatrix& m);

/// Throws InvalidInput when `m` contains NaN or Inf.
void require_finite(const ComplexMatrix& m, const char* what);

EigenDecomposition hermitian_eig(const HermitianMatrix& m);

SVDFactors svd(const ComplexMatrix& m);

/// e^{Omega} for skew-Hermitian Omega, computed through the spectrum of the
/// Hermitian matrix -i Omega. The result is unitary by construction.
/// Throws InvalidInput when ||Omega + Omega^H||_F > 1e-12 max(1, ||Omega||_F).
ComplexMatrix expm_skew(const ComplexMatrix& omega);

/// e^{iH} for Hermitian H.
ComplexMatrix expm_i_hermitian(const HermitianMatrix& h);

/// W diag(f(lambda)) W^H for the eigendecomposition of `m`.
/// Throws DomainError if an eigenvalue lies outside `domain` by more than
/// its clamp window.
HermitianMatrix spectral_fn(const HermitianMatrix& m,
                            const std::function<double(double)>& f,
                            const Domain& domain = Domain::real_line());

/// [A, B] = AB - BA.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Real part of tr(A B); equals the Frobenius inner product for Hermitian A, B.
double trace_inner(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace linalg
}  // namespace subavg
