#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "subavg/grassmann.hpp"
#include "subavg/karcher.hpp"

// Blind identification of a complex mixing matrix from repeated noisy
// experiments, and column-wise subspace averaging of the estimates.
namespace subavg::blindid {

using Rng = std::mt19937_64;

/// Parameters of one noisy mixing experiment series.
struct MixingExperiment {
  Index n = 5;                     ///< sources = sensors
  int n_est = 10;                  ///< noisy estimations averaged per trial
  double noise_level = 0.5;        ///< epsilon scaling the system noise Z_i
  int trials = 100;
  Index samples_per_trial = 10000;
  std::uint64_t rng_seed = 0;

  /// Throws InvalidInput: n >= 2, n_est >= 1, noise_level >= 0,
  /// trials >= 1, samples_per_trial >= 10 n.
  void validate() const;
};

/// Circularity coefficients cos(2 theta_k), theta_k = k / (n + 1) * pi / 4.
RealVector source_circularity(Index n);

/// n x samples unit-variance, mutually uncorrelated, non-circular sources.
/// Row k is cos(theta_k) x + i sin(theta_k) y for independent standard
/// normal streams x, y.
ComplexMatrix generate_sources(Index n, Index samples, Rng& rng);

/// w = (A + eps Z) s.
ComplexMatrix mix(const ComplexMatrix& a, const ComplexMatrix& z, double eps,
                  const ComplexMatrix& sources);

struct SutResult {
  ComplexMatrix mixing;     ///< estimated mixing matrix, unit-norm columns
  RealVector circularity;   ///< estimated circularity coefficients, descending
  bool ambiguous = false;   ///< two coefficients closer than 1e-3
};

/// Strong uncorrelating transform from sample statistics of `observations`
/// (n x T). Throws IllConditioned when the sample covariance has condition
/// number >= 1e10.
SutResult sut_estimate(const ComplexMatrix& observations);

/// SUT from a covariance C = E[w w^H] and pseudo-covariance R = E[w w^T]:
/// whitening W = C^{-1/2}, Takagi factorization W R W^T = Q diag(k) Q^T,
/// estimate C^{1/2} Q.
SutResult sut_from_statistics(const ComplexMatrix& covariance,
                              const ComplexMatrix& pseudo_covariance);

/// One estimate of the mixing matrix viewed as n points of CP^{n-1}; each
/// column is stored as a unit-norm representative.
class ColumnEstimate {
 public:
  /// Normalizes the columns. Throws InvalidInput on a zero column.
  explicit ColumnEstimate(const ComplexMatrix& columns);

  Index dim() const noexcept { return columns_.rows(); }
  Index count() const noexcept { return columns_.cols(); }
  const ComplexMatrix& columns() const noexcept { return columns_; }
  GrassmannPoint projector(Index j) const;

 private:
  ComplexMatrix columns_;
};

using EstimateSet = std::vector<ColumnEstimate>;

/// Permutes the columns of every estimate to match `reference`: greedy
/// assignment on |<col_j, ref_k>|^2, largest overlap first, ties to the
/// lowest index.
EstimateSet align_columns(const EstimateSet& estimates, const ColumnEstimate& reference);

/// Column-wise Karcher mean. The returned vector holds the solver result of
/// every column. Throws CutLocus (index = column) if a column's data cannot
/// be averaged.
std::vector<KarcherResult> average_karcher_detailed(const EstimateSet& aligned,
                                                    const CGConfig& config);

/// Column-wise Karcher means as points of CP^{n-1}.
std::vector<GrassmannPoint> average_karcher(const EstimateSet& aligned, const CGConfig& config);

/// Unit-norm representatives of rank-1 projectors, one column each.
ComplexMatrix representatives(const std::vector<GrassmannPoint>& points);

/// Euclidean baseline: per column, phase-align every estimate to the first
/// estimate's column, sum, and normalize. Throws DegenerateAverage when a
/// sum vanishes.
ComplexMatrix average_euclid(const EstimateSet& aligned);

struct AmariScore {
  double value = 0;
};

/// Normalized Amari error of B = A_hat^{-1} A. Zero iff B is a scaled
/// permutation. Throws IllConditioned when cond(A_hat) >= 1e12.
AmariScore amari_error(const ComplexMatrix& a_hat, const ComplexMatrix& a);

enum class SweepParameter { NoiseLevel, Estimations };

std::string_view to_string(SweepParameter p);

struct Sweep {
  SweepParameter parameter = SweepParameter::Estimations;
  std::vector<double> values;
};

struct TrialRow {
  int trial = 0;
  SweepParameter parameter = SweepParameter::Estimations;
  double sweep_value = 0;
  double amari_karcher = 0;
  double amari_euclid = 0;
  std::string status;  ///< "ok" or "skipped_<reason>"

  bool ok() const { return status == "ok"; }
};

/// Runs base.trials trials per sweep value. A trial draws A (standard normal
/// real and imaginary parts), then N_est systems A + eps Z_i with Z_i uniform
/// on [-0.5, 0.5] + i[-0.5, 0.5], estimates each with the SUT, aligns the
/// columns to the first estimate and scores both averages against A.
/// A depends only on (seed, trial), so sweep values are paired. Rows come
/// out ordered by sweep value then trial; failed trials are kept as skipped
/// rows. `threads` > 1 runs trials concurrently with identical output.
std::vector<TrialRow> run_experiment(const MixingExperiment& base, const Sweep& sweep,
                                     const CGConfig& config, unsigned threads = 1);

}  // namespace subavg::blindid
