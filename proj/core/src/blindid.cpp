#include "subavg/blindid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "subavg/errors.hpp"

namespace subavg::blindid {

void MixingExperiment::validate() const {
  if (n < 2) throw InvalidInput("MixingExperiment: n must be >= 2");
  if (n_est < 1) throw InvalidInput("MixingExperiment: N_est must be >= 1");
  if (!(noise_level >= 0) || !std::isfinite(noise_level)) {
    throw InvalidInput("MixingExperiment: noise level must be finite and >= 0");
  }
  if (trials < 1) throw InvalidInput("MixingExperiment: trials must be >= 1");
  if (samples_per_trial < 10 * n) {
    throw InvalidInput("MixingExperiment: samples_per_trial must be >= 10 n");
  }
}

RealVector source_circularity(Index n) {
  RealVector k(n);
  for (Index i = 0; i < n; ++i) {
    const double theta = static_cast<double>(i + 1) / static_cast<double>(n + 1) *
                         (std::numbers::pi / 4.0);
    k(i) = std::cos(2.0 * theta);
  }
  return k;
}

ComplexMatrix generate_sources(Index n, Index samples, Rng& rng) {
  if (n < 1) throw InvalidInput("generate_sources: n must be >= 1");
  if (samples < 10 * n) {
    throw InvalidInput("generate_sources: need at least 10 n samples, got " +
                       std::to_string(samples));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix s(n, samples);
  for (Index k = 0; k < n; ++k) {
    const double theta = static_cast<double>(k + 1) / static_cast<double>(n + 1) *
                         (std::numbers::pi / 4.0);
    const double c = std::cos(theta);
    const double sn = std::sin(theta);
    for (Index t = 0; t < samples; ++t) {
      const double x = normal(rng);
      const double y = normal(rng);
      s(k, t) = Complex(c * x, sn * y);
    }
  }
  return s;
}

ComplexMatrix mix(const ComplexMatrix& a, const ComplexMatrix& z, double eps,
                  const ComplexMatrix& sources) {
  if (a.rows() != z.rows() || a.cols() != z.cols() || a.cols() != sources.rows()) {
    throw InvalidInput("mix: shape mismatch between A, Z and the sources");
  }
  return (a + eps * z) * sources;
}

ColumnEstimate::ColumnEstimate(const ComplexMatrix& columns) : columns_(columns) {
  linalg::require_finite(columns_, "ColumnEstimate");
  for (Index j = 0; j < columns_.cols(); ++j) {
    const double norm = columns_.col(j).norm();
    if (norm == 0.0) {
      throw InvalidInput("ColumnEstimate: column " + std::to_string(j) + " is zero");
    }
    columns_.col(j) /= norm;
  }
}

GrassmannPoint ColumnEstimate::projector(Index j) const {
  return gr::projector_from_basis(StiefelBasis(columns_.col(j)));
}

EstimateSet align_columns(const EstimateSet& estimates, const ColumnEstimate& reference) {
  const Index n = reference.count();
  EstimateSet out;
  out.reserve(estimates.size());
  for (const auto& est : estimates) {
    if (est.dim() != reference.dim() || est.count() != n) {
      throw InvalidInput("align_columns: estimate shape differs from the reference");
    }
    // overlap(j, k) = |<est_j, ref_k>|^2
    const Eigen::MatrixXd overlap =
        (est.columns().adjoint() * reference.columns()).cwiseAbs2();
    std::vector<bool> used_est(n, false);
    std::vector<bool> used_ref(n, false);
    ComplexMatrix aligned(est.dim(), n);
    for (Index step = 0; step < n; ++step) {
      Index best_j = -1;
      Index best_k = -1;
      double best = -1;
      for (Index j = 0; j < n; ++j) {
        if (used_est[j]) continue;
        for (Index k = 0; k < n; ++k) {
          if (used_ref[k]) continue;
          if (overlap(j, k) > best) {
            best = overlap(j, k);
            best_j = j;
            best_k = k;
          }
        }
      }
      used_est[best_j] = true;
      used_ref[best_k] = true;
      aligned.col(best_k) = est.columns().col(best_j);
    }
    out.emplace_back(aligned);
  }
  return out;
}

namespace {

void require_nonempty(const EstimateSet& aligned, const char* what) {
  if (aligned.empty()) throw InvalidInput(std::string(what) + ": no estimates");
  for (const auto& e : aligned) {
    if (e.dim() != aligned.front().dim() || e.count() != aligned.front().count()) {
      throw InvalidInput(std::string(what) + ": estimates have different shapes");
    }
  }
}

}  // namespace

std::vector<KarcherResult> average_karcher_detailed(const EstimateSet& aligned,
                                                    const CGConfig& config) {
  require_nonempty(aligned, "average_karcher");
  const Index cols = aligned.front().count();
  std::vector<KarcherResult> out;
  out.reserve(static_cast<std::size_t>(cols));
  for (Index j = 0; j < cols; ++j) {
    std::vector<StiefelBasis> bases;
    bases.reserve(aligned.size());
    for (const auto& e : aligned) bases.emplace_back(e.columns().col(j));
    const KarcherProblem problem(bases);
    KarcherResult r = karcher_mean(problem, std::nullopt, config);
    if (r.status == SolverStatus::CutLocus) {
      throw CutLocus("average_karcher: column " + std::to_string(j) + ": " + r.message,
                     static_cast<std::size_t>(j));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<GrassmannPoint> average_karcher(const EstimateSet& aligned, const CGConfig& config) {
  std::vector<GrassmannPoint> means;
  for (auto& r : average_karcher_detailed(aligned, config)) means.push_back(std::move(r.mean));
  return means;
}

ComplexMatrix representatives(const std::vector<GrassmannPoint>& points) {
  if (points.empty()) return {};
  ComplexMatrix out(points.front().dim(), static_cast<Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].rank() != 1) throw InvalidInput("representatives: rank-1 points expected");
    out.col(static_cast<Index>(j)) = gr::basis_from_projector(points[j]).matrix().col(0);
  }
  return out;
}

ComplexMatrix average_euclid(const EstimateSet& aligned) {
  require_nonempty(aligned, "average_euclid");
  const ColumnEstimate& reference = aligned.front();
  ComplexMatrix out = ComplexMatrix::Zero(reference.dim(), reference.count());
  for (Index j = 0; j < reference.count(); ++j) {
    const ComplexVector ref = reference.columns().col(j);
    for (const auto& e : aligned) {
      const ComplexVector v = e.columns().col(j);
      const Complex ip = ref.dot(v);
      const double mag = std::abs(ip);
      // Rotating by conj(ip)/|ip| makes <ref, v> real and nonnegative.
      out.col(j) += mag > 0 ? (std::conj(ip) / mag * v).eval() : v;
    }
    const double norm = out.col(j).norm();
    if (!(norm > 1e-12 * static_cast<double>(aligned.size()))) {
      throw DegenerateAverage("average_euclid: column " + std::to_string(j) + " sums to zero");
    }
    out.col(j) /= norm;
  }
  return out;
}

AmariScore amari_error(const ComplexMatrix& a_hat, const ComplexMatrix& a) {
  const Index n = a.rows();
  if (a.cols() != n || a_hat.rows() != n || a_hat.cols() != n) {
    throw InvalidInput("amari_error: both matrices must be n x n");
  }
  linalg::require_finite(a_hat, "amari_error");
  linalg::require_finite(a, "amari_error");
  const RealVector sv = Eigen::JacobiSVD<ComplexMatrix>(a_hat).singularValues();
  if (!(sv(n - 1) > 0) || sv(0) / sv(n - 1) >= 1e12) {
    throw IllConditioned("amari_error: estimate is singular or ill-conditioned");
  }
  const Eigen::MatrixXd b = a_hat.fullPivLu().solve(a).cwiseAbs();
  double rows = 0;
  double cols = 0;
  for (Index i = 0; i < n; ++i) {
    rows += b.row(i).sum() / b.row(i).maxCoeff();
    cols += b.col(i).sum() / b.col(i).maxCoeff();
  }
  return {(rows + cols) / static_cast<double>(n) - 2.0};
}

std::string_view to_string(SweepParameter p) {
  return p == SweepParameter::NoiseLevel ? "eps" : "n_est";
}

namespace {

constexpr std::uint64_t kMixingStream = 0x5eed'a11cULL;

ComplexMatrix draw_mixing(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = Complex(re, im);
    }
  }
  return a;
}

ComplexMatrix draw_system_noise(Index n, Rng& rng) {
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  ComplexMatrix z(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = uniform(rng);
      const double im = uniform(rng);
      z(i, j) = Complex(re, im);
    }
  }
  return z;
}

Rng stream(std::uint64_t seed, std::uint64_t kind, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(kind >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

TrialRow run_trial(const MixingExperiment& cfg, const CGConfig& solver, int trial,
                   std::size_t sweep_index) {
  TrialRow row;
  row.trial = trial;
  Rng mixing_rng = stream(cfg.rng_seed, kMixingStream, static_cast<std::uint64_t>(trial));
  const ComplexMatrix a = draw_mixing(cfg.n, mixing_rng);
  Rng rng = stream(cfg.rng_seed, sweep_index + 1, static_cast<std::uint64_t>(trial));

  try {
    EstimateSet estimates;
    estimates.reserve(static_cast<std::size_t>(cfg.n_est));
    for (int i = 0; i < cfg.n_est; ++i) {
      const ComplexMatrix z = draw_system_noise(cfg.n, rng);
      const ComplexMatrix s = generate_sources(cfg.n, cfg.samples_per_trial, rng);
      estimates.emplace_back(sut_estimate(mix(a, z, cfg.noise_level, s)).mixing);
    }
    const ColumnEstimate reference = estimates.front();
    const EstimateSet aligned = align_columns(estimates, reference);

    const auto results = average_karcher_detailed(aligned, solver);
    std::vector<GrassmannPoint> means;
    bool converged = true;
    for (const auto& r : results) {
      converged = converged && r.converged();
      means.push_back(r.mean);
    }
    row.amari_karcher = amari_error(representatives(means), a).value;
    row.amari_euclid = amari_error(average_euclid(aligned), a).value;
    row.status = converged ? "ok" : "skipped_not_converged";
  } catch (const CutLocus&) {
    row.status = "skipped_cut_locus";
  } catch (const IllConditioned&) {
    row.status = "skipped_ill_conditioned";
  } catch (const DegenerateAverage&) {
    row.status = "skipped_degenerate_average";
  }
  if (!row.ok()) {
    row.amari_karcher = std::numeric_limits<double>::quiet_NaN();
    row.amari_euclid = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace

std::vector<TrialRow> run_experiment(const MixingExperiment& base, const Sweep& sweep,
                                     const CGConfig& config, unsigned threads) {
  base.validate();
  config.validate();
  if (sweep.values.empty()) throw InvalidInput("run_experiment: empty sweep");

  std::vector<MixingExperiment> configs;
  for (double v : sweep.values) {
    MixingExperiment cfg = base;
    if (sweep.parameter == SweepParameter::NoiseLevel) {
      cfg.noise_level = v;
    } else {
      if (!(v >= 1) || v != std::floor(v)) {
        throw InvalidInput("run_experiment: N_est sweep values must be positive integers");
      }
      cfg.n_est = static_cast<int>(v);
    }
    cfg.validate();
    configs.push_back(cfg);
  }

  const std::size_t per_sweep = static_cast<std::size_t>(base.trials);
  const std::size_t total = per_sweep * configs.size();
  std::vector<TrialRow> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t s = job / per_sweep;
      const int trial = static_cast<int>(job % per_sweep);
      TrialRow row = run_trial(configs[s], config, trial, s);
      row.parameter = sweep.parameter;
      row.sweep_value = sweep.values[s];
      rows[job] = std::move(row);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  return rows;
}

}  // namespace subavg::blindid
