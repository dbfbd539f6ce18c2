#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subavg/grassmann.hpp"

namespace subavg {

/// Conjugate-gradient coefficient formulas, all evaluated with parallel
/// transported quantities.
enum class DirectionRule {
  HestenesStiefel,
  PolakRibiere,
  FletcherReeves,
  DaiYuan,
  Star,  ///< -g(G+, G+ - tG) / g(H, G), using the untransported H and G.
};

enum class StepRule {
  Backtracking,
  NewtonCP,  ///< one-dimensional Newton step, only for rank-1 subspaces
};

std::string_view to_string(DirectionRule rule);
std::string_view to_string(StepRule rule);
/// Accepts "hs", "pr", "fr", "dy", "star" (case-sensitive).
std::optional<DirectionRule> parse_direction_rule(std::string_view s);
/// Accepts "backtrack" and "newton".
std::optional<StepRule> parse_step_rule(std::string_view s);

/// Armijo backtracking: a = initial_step * shrink^k for the smallest k >= 0
/// with f(a) <= f(0) + armijo * a * slope.
/// The default initial step is 1/2: the cost has Hessian close to 2 Id at a
/// minimizer, so a unit steepest-descent step overshoots to the mirror point.
struct BacktrackingParams {
  double initial_step = 0.5;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_halvings = 60;
};

struct CGConfig {
  DirectionRule direction_rule = DirectionRule::HestenesStiefel;
  StepRule step_rule = StepRule::Backtracking;
  BacktrackingParams backtracking;
  double grad_tol = 1e-8;
  int max_iter = 500;
  /// Steepest-descent restart period; defaults to 2m(n-m) - 1.
  std::optional<int> restart_period;
  /// Upper bound on a Newton step size; larger steps are clipped.
  double newton_max_step = 1.0;
  /// Newton steps need every lambda_i = y_i^H P y_i inside (tol, 1 - tol).
  double newton_domain_tol = 1e-12;

  /// Throws InvalidInput on out-of-range parameters.
  void validate() const;
  int effective_restart_period(Index n, Index m) const;
};

struct IterationRecord {
  int iteration = 0;
  double cost = 0;
  double grad_norm = 0;
  double step = 0;
  DirectionRule rule = DirectionRule::HestenesStiefel;
  bool restart = false;               ///< next direction is -G
  bool coefficient_fallback = false;  ///< zero denominator, r set to 0
  bool step_capped = false;           ///< Newton step clipped to newton_max_step
  bool newton_fallback = false;       ///< Newton step rejected, backtracking used
  bool roundoff_step = false;         ///< Armijo unresolvable in floating point; step
                                      ///< accepted on gradient decrease instead
};

struct CGTrace {
  std::vector<IterationRecord> records;
};

/// Data points Q_1..Q_N of a Karcher mean problem with uniform weights.
class KarcherProblem {
 public:
  explicit KarcherProblem(std::vector<GrassmannPoint> points);
  explicit KarcherProblem(const std::vector<StiefelBasis>& bases);

  std::size_t size() const noexcept { return points_.size(); }
  Index dim() const noexcept { return points_.front().dim(); }
  Index rank() const noexcept { return points_.front().rank(); }
  const std::vector<GrassmannPoint>& points() const noexcept { return points_; }
  /// Orthonormal bases Y_i with Q_i = Y_i Y_i^H.
  const std::vector<ComplexMatrix>& bases() const noexcept { return bases_; }

 private:
  std::vector<GrassmannPoint> points_;
  std::vector<ComplexMatrix> bases_;
};

/// F(P) = (1/N) sum_i dist^2(P, Q_i). Throws CutLocus carrying the index of
/// the first datum at the cut locus of P.
double karcher_cost(const KarcherProblem& problem, const GrassmannPoint& p);

/// grad F(P) = -(2/N) sum_i log_P(Q_i), assembled per datum in the unitary
/// frame of P.
TangentVector karcher_gradient(const KarcherProblem& problem, const GrassmannPoint& p);

/// Armijo backtracking along a curve. `f_along(a)` evaluates the cost at
/// step a; non-finite values count as rejections.
/// Throws NotDescentDirection if slope >= 0 and LineSearchFailed after
/// `max_halvings` reductions.
double backtracking_step(const std::function<double(double)>& f_along, double f0, double slope,
                         const BacktrackingParams& params);

/// Newton step size -F'(0) / |F''(0)| along the geodesic through `h` for a
/// problem on CP^{n-1} (rank 1). Derivatives are analytic.
/// Throws InvalidInput for rank != 1, DomainError when some y_i^H P y_i is
/// outside (domain_tol, 1 - domain_tol), DegenerateCurvature when
/// |F''(0)| < 1e-14 ||H||^2.
double newton_step_cp(const KarcherProblem& problem, const GrassmannPoint& p,
                      const TangentVector& h, double domain_tol = 1e-12);

struct DirectionCoefficient {
  double value = 0;
  bool fallback = false;  ///< denominator vanished, value forced to 0
};

/// The CG coefficient r for H+ = -G+ + r tau(H). `g_new`, `g_old_transported`
/// and `h_old_transported` live at the new point; `h_old` and `g_old` at the
/// previous one (only the Star rule reads them).
DirectionCoefficient direction_coefficient(DirectionRule rule, const TangentVector& g_new,
                                           const TangentVector& g_old_transported,
                                           const TangentVector& h_old_transported,
                                           const TangentVector& h_old,
                                           const TangentVector& g_old);

/// Top-m eigenspace of the averaged projector (1/N) sum Q_i, or Q_1 when the
/// m-th / (m+1)-th eigenvalue gap is below 1e-8.
GrassmannPoint euclidean_anchor(const KarcherProblem& problem);

enum class SolverStatus { Converged, MaxIterations, CutLocus, LineSearchFailed };

std::string_view to_string(SolverStatus status);

struct KarcherResult {
  GrassmannPoint mean;
  CGTrace trace;
  SolverStatus status = SolverStatus::Converged;
  std::string message;
  /// Datum at the cut locus when status == CutLocus.
  std::optional<std::size_t> offending_index;

  bool converged() const noexcept { return status == SolverStatus::Converged; }
};

/// Geometric conjugate gradient for the Karcher mean. Iterates on a unitary
/// frame [X1 X2] of the current point, moves along geodesics, transports the
/// previous direction and gradient, and restarts with steepest descent every
/// restart period. Failures (cut locus, line search) stop the iteration and
/// are reported through `status`; the trace up to that point is kept.
/// `init` defaults to euclidean_anchor(problem).
KarcherResult karcher_mean(const KarcherProblem& problem,
                           const std::optional<GrassmannPoint>& init, const CGConfig& config);

}  // namespace subavg
