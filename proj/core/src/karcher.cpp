#include "subavg/karcher.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "detail/frame_log.hpp"
#include "detail/karcher_eval.hpp"
#include "subavg/errors.hpp"

namespace subavg {

using linalg::commutator;
using linalg::trace_inner;

std::string_view to_string(DirectionRule rule) {
  switch (rule) {
    case DirectionRule::HestenesStiefel: return "hs";
    case DirectionRule::PolakRibiere: return "pr";
    case DirectionRule::FletcherReeves: return "fr";
    case DirectionRule::DaiYuan: return "dy";
    case DirectionRule::Star: return "star";
  }
  return "?";
}

std::string_view to_string(StepRule rule) {
  switch (rule) {
    case StepRule::Backtracking: return "backtrack";
    case StepRule::NewtonCP: return "newton";
  }
  return "?";
}

std::optional<DirectionRule> parse_direction_rule(std::string_view s) {
  for (DirectionRule r : {DirectionRule::HestenesStiefel, DirectionRule::PolakRibiere,
                          DirectionRule::FletcherReeves, DirectionRule::DaiYuan,
                          DirectionRule::Star}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<StepRule> parse_step_rule(std::string_view s) {
  if (s == "backtrack") return StepRule::Backtracking;
  if (s == "newton") return StepRule::NewtonCP;
  return std::nullopt;
}

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIterations: return "max_iter";
    case SolverStatus::CutLocus: return "cut_locus";
    case SolverStatus::LineSearchFailed: return "line_search_failed";
  }
  return "?";
}

void CGConfig::validate() const {
  const auto& bt = backtracking;
  if (!(bt.initial_step > 0)) throw InvalidInput("CGConfig: initial step must be > 0");
  if (!(bt.armijo > 0 && bt.armijo < 1)) throw InvalidInput("CGConfig: Armijo c must be in (0,1)");
  if (!(bt.shrink > 0 && bt.shrink < 1)) throw InvalidInput("CGConfig: shrink rho must be in (0,1)");
  if (bt.max_halvings < 0) throw InvalidInput("CGConfig: max_halvings must be >= 0");
  if (!(grad_tol > 0)) throw InvalidInput("CGConfig: grad_tol must be > 0");
  if (max_iter < 0) throw InvalidInput("CGConfig: max_iter must be >= 0");
  if (restart_period && *restart_period < 1) {
    throw InvalidInput("CGConfig: restart_period must be >= 1");
  }
  if (!(newton_max_step > 0)) throw InvalidInput("CGConfig: newton_max_step must be > 0");
  if (!(newton_domain_tol >= 0 && newton_domain_tol < 0.5)) {
    throw InvalidInput("CGConfig: newton_domain_tol must be in [0, 0.5)");
  }
}

int CGConfig::effective_restart_period(Index n, Index m) const {
  if (restart_period) return *restart_period;
  const auto p = static_cast<int>(2 * m * (n - m) - 1);
  return p < 1 ? 1 : p;
}

KarcherProblem::KarcherProblem(std::vector<GrassmannPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidInput("KarcherProblem: at least one data point is required");
  bases_.reserve(points_.size());
  for (const auto& q : points_) {
    gr::require_same_space(points_.front(), q, "KarcherProblem");
    bases_.push_back(gr::basis_from_projector(q).matrix());
  }
}

KarcherProblem::KarcherProblem(const std::vector<StiefelBasis>& bases) {
  if (bases.empty()) throw InvalidInput("KarcherProblem: at least one data point is required");
  points_.reserve(bases.size());
  bases_.reserve(bases.size());
  for (const auto& y : bases) {
    points_.push_back(gr::projector_from_basis(y));
    gr::require_same_space(points_.front(), points_.back(), "KarcherProblem");
    bases_.push_back(y.matrix());
  }
}

namespace detail {

FrameEvaluation evaluate_in_frame(const KarcherProblem& problem, const ComplexMatrix& theta) {
  const Index n = problem.dim();
  const Index m = problem.rank();
  const auto count = static_cast<double>(problem.size());

  FrameEvaluation out;
  ComplexMatrix z_sum = ComplexMatrix::Zero(n - m, m);
  double sq_sum = 0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const auto fl = frame_log(theta, problem.bases()[i], m, gr::kCutLocusTolerance);
    if (!fl) {
      out.cut_index = i;
      return out;
    }
    z_sum += fl->z;
    // ||xi||^2 = tr(xi^2) = 2 ||Z||_F^2 = 2 sum angle^2.
    sq_sum += 2.0 * fl->angles.squaredNorm();
  }
  out.cost = sq_sum / count;
  out.gradient = (-2.0 / count) * embed_tangent(theta, z_sum);
  out.gradient = 0.5 * (out.gradient + out.gradient.adjoint()).eval();
  return out;
}

namespace {

/// (1 - x cot x) for x in [0, pi), with a series near zero.
double one_minus_x_cot_x(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return x2 / 3.0 + x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0;
  }
  return 1.0 - x * std::cos(x) / std::sin(x);
}

}  // namespace

double newton_step_raw(const KarcherProblem& problem, const ComplexMatrix& p, const ComplexMatrix& h,
                       double domain_tol) {
  const Index n = problem.dim();
  const double h_sq = trace_inner(h, h);
  if (h_sq == 0.0) return 0.0;

  // Second derivative of the geodesic at 0: [[H, P], H].
  const ComplexMatrix p_ddot = commutator(commutator(h, p), h);
  const ComplexMatrix complement = ComplexMatrix::Identity(n, n) - p;

  double d1 = 0;
  double d2 = 0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const ComplexVector y = problem.bases()[i].col(0);
    const double c = (p * y).norm();
    const double s = (complement * y).norm();
    const double lambda = c * c;
    if (!(lambda > domain_tol && lambda < 1.0 - domain_tol)) {
      throw DomainError("newton_step_cp: y_" + std::to_string(i) + "^H P y_" + std::to_string(i) +
                        " = " + std::to_string(lambda) + " outside the Newton domain");
    }
    const double angle = std::atan2(s, c);
    const double r = c * s;  // sqrt(lambda - lambda^2)
    const double lambda_dot = y.dot(h * y).real();
    const double lambda_ddot = y.dot(p_ddot * y).real();
    // phi(lambda) = 2 arccos^2(sqrt(lambda))
    // phi'  = -2 angle / r
    // phi'' = (1 - 2 angle cot(2 angle)) / r^2
    d1 += -2.0 * angle * lambda_dot / r;
    d2 += lambda_dot * lambda_dot * one_minus_x_cot_x(2.0 * angle) / (r * r) -
          2.0 * angle * lambda_ddot / r;
  }
  const auto count = static_cast<double>(problem.size());
  d1 /= count;
  d2 /= count;
  if (std::abs(d2) < 1e-14 * h_sq) {
    throw DegenerateCurvature("newton_step_cp: second derivative vanishes along the direction");
  }
  return -d1 / std::abs(d2);
}

DirectionCoefficient coefficient_raw(DirectionRule rule, const ComplexMatrix& g_new,
                                     const ComplexMatrix& g_old_transported,
                                     const ComplexMatrix& h_old_transported,
                                     const ComplexMatrix& h_old, const ComplexMatrix& g_old) {
  const ComplexMatrix y = g_new - g_old_transported;
  double num = 0;
  double den = 0;
  switch (rule) {
    case DirectionRule::HestenesStiefel:
      num = trace_inner(g_new, y);
      den = trace_inner(h_old_transported, y);
      break;
    case DirectionRule::PolakRibiere:
      num = trace_inner(g_new, y);
      den = trace_inner(g_old, g_old);
      break;
    case DirectionRule::FletcherReeves:
      num = trace_inner(g_new, g_new);
      den = trace_inner(g_old, g_old);
      break;
    case DirectionRule::DaiYuan:
      num = trace_inner(g_new, g_new);
      den = trace_inner(h_old_transported, y);
      break;
    case DirectionRule::Star:
      num = -trace_inner(g_new, y);
      den = trace_inner(h_old, g_old);
      break;
  }
  if (den == 0.0 || !std::isfinite(num / den)) return {0.0, true};
  return {num / den, false};
}

}  // namespace detail

double karcher_cost(const KarcherProblem& problem, const GrassmannPoint& p) {
  gr::require_same_space(problem.points().front(), p, "karcher_cost");
  double sum = 0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const RealVector angles = gr::principal_angles(p, problem.points()[i]);
    if (angles.size() > 0) {
      const double c = std::cos(angles(angles.size() - 1));
      if (c * c <= gr::kCutLocusTolerance) {
        throw CutLocus("karcher_cost: datum " + std::to_string(i) + " is at the cut locus", i);
      }
    }
    sum += 2.0 * angles.squaredNorm();
  }
  return sum / static_cast<double>(problem.size());
}

TangentVector karcher_gradient(const KarcherProblem& problem, const GrassmannPoint& p) {
  gr::require_same_space(problem.points().front(), p, "karcher_gradient");
  const auto eval = detail::evaluate_in_frame(problem, gr::unitary_frame(p));
  if (eval.cut_index) {
    throw CutLocus("karcher_gradient: datum " + std::to_string(*eval.cut_index) +
                       " is at the cut locus",
                   *eval.cut_index);
  }
  return TangentVector(p, HermitianMatrix::hermitian_part(eval.gradient));
}

double backtracking_step(const std::function<double(double)>& f_along, double f0, double slope,
                         const BacktrackingParams& params) {
  if (!(slope < 0)) {
    throw NotDescentDirection("backtracking_step: slope " + std::to_string(slope) +
                              " is not negative");
  }
  double a = params.initial_step;
  for (int k = 0; k <= params.max_halvings; ++k) {
    const double fa = f_along(a);
    if (std::isfinite(fa) && fa <= f0 + params.armijo * a * slope) return a;
    a *= params.shrink;
  }
  throw LineSearchFailed("backtracking_step: Armijo condition not met after " +
                         std::to_string(params.max_halvings) + " reductions");
}

double newton_step_cp(const KarcherProblem& problem, const GrassmannPoint& p,
                      const TangentVector& h, double domain_tol) {
  if (problem.rank() != 1) {
    throw InvalidInput("newton_step_cp: only defined for rank-1 subspaces");
  }
  gr::require_same_space(problem.points().front(), p, "newton_step_cp");
  if (h.base().dim() != p.dim() || (h.base().matrix() - p.matrix()).norm() > 1e-10) {
    throw InvalidInput("newton_step_cp: direction is not based at P");
  }
  return detail::newton_step_raw(problem, p.matrix(), h.matrix(), domain_tol);
}

DirectionCoefficient direction_coefficient(DirectionRule rule, const TangentVector& g_new,
                                           const TangentVector& g_old_transported,
                                           const TangentVector& h_old_transported,
                                           const TangentVector& h_old,
                                           const TangentVector& g_old) {
  // Validates that the transported quantities share the new base point.
  (void)gr::metric(g_new, g_old_transported);
  (void)gr::metric(g_new, h_old_transported);
  (void)gr::metric(h_old, g_old);
  return detail::coefficient_raw(rule, g_new.matrix(), g_old_transported.matrix(),
                                 h_old_transported.matrix(), h_old.matrix(), g_old.matrix());
}

GrassmannPoint euclidean_anchor(const KarcherProblem& problem) {
  const Index n = problem.dim();
  const Index m = problem.rank();
  ComplexMatrix avg = ComplexMatrix::Zero(n, n);
  for (const auto& q : problem.points()) avg += q.matrix();
  avg /= static_cast<double>(problem.size());
  const EigenDecomposition eig = linalg::hermitian_eig(HermitianMatrix::hermitian_part(avg));
  if (m == 0 || m == n || eig.values(m - 1) - eig.values(m) < 1e-8) {
    return problem.points().front();
  }
  return gr::projector_from_basis(StiefelBasis(eig.vectors.leftCols(m)));
}

}  // namespace subavg
