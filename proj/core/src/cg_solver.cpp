#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <string>

#include "detail/karcher_eval.hpp"
#include "subavg/errors.hpp"
#include "subavg/karcher.hpp"

namespace subavg {

using linalg::commutator;
using linalg::trace_inner;

namespace {

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix projector_of(const ComplexMatrix& theta, Index m) {
  const auto x1 = theta.leftCols(m);
  return hermitian_part(x1 * x1.adjoint());
}

/// Re-orthonormalizes a drifting frame; the span of every leading block of
/// columns is unchanged.
ComplexMatrix reorthonormalize(const ComplexMatrix& theta) {
  Eigen::HouseholderQR<ComplexMatrix> qr(theta);
  return qr.householderQ() * ComplexMatrix::Identity(theta.rows(), theta.cols());
}

/// One trial point along the current geodesic, kept so that the accepted
/// step does not have to be re-evaluated.
struct Trial {
  double step = std::numeric_limits<double>::quiet_NaN();
  ComplexMatrix rotation;
  ComplexMatrix theta;
  detail::FrameEvaluation eval;
};

/// Near a minimizer the Armijo decrease c a g(G,H) can fall below the
/// rounding noise of F. Then a step is accepted if F stays within that noise
/// and the gradient norm drops.
template <class Eval, class F>
std::optional<double> roundoff_step(Eval& evaluate, F& f_along, double f0, double slope,
                                    double g_norm, const BacktrackingParams& params) {
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f0));
  if (params.armijo * params.initial_step * std::abs(slope) > noise) return std::nullopt;
  double a = params.initial_step;
  for (int k = 0; k <= params.max_halvings; ++k, a *= params.shrink) {
    if (!(f_along(a) <= f0 + noise)) continue;
    if (evaluate(a).eval.gradient.norm() < g_norm) return a;
  }
  return std::nullopt;
}

}  // namespace

KarcherResult karcher_mean(const KarcherProblem& problem,
                           const std::optional<GrassmannPoint>& init, const CGConfig& config) {
  config.validate();
  if (config.step_rule == StepRule::NewtonCP && problem.rank() != 1) {
    throw InvalidInput("karcher_mean: the Newton step rule requires rank-1 subspaces");
  }
  const GrassmannPoint start = init ? *init : euclidean_anchor(problem);
  gr::require_same_space(problem.points().front(), start, "karcher_mean");

  const Index n = problem.dim();
  const Index m = problem.rank();
  const int period = config.effective_restart_period(n, m);

  ComplexMatrix theta = gr::unitary_frame(start);
  ComplexMatrix p = projector_of(theta, m);

  KarcherResult result{start, {}, SolverStatus::Converged, {}, std::nullopt};
  auto finish = [&](SolverStatus status, std::string message) {
    result.status = status;
    result.message = std::move(message);
    result.mean = GrassmannPoint(HermitianMatrix::hermitian_part(p), m);
    return result;
  };

  detail::FrameEvaluation eval = detail::evaluate_in_frame(problem, theta);
  if (eval.cut_index) {
    result.offending_index = eval.cut_index;
    return finish(SolverStatus::CutLocus,
                  "initial point is at the cut locus of datum " + std::to_string(*eval.cut_index));
  }
  double cost = eval.cost;
  ComplexMatrix g = std::move(eval.gradient);
  ComplexMatrix h = -g;
  double g_norm = g.norm();

  IterationRecord first;
  first.iteration = 0;
  first.cost = cost;
  first.grad_norm = g_norm;
  first.rule = config.direction_rule;
  first.restart = true;
  result.trace.records.push_back(first);
  if (g_norm < config.grad_tol) return finish(SolverStatus::Converged, "converged");

  for (int k = 1; k <= config.max_iter; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.rule = config.direction_rule;

    double slope = trace_inner(g, h);
    if (!(slope < 0)) {
      h = -g;
      slope = -trace_inner(g, g);
    }

    const ComplexMatrix gen_raw = commutator(h, p);
    const ComplexMatrix generator = 0.5 * (gen_raw - gen_raw.adjoint());

    Trial trial;
    auto evaluate = [&](double a) -> const Trial& {
      if (a != trial.step) {
        trial.step = a;
        trial.rotation = linalg::expm_skew(a * generator);
        trial.theta = trial.rotation * theta;
        trial.eval = detail::evaluate_in_frame(problem, trial.theta);
      }
      return trial;
    };
    auto f_along = [&](double a) {
      const Trial& t = evaluate(a);
      return t.eval.cut_index ? std::numeric_limits<double>::infinity() : t.eval.cost;
    };

    double a = 0;
    try {
      bool use_backtracking = config.step_rule == StepRule::Backtracking;
      if (!use_backtracking) {
        try {
          a = detail::newton_step_raw(problem, p, h, config.newton_domain_tol);
          if (a > config.newton_max_step) {
            a = config.newton_max_step;
            rec.step_capped = true;
          }
          if (!(a > 0) || f_along(a) > cost) use_backtracking = true;
        } catch (const DomainError&) {
          use_backtracking = true;
        } catch (const DegenerateCurvature&) {
          use_backtracking = true;
        }
        rec.newton_fallback = use_backtracking;
      }
      if (use_backtracking) a = backtracking_step(f_along, cost, slope, config.backtracking);
    } catch (const LineSearchFailed& e) {
      const auto roundoff = roundoff_step(evaluate, f_along, cost, slope, g_norm, config.backtracking);
      if (!roundoff) return finish(SolverStatus::LineSearchFailed, e.what());
      a = *roundoff;
      rec.roundoff_step = true;
    }

    const Trial& accepted = evaluate(a);
    if (accepted.eval.cut_index) {
      result.offending_index = accepted.eval.cut_index;
      return finish(SolverStatus::CutLocus, "step reached the cut locus of datum " +
                                                std::to_string(*accepted.eval.cut_index));
    }

    const ComplexMatrix& u = accepted.rotation;
    const ComplexMatrix tau_h = hermitian_part(u * h * u.adjoint());
    const ComplexMatrix tau_g = hermitian_part(u * g * u.adjoint());

    theta = reorthonormalize(accepted.theta);
    p = projector_of(theta, m);
    const ComplexMatrix g_new = accepted.eval.gradient;
    const double cost_new = accepted.eval.cost;

    const DirectionCoefficient r =
        detail::coefficient_raw(config.direction_rule, g_new, tau_g, tau_h, h, g);
    rec.coefficient_fallback = r.fallback;

    ComplexMatrix h_new;
    if (k % period == 0 || r.fallback) {
      h_new = -g_new;
      rec.restart = true;
    } else {
      const ComplexMatrix raw = -g_new + r.value * tau_h;
      // Remove the normal component picked up through rounding.
      h_new = hermitian_part(commutator(p, commutator(p, raw)));
    }

    g = g_new;
    h = std::move(h_new);
    cost = cost_new;
    g_norm = g.norm();

    rec.cost = cost;
    rec.grad_norm = g_norm;
    rec.step = a;
    result.trace.records.push_back(rec);

    if (g_norm < config.grad_tol) return finish(SolverStatus::Converged, "converged");
  }
  return finish(SolverStatus::MaxIterations,
                "gradient norm " + std::to_string(g_norm) + " above tolerance after " +
                    std::to_string(config.max_iter) + " iterations");
}

}  // namespace subavg
