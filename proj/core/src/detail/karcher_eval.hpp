#pragma once

#include <cstddef>
#include <optional>

#include "subavg/karcher.hpp"

namespace subavg::detail {

/// Cost and gradient evaluated from a unitary frame theta of the point
/// P = X1 X1^H. On cut locus only `cut_index` is meaningful.
struct FrameEvaluation {
  double cost = 0;
  ComplexMatrix gradient;
  std::optional<std::size_t> cut_index;
};

FrameEvaluation evaluate_in_frame(const KarcherProblem& problem, const ComplexMatrix& theta);

double newton_step_raw(const KarcherProblem& problem, const ComplexMatrix& p, const ComplexMatrix& h,
                       double domain_tol);

DirectionCoefficient coefficient_raw(DirectionRule rule, const ComplexMatrix& g_new,
                                     const ComplexMatrix& g_old_transported,
                                     const ComplexMatrix& h_old_transported,
                                     const ComplexMatrix& h_old, const ComplexMatrix& g_old);

}  // namespace subavg::detail
