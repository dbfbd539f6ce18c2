#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "subavg/errors.hpp"
#include "subavg/grassmann.hpp"

namespace {

using namespace subavg;
using std::numbers::pi;
using std::numbers::sqrt2;

constexpr double kTol = 1e-10;

GrassmannPoint cp1(double t) {
  return GrassmannPoint(HermitianMatrix::hermitian_part(oracle::cp1_geodesic(t)), 1);
}

TangentVector cp1_velocity_at_e() {
  return TangentVector(GrassmannPoint::standard(2, 1), oracle::cp1_velocity());
}

TEST(GrassmannPoint, ValidatesProjectorInvariants) {
  EXPECT_NO_THROW(GrassmannPoint::standard(4, 2));
  EXPECT_THROW(GrassmannPoint(HermitianMatrix::identity(3), 2), InvalidInput);
  EXPECT_THROW(GrassmannPoint(HermitianMatrix::diagonal(RealVector{{1.0, 0.5}}), 1), InvalidInput);
}

TEST(StiefelBasis, ValidatesOrthonormality) {
  EXPECT_THROW(StiefelBasis(ComplexMatrix::Ones(3, 2)), InvalidInput);
  EXPECT_THROW(StiefelBasis::orthonormalize(ComplexMatrix::Ones(3, 2)), InvalidInput);
  oracle::Rng rng(1);
  const ComplexMatrix x = oracle::gaussian(5, 2, rng);
  const StiefelBasis b = StiefelBasis::orthonormalize(x);
  EXPECT_LT((b.matrix().adjoint() * b.matrix() - ComplexMatrix::Identity(2, 2)).norm(), kTol);
  // Same span: projecting x onto range(b) leaves it unchanged.
  EXPECT_LT((b.matrix() * b.matrix().adjoint() * x - x).norm(), 1e-9 * x.norm());
}

TEST(ProjectorFromBasis, StandardProjector) {
  const ComplexMatrix x = ComplexMatrix::Identity(4, 2);
  const auto p = gr::projector_from_basis(StiefelBasis(x));
  EXPECT_LT((p.matrix() - GrassmannPoint::standard(4, 2).matrix()).norm(), kTol);
  EXPECT_EQ(p.rank(), 2);
}

TEST(ProjectorFromBasis, TwoByTwoComplexLine) {
  ComplexMatrix x(2, 1);
  x << 1.0 / sqrt2, Complex(0, 1.0 / sqrt2);
  ComplexMatrix expected(2, 2);
  expected << 0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5;
  EXPECT_LT((gr::projector_from_basis(StiefelBasis(x)).matrix() - expected).norm(), kTol);

  // The basis recovered from P spans (1, i).
  const ComplexMatrix y = gr::basis_from_projector(gr::projector_from_basis(StiefelBasis(x))).matrix();
  EXPECT_NEAR(std::abs((x.adjoint() * y)(0, 0)), 1.0, 1e-12);
}

TEST(ProjectorFromBasis, GaugeInvariance) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix x = oracle::random_basis(6, 3, rng);
    const ComplexMatrix g = oracle::random_unitary(3, rng);
    const auto p = gr::projector_from_basis(StiefelBasis(x));
    const auto q = gr::projector_from_basis(StiefelBasis(x * g));
    EXPECT_LT((p.matrix() - q.matrix()).norm(), kTol);
  }
}

TEST(BasisFromProjector, RoundtripAndStandard) {
  const auto e = gr::basis_from_projector(GrassmannPoint::standard(4, 2)).matrix();
  EXPECT_LT(e.bottomRows(2).norm(), kTol);
  oracle::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_point(6, 2, rng);
    const auto back = gr::projector_from_basis(gr::basis_from_projector(p));
    EXPECT_LT((back.matrix() - p.matrix()).norm(), 1e-8);
  }
}

TEST(UnitaryFrame, SpansRangeAndIsUnitary) {
  oracle::Rng rng(4);
  const auto p = oracle::random_point(5, 2, rng);
  const ComplexMatrix theta = gr::unitary_frame(p);
  EXPECT_LT((theta.adjoint() * theta - ComplexMatrix::Identity(5, 5)).norm(), kTol);
  const ComplexMatrix e = GrassmannPoint::standard(5, 2).matrix();
  EXPECT_LT((theta * e * theta.adjoint() - p.matrix()).norm(), kTol);
}

TEST(TangentProject, TangentUnchangedProjectorToZeroAndOrthogonal) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_point(6, 2, rng);
    const auto h = oracle::random_tangent(p, 1.3, rng);
    EXPECT_LT((gr::tangent_project(p, h.hermitian()).matrix() - h.matrix()).norm(), kTol);
    EXPECT_LT(gr::tangent_project(p, p.projector()).norm(), kTol);

    const HermitianMatrix x = oracle::random_hermitian(6, rng);
    const auto px = gr::tangent_project(p, x);
    EXPECT_NEAR(linalg::trace_inner(x.matrix() - px.matrix(), px.matrix()), 0.0, 1e-10);
    EXPECT_LT((gr::tangent_project(p, px.hermitian()).matrix() - px.matrix()).norm(), kTol);
  }
}

TEST(TangentProject, DimensionMismatch) {
  EXPECT_THROW(gr::tangent_project(GrassmannPoint::standard(3, 1), HermitianMatrix::identity(4)),
               InvalidInput);
}

TEST(TangentVector, RejectsNonTangent) {
  EXPECT_THROW(TangentVector(GrassmannPoint::standard(3, 1), HermitianMatrix::identity(3)),
               InvalidInput);
}

TEST(AdP, CubeEqualsAdP) {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_point(7, 3, rng);
    const ComplexMatrix& pm = p.matrix();
    const ComplexMatrix x = oracle::random_hermitian(7, rng).matrix();
    const ComplexMatrix ad1 = linalg::commutator(pm, x);
    const ComplexMatrix ad3 = linalg::commutator(pm, linalg::commutator(pm, ad1));
    EXPECT_LT((ad3 - ad1).norm(), kTol);
  }
}

TEST(Metric, Examples) {
  const auto e = GrassmannPoint::standard(2, 1);
  const auto h = cp1_velocity_at_e();
  EXPECT_NEAR(gr::metric(TangentVector::zero(e), h), 0.0, 0.0);
  EXPECT_NEAR(gr::metric(h, h), 2.0, 1e-15);
  oracle::Rng rng(7);
  const auto p = oracle::random_point(5, 2, rng);
  const auto a = oracle::random_tangent(p, 0.7, rng);
  const auto b = oracle::random_tangent(p, 1.1, rng);
  EXPECT_NEAR(gr::metric(a, b), gr::metric(b, a), 1e-14);
  EXPECT_NEAR(gr::metric(a, a), a.matrix().squaredNorm(), 1e-12);
}

TEST(Metric, BaseMismatch) {
  oracle::Rng rng(8);
  const auto p = oracle::random_point(4, 2, rng);
  const auto q = oracle::random_point(4, 2, rng);
  EXPECT_THROW(gr::metric(oracle::random_tangent(p, 1, rng), oracle::random_tangent(q, 1, rng)),
               InvalidInput);
}

TEST(Geodesic, TrivialCases) {
  oracle::Rng rng(9);
  const auto p = oracle::random_point(5, 2, rng);
  const auto h = oracle::random_tangent(p, 0.8, rng);
  EXPECT_LT((gr::geodesic(p, h, 0.0).matrix() - p.matrix()).norm(), kTol);
  for (double t : {0.3, 2.0, -1.5}) {
    EXPECT_LT((gr::geodesic(p, TangentVector::zero(p), t).matrix() - p.matrix()).norm(), kTol);
  }
  EXPECT_EQ(gr::exp_map(p, h).matrix(), gr::geodesic(p, h, 1.0).matrix());
  EXPECT_LT((gr::exp_map(p, TangentVector::zero(p)).matrix() - p.matrix()).norm(), kTol);
}

TEST(Geodesic, CP1ClosedForm) {
  const auto e = GrassmannPoint::standard(2, 1);
  const auto h = cp1_velocity_at_e();
  for (double t : {0.1, 0.5, 1.0, 1.3, pi / 2}) {
    EXPECT_LT((gr::geodesic(e, h, t).matrix() - oracle::cp1_geodesic(t)).norm(), kTol) << t;
  }
  ComplexMatrix end = ComplexMatrix::Zero(2, 2);
  end(1, 1) = 1;
  EXPECT_LT((gr::geodesic(e, h, pi / 2).matrix() - end).norm(), kTol);
  EXPECT_LT((gr::exp_map(e, h).matrix() - oracle::cp1_geodesic(1.0)).norm(), kTol);
}

TEST(Geodesic, ProjectorInvariantsVelocityAndOde) {
  oracle::Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_point(6, 2, rng);
    const auto h = oracle::random_tangent(p, 0.9, rng);
    const double t0 = 0.37;
    const auto at = [&](double t) { return gr::geodesic(p, h, t0 + t).matrix(); };
    const ComplexMatrix pt = at(0);
    EXPECT_LT((pt * pt - pt).norm(), kTol);
    EXPECT_NEAR(pt.trace().real(), 2.0, 1e-8);

    const double step = 1e-4;
    const ComplexMatrix v0 = (gr::geodesic(p, h, step).matrix() - gr::geodesic(p, h, -step).matrix()) /
                             (2 * step);
    EXPECT_LT((v0 - h.matrix()).norm(), 1e-7);

    const ComplexMatrix vel = (at(step) - at(-step)) / (2 * step);
    const ComplexMatrix acc = (at(step) - 2.0 * pt + at(-step)) / (step * step);
    const ComplexMatrix ode =
        acc + linalg::commutator(vel, linalg::commutator(vel, pt));
    EXPECT_LT(ode.norm(), 1e-4);
  }
}

TEST(Geodesic, BaseMismatch) {
  oracle::Rng rng(11);
  const auto p = oracle::random_point(4, 2, rng);
  const auto q = oracle::random_point(4, 2, rng);
  EXPECT_THROW(gr::geodesic(p, oracle::random_tangent(q, 1, rng), 0.5), InvalidInput);
}

TEST(LogMap, TrivialAndCP1) {
  oracle::Rng rng(12);
  const auto q = oracle::random_point(5, 2, rng);
  EXPECT_LT(gr::log_map(q, q).norm(), kTol);

  const auto e = GrassmannPoint::standard(2, 1);
  for (double t0 : {0.05, 0.4, 1.0, 1.5}) {
    const auto xi = gr::log_map(e, cp1(t0));
    EXPECT_LT((xi.matrix() - t0 * oracle::cp1_velocity().matrix()).norm(), 1e-10) << t0;
  }
}

TEST(LogMap, RoundtripsAndNormEqualsDistance) {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 3 + trial % 5;
    const Index m = 1 + trial % (n - 1);
    const auto q = oracle::random_point(n, m, rng);
    const auto xi = oracle::random_tangent(q, 0.05 + 0.9 * (trial % 10) / 10.0, rng);
    const auto p = gr::exp_map(q, xi);
    const auto back = gr::log_map(q, p);
    EXPECT_LT((back.matrix() - xi.matrix()).norm(), 1e-8 * std::max(1.0, xi.norm()));
    EXPECT_LT((gr::exp_map(q, back).matrix() - p.matrix()).norm(), 1e-8);
    EXPECT_NEAR(back.norm(), gr::distance(q, p), 1e-9);
  }
}

TEST(LogMap, CutLocusAndMismatch) {
  const auto e = GrassmannPoint::standard(2, 1);
  EXPECT_THROW(gr::log_map(e, cp1(pi / 2)), CutLocus);
  EXPECT_THROW(gr::log_map(e, GrassmannPoint::standard(3, 1)), InvalidInput);
  EXPECT_THROW(gr::log_map(GrassmannPoint::standard(3, 2), GrassmannPoint::standard(3, 1)),
               InvalidInput);
}

TEST(ParallelTransport, TrivialAndOwnVelocity) {
  oracle::Rng rng(14);
  const auto p = oracle::random_point(6, 3, rng);
  const auto g = oracle::random_tangent(p, 1.0, rng);
  const auto h = oracle::random_tangent(p, 0.8, rng);
  EXPECT_LT((gr::parallel_transport(g, h, 0.0).matrix() - g.matrix()).norm(), kTol);

  const double t = 0.6;
  const double step = 1e-5;
  const ComplexMatrix vel =
      (gr::geodesic(p, h, t + step).matrix() - gr::geodesic(p, h, t - step).matrix()) / (2 * step);
  const auto th = gr::parallel_transport(h, h, t);
  EXPECT_LT((th.matrix() - vel).norm(), 1e-8);
  EXPECT_LT((th.base().matrix() - gr::geodesic(p, h, t).matrix()).norm(), kTol);
}

TEST(ParallelTransport, Isometry) {
  oracle::Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = oracle::random_point(5, 2, rng);
    const auto g = oracle::random_tangent(p, 1.2, rng);
    const auto h = oracle::random_tangent(p, 0.7, rng);
    const double t = 1.7;
    const auto tg = gr::parallel_transport(g, h, t);
    const auto th = gr::parallel_transport(h, h, t);
    EXPECT_NEAR(tg.norm(), g.norm(), kTol);
    EXPECT_NEAR(gr::metric(tg, th), gr::metric(g, h), kTol);
  }
}

TEST(ParallelTransport, BaseMismatch) {
  oracle::Rng rng(16);
  const auto p = oracle::random_point(4, 2, rng);
  const auto q = oracle::random_point(4, 2, rng);
  EXPECT_THROW(gr::parallel_transport(oracle::random_tangent(p, 1, rng),
                                      oracle::random_tangent(q, 1, rng), 0.3),
               InvalidInput);
}

TEST(Distance, Examples) {
  const auto e = GrassmannPoint::standard(2, 1);
  EXPECT_NEAR(gr::distance(e, e), 0.0, kTol);
  for (double t : {0.0, 0.2, 0.7, 1.2, pi / 2}) {
    EXPECT_NEAR(gr::distance(e, cp1(t)), sqrt2 * t, 1e-10) << t;
  }
  EXPECT_NEAR(gr::distance(e, cp1(pi / 2)), sqrt2 * pi / 2, 1e-12);
  EXPECT_THROW(gr::distance(e, GrassmannPoint::standard(3, 1)), InvalidInput);
}

TEST(Distance, SymmetricUnitaryInvariantAndMatchesBlockOracles) {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 3 + trial % 6;
    const Index m = 1 + trial % (n - 1);
    const auto p = oracle::random_point(n, m, rng);
    const auto q = oracle::random_point(n, m, rng);
    const double d = gr::distance(p, q);
    EXPECT_NEAR(d, gr::distance(q, p), 1e-10);
    EXPECT_NEAR(d, oracle::distance_q1(p, q), 1e-8);
    EXPECT_NEAR(d, oracle::distance_q3(p, q), 1e-8);

    const ComplexMatrix u = oracle::random_unitary(n, rng);
    const GrassmannPoint up(HermitianMatrix::hermitian_part(u * p.matrix() * u.adjoint()), m);
    const GrassmannPoint uq(HermitianMatrix::hermitian_part(u * q.matrix() * u.adjoint()), m);
    EXPECT_NEAR(gr::distance(up, uq), d, 1e-9);
  }
}

TEST(PrincipalAngles, AscendingInRange) {
  oracle::Rng rng(18);
  const auto p = oracle::random_point(7, 3, rng);
  const auto q = oracle::random_point(7, 3, rng);
  const RealVector a = gr::principal_angles(p, q);
  ASSERT_EQ(a.size(), 3);
  for (Index k = 0; k < 3; ++k) {
    EXPECT_GE(a(k), 0.0);
    EXPECT_LE(a(k), pi / 2);
    if (k > 0) EXPECT_LE(a(k - 1), a(k));
  }
}

}  // namespace
