#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "subavg/subavg.hpp"

namespace {

using namespace subavg;

using Rng = std::mt19937_64;

ComplexMatrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      m(i, j) = Complex(re, normal(rng));
    }
  return m;
}

GrassmannPoint random_point(Index n, Index m, Rng& rng) {
  return gr::projector_from_basis(StiefelBasis::orthonormalize(gaussian(n, m, rng)));
}

TangentVector random_tangent(const GrassmannPoint& p, double norm, Rng& rng) {
  const TangentVector t =
      gr::tangent_project(p, HermitianMatrix::hermitian_part(gaussian(p.dim(), p.dim(), rng)));
  return t.scaled(norm / t.norm());
}

std::vector<GrassmannPoint> ball(const GrassmannPoint& c, int count, double radius, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.05, radius);
  std::vector<GrassmannPoint> out;
  for (int i = 0; i < count; ++i) out.push_back(gr::exp_map(c, random_tangent(c, uniform(rng), rng)));
  return out;
}

void BM_Geodesic(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<Index>(state.range(0));
  const GrassmannPoint p = random_point(n, n / 2, rng);
  const TangentVector h = random_tangent(p, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gr::geodesic(p, h, 0.7));
}
BENCHMARK(BM_Geodesic)->Arg(5)->Arg(16)->Arg(32);

void BM_LogMap(benchmark::State& state) {
  Rng rng(2);
  const auto n = static_cast<Index>(state.range(0));
  const GrassmannPoint p = random_point(n, n / 2, rng);
  const GrassmannPoint q = gr::exp_map(p, random_tangent(p, 1.0, rng));
  for (auto _ : state) benchmark::DoNotOptimize(gr::log_map(p, q));
}
BENCHMARK(BM_LogMap)->Arg(5)->Arg(16)->Arg(32);

void BM_Distance(benchmark::State& state) {
  Rng rng(3);
  const GrassmannPoint p = random_point(5, 2, rng);
  const GrassmannPoint q = random_point(5, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gr::distance(p, q));
}
BENCHMARK(BM_Distance);

void BM_KarcherGradient(benchmark::State& state) {
  Rng rng(4);
  const GrassmannPoint c = random_point(5, 2, rng);
  const KarcherProblem problem(ball(c, 10, 0.5, rng));
  for (auto _ : state) benchmark::DoNotOptimize(karcher_gradient(problem, c));
}
BENCHMARK(BM_KarcherGradient);

void BM_KarcherMean(benchmark::State& state) {
  Rng rng(5);
  const Index m = state.range(0);
  const GrassmannPoint c = random_point(5, m, rng);
  const KarcherProblem problem(ball(c, 10, 0.3, rng));
  CGConfig cfg;
  if (state.range(1) == 1) cfg.step_rule = StepRule::NewtonCP;
  for (auto _ : state) benchmark::DoNotOptimize(karcher_mean(problem, std::nullopt, cfg));
}
BENCHMARK(BM_KarcherMean)->Args({2, 0})->Args({1, 0})->Args({1, 1});

void BM_SutEstimate(benchmark::State& state) {
  blindid::Rng rng(6);
  const ComplexMatrix a = gaussian(5, 5, rng);
  const ComplexMatrix w = a * blindid::generate_sources(5, state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(blindid::sut_estimate(w));
}
BENCHMARK(BM_SutEstimate)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
