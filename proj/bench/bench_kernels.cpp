// Serial against OpenMP variants of the parallel kernels, plus the reference
// implementations where one exists. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "pux/harness.hpp"

using namespace pux;

namespace {

Exec execOf(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

std::vector<Complex> randomBoxPoints(std::size_t n, double L) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-L, L);
  std::vector<Complex> p(n);
  for (auto& z : p) z = {u(rng), u(rng)};
  return p;
}

struct BieFixture {
  SolveConfig cfg = exampleConfig(3);
  Domain domain = makeDomain(cfg.outer, cfg.cavities);
  PanelSet panels = buildDomainPanels(domain, cfg.panelsPerCurve);
  NearQuadrature near{panels};
  BieSystem sys = makeBieSystem(panels, domain);
  std::vector<double> x;
  LayerDensity density;
  std::vector<Complex> points;

  BieFixture() {
    x.resize(sys.dimension());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i);
    std::vector<double> g(panels.numNodes());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(panels.z[i].real()) * std::cos(panels.z[i].imag());
    density = solveDensity(sys, g);
    const auto all = randomBoxPoints(20000, cfg.L);
    const auto mask = classifyPoints(panels, near, all, Exec::Parallel, BoundaryPolicy::Outside);
    for (std::size_t i = 0; i < all.size() && points.size() < 4000; ++i)
      if (mask.inside(i)) points.push_back(all[i]);
  }
};

BieFixture& bie() {
  static BieFixture f;
  return f;
}

struct ExtensionFixture {
  SolveConfig cfg = exampleConfig(1);
  Domain domain = makeDomain(cfg.outer, cfg.cavities);
  PanelSet panels = buildDomainPanels(domain, cfg.panelsPerCurve);
  NearQuadrature near{panels};
  UniformGrid grid{cfg.L, 200};
  MembershipMask mask = classifyPoints(panels, near, grid.nodes(), Exec::Parallel, BoundaryPolicy::Outside);
  double P = cfg.Rp / grid.h();
  Covering cov = buildCovering(domain, panels, grid, cfg.Rp, cfg.partitionsPerCurve, mask, heuristicM(P));
  StencilTemplate tpl = buildStencil(grid.h(), cfg.Rp, heuristicM(P), GaussianBasis{2.0}, makeWu(heuristicKTilde(P)));
  std::vector<double> samples;

  ExtensionFixture() {
    samples.resize(grid.size());
    for (int j = 0; j < grid.Nu; ++j)
      for (int i = 0; i < grid.Nu; ++i) samples[grid.index(i, j)] = builtinRHS(1, grid.coord(i), grid.coord(j));
  }
};

ExtensionFixture& ext() {
  static ExtensionFixture f;
  return f;
}

struct SpectralFixture {
  UniformGrid grid{1.5, 128};
  SpectralKernel kernel = buildKernel(grid);
  ParticularSolution sol;
  std::vector<Complex> points = randomBoxPoints(2000, 1.4);

  SpectralFixture() {
    std::vector<double> f(grid.size());
    for (int j = 0; j < grid.Nu; ++j)
      for (int i = 0; i < grid.Nu; ++i) {
        const double r2 = std::norm(grid.node(i, j));
        f[grid.index(i, j)] = (6400 * r2 - 160) * std::exp(-40 * r2);
      }
    sol = solveFreeSpace(f, kernel);
  }
};

SpectralFixture& spectral() {
  static SpectralFixture f;
  return f;
}

void BM_ApplyOperator(benchmark::State& s) {
  auto& f = bie();
  for (auto _ : s) benchmark::DoNotOptimize(applyOperator(f.sys, f.x, execOf(s)));
}
BENCHMARK(BM_ApplyOperator)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ApplyOperatorReference(benchmark::State& s) {
  auto& f = bie();
  for (auto _ : s) benchmark::DoNotOptimize(reference::applyOperator(f.sys, f.x));
}
BENCHMARK(BM_ApplyOperatorReference)->Unit(benchmark::kMillisecond);

void BM_EvalField(benchmark::State& s) {
  auto& f = bie();
  for (auto _ : s) benchmark::DoNotOptimize(evalField(f.density, f.sys, f.near, f.points, execOf(s)));
}
BENCHMARK(BM_EvalField)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& s) {
  auto& f = bie();
  const auto pts = randomBoxPoints(20000, f.cfg.L);
  for (auto _ : s) benchmark::DoNotOptimize(classifyPoints(f.panels, f.near, pts, execOf(s), BoundaryPolicy::Outside));
}
BENCHMARK(BM_Classify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BuildExtension(benchmark::State& s) {
  auto& f = ext();
  ExtensionOptions opt;
  opt.exec = execOf(s);
  for (auto _ : s) benchmark::DoNotOptimize(buildExtension(f.samples, f.grid, f.mask, f.cov, f.tpl, opt));
}
BENCHMARK(BM_BuildExtension)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BuildExtensionReference(benchmark::State& s) {
  auto& f = ext();
  for (auto _ : s) benchmark::DoNotOptimize(reference::buildExtension(f.samples, f.grid, f.mask, f.cov, f.tpl));
}
BENCHMARK(BM_BuildExtensionReference)->Unit(benchmark::kMillisecond);

void BM_BuildKernel(benchmark::State& s) {
  const UniformGrid grid(1.5, 128);
  for (auto _ : s) benchmark::DoNotOptimize(buildKernel(grid, 4, execOf(s)));
}
BENCHMARK(BM_BuildKernel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvalAtPoints(benchmark::State& s) {
  auto& f = spectral();
  for (auto _ : s) benchmark::DoNotOptimize(evalAtPoints(f.sol, f.points, 1e-14, execOf(s)));
}
BENCHMARK(BM_EvalAtPoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvalAtPointsReference(benchmark::State& s) {
  auto& f = spectral();
  for (auto _ : s) benchmark::DoNotOptimize(reference::evalAtPoints(f.sol, f.points));
}
BENCHMARK(BM_EvalAtPointsReference)->Unit(benchmark::kMillisecond);

void BM_ExtendedCardinalRows(benchmark::State& s) {
  const double Rp = 0.2, h = 0.02;
  const auto nodes = vogelNodes(60, Rp);
  const auto offsets = gridOffsetsWithin(h, Rp);
  for (auto _ : s)
    benchmark::DoNotOptimize(extendedCardinalRows(GaussianBasis{2.0}, nodes, h, offsets, 256, nullptr, execOf(s)));
}
BENCHMARK(BM_ExtendedCardinalRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
