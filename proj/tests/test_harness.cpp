#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "pux/grid_io.hpp"
#include "pux/harness.hpp"

using namespace pux;

namespace {

// Coarse run of example 1 that is cheap enough for unit tests.
SolveConfig small(int id, int Nu) {
  SolveConfig c = exampleConfig(id);
  c.Nu = Nu;
  c.Neval = 160;
  return c;
}

// Panel-wise Lagrange interpolation of nodal data onto an equispaced parameter grid,
// then max_{m0 <= m < 2 m0} |c_m| / max_m |c_m|. A tail appears when the panels do not
// resolve the data.
double spectralTail(const PanelSet& ps, int curve, const std::vector<double>& g, int m0) {
  const int K = 8 * m0;
  std::vector<double> samples(K);
  for (int k = 0; k < K; ++k) {
    const double t = 2 * kPi * k / K;
    for (std::size_t p = ps.curvePanelBegin[curve]; p < ps.curvePanelBegin[curve + 1]; ++p) {
      const auto& info = ps.panels[p];
      if (t < info.t0 || t >= info.t1) continue;
      double v = 0;
      for (int j = 0; j < kNodesPerPanel; ++j) {
        double l = 1;
        for (int i = 0; i < kNodesPerPanel; ++i)
          if (i != j) l *= (t - ps.t[info.firstNode + i]) / (ps.t[info.firstNode + j] - ps.t[info.firstNode + i]);
        v += l * g[info.firstNode + j];
      }
      samples[k] = v;
    }
  }
  double head = 0, tail = 0;
  for (int m = 0; m < 2 * m0; ++m) {
    Complex c = 0.0;
    for (int k = 0; k < K; ++k) c += samples[k] * std::polar(1.0, -2 * kPi * m * k / K);
    const double a = std::abs(c) / K;
    head = std::max(head, a);
    if (m >= m0) tail = std::max(tail, a);
  }
  return tail / head;
}

}  // namespace

TEST_CASE("built-in right-hand sides") {
  CHECK(std::abs(builtinRHS(1, 0.25, 0.25) + 1.0) < 1e-15);
  CHECK(std::abs(builtinRHS(2, 0.0, 0.0) - (2.0 / 9.0 - 1000.0)) < 1e-12);
  double s = 0;
  for (int i = 0; i <= 5; ++i) s += std::pow(4.0, i) * std::exp(-std::sqrt(std::pow(2.0, i))) * 2;
  CHECK(std::abs(builtinRHS(3, 0.0, 0.0) + s) < 1e-12 * s);
  CHECK(oracle::throwsKind([] { builtinRHS(4, 0, 0); }, ErrorKind::UnknownId));
  CHECK(oracle::throwsKind([] { builtinExact(0, 0, 0); }, ErrorKind::UnknownId));
  CHECK(oracle::throwsKind([] { exampleConfig(7); }, ErrorKind::UnknownId));
}

TEST_CASE("exact solutions have the built-in right-hand sides as Laplacian") {
  const double h = 1e-4;
  for (int id : {1, 2, 3})
    for (const Complex z : oracle::randomPoints(20, 0.9, 11u + id)) {
      const double x = z.real(), y = z.imag();
      const double lap = (builtinExact(id, x + h, y) + builtinExact(id, x - h, y) + builtinExact(id, x, y + h) +
                          builtinExact(id, x, y - h) - 4 * builtinExact(id, x, y)) /
                         (h * h);
      const double f = builtinRHS(id, x, y);
      CHECK(std::abs(lap - f) < 1e-5 * std::max(1.0, std::abs(f)));
    }
}

TEST_CASE("error metrics") {
  std::vector<double> exact{1.0, -2.0, 3.0, 100.0};
  const std::vector<std::uint8_t> mask{1, 1, 1, 0};
  const Metrics same = errorMetrics(exact, exact, mask);
  CHECK(same.relL2 == 0.0);
  CHECK(same.maxRel == 0.0);

  std::vector<double> scaled(exact);
  for (double& v : scaled) v *= 1.01;
  const Metrics m = errorMetrics(scaled, exact, mask);
  CHECK(std::abs(m.relL2 - 0.01) < 1e-14);
  CHECK(std::abs(m.maxRel - 0.01) < 1e-14);

  // Masked-out entries do not contribute.
  scaled[3] = 1e9;
  CHECK(errorMetrics(scaled, exact, mask).relL2 == doctest::Approx(0.01).epsilon(1e-12));

  CHECK(oracle::throwsKind([&] { errorMetrics(exact, exact, {0, 0, 0, 0}); }, ErrorKind::EmptyMask));
  CHECK(oracle::throwsKind([&] { errorMetrics(exact, {1.0}, mask); }, ErrorKind::Config));
}

TEST_CASE("fitted order of an exact power law") {
  std::vector<int> Nu{100, 150, 200, 300};
  std::vector<double> err;
  for (int n : Nu) err.push_back(3.0 * std::pow(n, -7.5));
  CHECK(fittedOrder(Nu, err) == doctest::Approx(-7.5).epsilon(1e-12));
}

TEST_CASE("harmonic data with zero source reduces to the boundary integral solve") {
  SolveConfig c = small(1, 100);
  c.problem.manufactured = 0;
  c.problem.harmonicAlpha = 1.0;
  c.problem.harmonicPoint = {1.3, 0.4};
  const SolveResult r = solvePoisson(c);
  CHECK(r.report.hasReference);
  MESSAGE("relative l2 " << r.report.relativeL2 << ", max " << r.report.maxRelative);
  CHECK(r.report.relativeL2 < 1e-11);
  CHECK(r.report.maxRelative < 1e-11);
  CHECK(r.maxPartitionResidual == 0.0);
  CHECK(r.modifiedData == r.boundaryData);

  // Stage isolation: the same density and field come out of the lbie stage alone.
  const Domain d = makeDomain(c.outer, c.cavities);
  const PanelSet ps = buildDomainPanels(d, c.panelsPerCurve);
  const NearQuadrature nq(ps);
  const BieSystem sys = makeBieSystem(ps, d, c.gmres);
  std::vector<double> g(ps.numNodes());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = c.problem.exact(ps.z[i].real(), ps.z[i].imag());
  const LayerDensity dens = solveDensity(sys, g);
  CHECK(dens.mu == r.density.mu);
  std::vector<Complex> pts;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < r.eval.points.size(); ++i)
    if (r.eval.inside[i]) {
      pts.push_back(r.eval.points[i]);
      where.push_back(i);
    }
  const auto uh = evalField(dens, sys, nq, pts);
  bool identical = true;
  for (std::size_t k = 0; k < pts.size(); ++k) identical = identical && uh[k] == r.u[where[k]];
  CHECK(identical);
}

TEST_CASE("report invariants and resolved parameters") {
  const SolveConfig c = small(1, 120);
  const SolveResult r = solvePoisson(c);
  const ErrorReport& e = r.report;
  CHECK(e.Nu == 120);
  CHECK(e.P == doctest::Approx(c.Rp * c.Nu / (2 * c.L)));
  CHECK(e.kTilde == heuristicKTilde(e.P));
  CHECK(e.M == heuristicM(e.P));
  CHECK(e.betaMin >= 1.0);
  CHECK(e.gmresIterations > 0);
  CHECK(e.times.buildA >= 0.0);

  // relL2 <= maxRel * sqrt(n) * max|u*| / |u*|_2.
  double ref2 = 0, refMax = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.eval.points.size(); ++i)
    if (r.eval.inside[i]) {
      const double u = c.problem.exact(r.eval.points[i].real(), r.eval.points[i].imag());
      ref2 += u * u;
      refMax = std::max(refMax, std::abs(u));
      ++n;
    }
  CHECK(n == r.eval.insideCount());
  CHECK(e.relativeL2 <= e.maxRelative * std::sqrt(double(n)) * refMax / std::sqrt(ref2) * (1 + 1e-12));
  CHECK(e.relativeL2 < 1e-6);

  // Pruned evaluation points carry zero.
  for (std::size_t i = 0; i < r.eval.points.size(); ++i)
    if (!r.eval.inside[i]) CHECK(r.u[i] == 0.0);
}

TEST_CASE("evaluation grid is independent of the solver resolution") {
  SolveConfig a = small(2, 200), b = small(2, 400);
  CHECK(makeEvaluationGrid(a).inside == makeEvaluationGrid(b).inside);
}

TEST_CASE("stage errors carry the stage name") {
  SolveConfig c = small(1, 100);
  c.L = 1.2;
  try {
    solvePoisson(c);
    FAIL("expected a covering error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::Config));
    CHECK(e.stage() == "covering");
  }
}

TEST_CASE("multiply connected example runs end to end") {
  SolveConfig c = small(2, 400);
  c.stabilizer = StabilizedPath::Extended;
  c.problem.harmonicAlpha = 0.3;
  c.problem.harmonicPoint = {0.0, 0.0};
  const SolveResult r = solvePoisson(c);
  MESSAGE("relative l2 " << r.report.relativeL2 << ", max " << r.report.maxRelative);
  CHECK(r.report.relativeL2 < 1e-8);

  // The modified boundary data is resolved by the panels that resolve g: whatever
  // content it has beyond mode 4 N_panels lies below the error of the solution itself.
  const Domain d = makeDomain(c.outer, c.cavities);
  const PanelSet ps = buildDomainPanels(d, c.panelsPerCurve);
  for (int curve = 0; curve < 2; ++curve) {
    const int m0 = 16 * c.panelsPerCurve[curve] / 4;
    const double tg = spectralTail(ps, curve, r.boundaryData, m0);
    const double tm = spectralTail(ps, curve, r.modifiedData, m0);
    MESSAGE("curve " << curve << " tail of g " << tg << ", of g - uP " << tm);
    CHECK(tg < 1e-13);
    CHECK(tm <= std::max(tg, r.report.relativeL2));
  }
}

TEST_CASE("convergence study resolves heuristics and is deterministic") {
  SolveConfig c = small(1, 100);
  const std::vector<int> Nu{90, 110, 130};
  StencilCache cache;
  const auto rows = convergenceStudy(c, Nu, Reference::Manufactured, &cache);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& e = rows[i].report;
    CHECK(e.Nu == Nu[i]);
    CHECK(e.kTilde == heuristicKTilde(e.P));
    CHECK(e.M == heuristicM(e.P));
  }
  CHECK(rows[0].localOrder == 0.0);
  CHECK(rows[2].report.relativeL2 < rows[0].report.relativeL2);

  const std::string csv = studyCsv(rows, Reference::Manufactured);
  CHECK(csv.rfind("# reference,manufactured\nN_u,P,kTilde,M,betaMin,relL2,maxRel,localOrder\n", 0) == 0);
  const auto again = convergenceStudy(c, Nu, Reference::Manufactured);
  CHECK(studyCsv(again, Reference::Manufactured) == csv);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].report.relativeL2 == rows[i].report.relativeL2);
}

TEST_CASE("self-referenced study") {
  SolveConfig c = small(1, 100);
  const auto rows = convergenceStudy(c, {90, 130}, Reference::Self);
  CHECK(rows.back().report.relativeL2 == 0.0);
  CHECK(rows.front().report.relativeL2 > 0.0);
  CHECK(studyCsv(rows, Reference::Self).rfind("# reference,self", 0) == 0);
}

TEST_CASE("cached stencils give the same result as fresh ones") {
  SolveConfig c = small(1, 100);
  StencilCache cache;
  const SolveResult a = solvePoisson(c, nullptr, &cache);
  CHECK(cache.size() == 1);
  c.kTilde = 1;
  const SolveResult cached = solvePoisson(c, nullptr, &cache);
  const SolveResult fresh = solvePoisson(c);
  CHECK(cache.size() == 1);
  CHECK(cached.u == fresh.u);
  CHECK(cached.u != a.u);
}

TEST_CASE("downsampling leaves the error within an order of magnitude") {
  SolveConfig c = small(1, 200);
  StencilCache cache;
  std::vector<double> errs;
  for (double beta : {3.0, 5.0, 0.0}) {
    c.betaTarget = beta;
    errs.push_back(solvePoisson(c, nullptr, &cache).report.relativeL2);
  }
  MESSAGE("errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  const auto [lo, hi] = std::minmax_element(errs.begin(), errs.end());
  CHECK(*hi <= 10 * *lo);
}

TEST_CASE("config JSON round trip and validation") {
  for (int id : {1, 2, 3}) {
    SolveConfig c = exampleConfig(id);
    c.M = 77;
    c.stabilizer = StabilizedPath::Extended;
    c.problem.harmonicAlpha = 0.5;
    c.problem.harmonicPoint = {0.1, -0.2};
    const std::string text = configToJson(c);
    const SolveConfig back = configFromJson(text);
    CHECK(configToJson(back) == text);
    CHECK(back.M == 77);
    CHECK(back.kTilde == 0);
    CHECK(back.cavities.size() == c.cavities.size());
    CHECK(back.outer.cosCoeffs == c.outer.cosCoeffs);
  }
  const SolveConfig fromExample = configFromJson(R"({"schemaVersion": 1, "example": 2, "Nu": 300})");
  CHECK(fromExample.Nu == 300);
  CHECK(fromExample.Rp == 0.0675);
  CHECK(fromExample.cavities.size() == 1);

  auto bad = [](const char* text) { return oracle::throwsKind([&] { configFromJson(text); }, ErrorKind::Config); };
  CHECK(bad("{"));
  CHECK(bad(R"({"example": 1})"));
  CHECK(bad(R"({"schemaVersion": 2, "example": 1})"));
  CHECK(bad(R"({"schemaVersion": 1, "example": 1, "M": 401})"));
  CHECK(bad(R"({"schemaVersion": 1, "example": 1, "M": "many"})"));
  CHECK(bad(R"({"schemaVersion": 1, "example": 1, "Nu": 10})"));
  CHECK(bad(R"({"schemaVersion": 1, "example": 1, "stabilizer": "qr"})"));
  CHECK(bad(R"({"schemaVersion": 1, "example": 2, "panelsPerCurve": [64]})"));
  CHECK(oracle::throwsKind([] { configFromJson(R"({"schemaVersion": 1, "example": 5})"); }, ErrorKind::UnknownId));
}

TEST_CASE("grid binary round trip") {
  const UniformGrid grid(1.25, 12);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i) * 1e3;
  const auto path = (std::filesystem::temp_directory_path() / "pux_grid_roundtrip.bin").string();
  writeGridBinary(path, grid, v);
  UniformGrid back;
  CHECK(readGridBinary(path, back) == v);
  CHECK(back.Nu == 12);
  CHECK(back.L == 1.25);
  CHECK(gridChecksum(v) != gridChecksum(std::vector<double>(v.size(), 0.0)));

  // Flip one value byte.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  CHECK(oracle::throwsKind([&] { readGridBinary(path, back); }, ErrorKind::Config));
  std::filesystem::remove(path);
  CHECK(oracle::throwsKind([&] { readGridBinary(path, back); }, ErrorKind::Config));
}
