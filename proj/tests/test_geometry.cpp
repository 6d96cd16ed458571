#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pux/geometry.hpp"
#include "pux/harness.hpp"
#include "pux/special_quad.hpp"

using namespace pux;

namespace {

BoundaryCurve unitCircle() { return BoundaryCurve{}; }

Domain exampleDomain(int id) {
  const SolveConfig c = exampleConfig(id);
  return makeDomain(c.outer, c.cavities);
}

PanelSet examplePanels(int id) {
  const SolveConfig c = exampleConfig(id);
  return buildDomainPanels(makeDomain(c.outer, c.cavities), c.panelsPerCurve);
}

}  // namespace

TEST_CASE("evalCurve on the unit circle") {
  const auto p = evalCurve(unitCircle(), 0.0);
  CHECK(std::abs(p.z - Complex(1, 0)) < 1e-16);
  CHECK(std::abs(p.dz - Complex(0, 1)) < 1e-16);
  CHECK(std::abs(p.ddz - Complex(-1, 0)) < 1e-16);
}

TEST_CASE("evalCurve on the example 2 outer curve") {
  const auto p = evalCurve(exampleConfig(2).outer, 0.0);
  CHECK(std::abs(p.z - Complex(0.30, 0.0)) < 1e-15);
}

TEST_CASE("negative frequency indices") {
  BoundaryCurve a, b;
  a.c0 = b.c0 = 1.0;
  a.cosCoeffs[-5] = 0.2;
  a.sinCoeffs[-1] = 0.2;
  b.cosCoeffs[5] = 0.2;
  b.sinCoeffs[1] = -0.2;
  for (double t : {0.0, 0.3, 1.7, 4.0}) CHECK(std::abs(evalCurve(a, t).z - evalCurve(b, t).z) < 1e-15);
}

TEST_CASE("curve derivatives match finite differences and curves close") {
  for (int id : {1, 2, 3}) {
    const auto c = exampleConfig(id);
    std::vector<BoundaryCurve> curves{c.outer};
    curves.insert(curves.end(), c.cavities.begin(), c.cavities.end());
    for (const auto& curve : curves) {
      CHECK(std::abs(evalCurve(curve, 0.0).z - evalCurve(curve, 2 * kPi).z) < 1e-14);
      const double d = 1e-5;
      for (double t : {0.1, 1.3, 2.9, 5.5}) {
        const auto p = evalCurve(curve, t);
        const auto pp = evalCurve(curve, t + d), pm = evalCurve(curve, t - d);
        CHECK(std::abs((pp.z - pm.z) / (2 * d) - p.dz) < 1e-8 * (1 + std::abs(p.dz)));
        CHECK(std::abs((pp.dz - pm.dz) / (2 * d) - p.ddz) < 1e-8 * (1 + std::abs(p.ddz)));
      }
    }
  }
}

TEST_CASE("buildPanels node counts and weights") {
  const PanelSet one = buildPanels(unitCircle(), 1);
  CHECK(one.numNodes() == 16);
  double s = 0;
  for (std::size_t i = 0; i < one.numNodes(); ++i) s += one.w[i] * std::abs(one.dz[i]);
  CHECK(std::abs(s - 2 * kPi) < 1e-12);

  const PanelSet ps = buildPanels(exampleConfig(3).outer, 35);
  CHECK(ps.numNodes() == 560);
  for (std::size_t p = 0; p < ps.numPanels(); ++p) {
    double w = 0;
    for (int k = 0; k < kNodesPerPanel; ++k) w += ps.w[ps.panels[p].firstNode + k];
    CHECK(std::abs(w - (ps.panels[p].t1 - ps.panels[p].t0)) < 1e-14);
  }

  const PanelSet two = buildPanels(unitCircle(), 2);
  CHECK(std::abs(two.panels[0].arcLength - two.panels[1].arcLength) < 1e-14);
}

TEST_CASE("panel quadrature reproduces arc length") {
  for (int id : {2, 3}) {
    const auto c = exampleConfig(id);
    const PanelSet ps = examplePanels(id);
    for (std::size_t k = 0; k < ps.numCurves(); ++k) {
      double s = 0;
      for (std::size_t i = ps.curveNodeBegin[k]; i < ps.curveNodeBegin[k + 1]; ++i) s += ps.w[i] * std::abs(ps.dz[i]);
      const double ref = oracle::arcLength(ps.curves[k]);
      CHECK(std::abs(s - ref) < 1e-12 * ref);
      CHECK(std::abs(arcLength(ps.curves[k]) - ref) < 1e-12 * ref);
    }
  }
}

TEST_CASE("panel refinement leaves arc length unchanged") {
  const auto curve = exampleConfig(3).outer;
  auto total = [&](int n) {
    const PanelSet ps = buildPanels(curve, n);
    double s = 0;
    for (std::size_t i = 0; i < ps.numNodes(); ++i) s += ps.w[i] * std::abs(ps.dz[i]);
    return s;
  };
  const double a = total(84), b = total(168);
  CHECK(std::abs(a - b) < 1e-13 * b);
}

TEST_CASE("classification examples") {
  const Domain disc = makeDomain(unitCircle(), {});
  const PanelSet ps = buildDomainPanels(disc, {32});
  const auto m = classifyPoints(disc, ps, {Complex(0, 0), Complex(2, 0)});
  CHECK(m.inside(0));
  CHECK(std::abs(m.rawIndicator[0] - 1.0) < 1e-12);
  CHECK_FALSE(m.inside(1));
  CHECK(std::abs(m.rawIndicator[1]) < 1e-12);

  const Domain d2 = exampleDomain(2);
  const PanelSet p2 = examplePanels(2);
  const Complex z1 = d2.cavitySources.at(0);
  CHECK(oracle::winding(oracle::samplePolygon(d2.cavities[0], 4096), z1) != 0);
  CHECK_FALSE(classifyPoints(d2, p2, {z1}).inside(0));
}

TEST_CASE("cavity sources lie in their cavities") {
  for (int id : {2, 3}) {
    const Domain d = exampleDomain(id);
    REQUIRE(d.cavitySources.size() == d.cavities.size());
    for (std::size_t k = 0; k < d.cavities.size(); ++k) {
      CHECK(oracle::winding(oracle::samplePolygon(d.cavities[k], 4096), d.cavitySources[k]) != 0);
      CHECK_FALSE(oracle::insideDomain(d, 4096, d.cavitySources[k]));
    }
  }
}

TEST_CASE("intersecting curves are rejected") {
  BoundaryCurve inner;
  inner.c0 = 0.5;
  inner.n = -1;
  inner.offset = {0.8, 0.0};
  CHECK_THROWS_AS(makeDomain(unitCircle(), {inner}), Error);
  try {
    makeDomain(unitCircle(), {inner});
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::Config));
  }
}

TEST_CASE("point on the boundary is ambiguous") {
  const Domain d2 = exampleDomain(2);
  const PanelSet p2 = examplePanels(2);
  // (0, -0.04) lies exactly on the example 2 cavity curve.
  const Complex z = evalCurve(d2.cavities[0], 0.5 * kPi).z;
  CHECK(std::abs(z - Complex(0, -0.04)) < 1e-15);
  try {
    classifyPoints(d2, p2, {Complex(0, 0.5), z});
    FAIL("expected AmbiguousPoint");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::AmbiguousPoint));
  }
  const NearQuadrature nq(p2);
  const auto m = classifyPoints(p2, nq, {z}, Exec::Parallel, BoundaryPolicy::Outside);
  CHECK_FALSE(m.inside(0));
}

TEST_CASE("arcLengthCenters on circles") {
  const auto c4 = arcLengthCenters(unitCircle(), 4);
  const Complex expected[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(c4[i] - expected[i]) < 1e-12);

  const auto c21 = arcLengthCenters(unitCircle(), 21);
  const double chord0 = std::abs(c21[1] - c21[0]);
  for (int i = 0; i < 21; ++i) CHECK(std::abs(std::abs(c21[(i + 1) % 21] - c21[i]) - chord0) < 1e-10 * chord0);

  const auto d1 = exampleConfig(1).outer;
  const auto e1 = arcLengthCenters(d1, 21);
  REQUIRE(e1.size() == 21);
  for (int i = 0; i < 21; ++i) {
    const double angle = std::arg((e1[(i + 1) % 21] - d1.offset) / (e1[i] - d1.offset));
    CHECK(std::abs(angle - 2 * kPi / 21) < 1e-10);
  }
}

TEST_CASE("arcLengthCenters are arc-uniform on a non-circular curve") {
  const auto curve = exampleConfig(3).outer;
  const int n = 82;
  const auto t = arcLengthParameters(curve, n);
  const double total = oracle::arcLength(curve);
  for (int i = 0; i < n; ++i) {
    const double a = t[i], b = i + 1 < n ? t[i + 1] : 2 * kPi + t[0];
    const double s = oracle::adaptive([&](double x) { return std::abs(evalCurve(curve, x).dz); }, a, b);
    CHECK(std::abs(s - total / n) < 1e-10 * total / n);
  }
}

TEST_CASE("classification agrees with the winding oracle") {
  for (int id : {1, 2, 3}) {
    const SolveConfig c = exampleConfig(id);
    const Domain d = makeDomain(c.outer, c.cavities);
    const PanelSet ps = buildDomainPanels(d, c.panelsPerCurve);
    const auto pts = oracle::randomPoints(1000, c.L, 100 + id);
    const NearQuadrature nq(ps);
    const auto m = classifyPoints(ps, nq, pts, Exec::Parallel, BoundaryPolicy::Outside);

    std::vector<std::vector<Complex>> dense;
    std::vector<std::vector<Complex>> polys;
    for (std::size_t k = 0; k < d.numCurves(); ++k) {
      dense.push_back(oracle::samplePolygon(d.curve(k), 8192));
      polys.push_back(oracle::samplePolygon(d.curve(k), 16 * c.panelsPerCurve[k]));
    }
    const double h = ps.maxPanelArcLength();
    int mismatches = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (oracle::distanceToBoundary(dense, pts[i]) <= h) continue;
      bool in = oracle::winding(polys[0], pts[i]) != 0;
      for (std::size_t k = 1; k < polys.size(); ++k) in = in && oracle::winding(polys[k], pts[i]) == 0;
      if (in != m.inside(i)) ++mismatches;
      CHECK(m.rawIndicator[i] >= -0.1);
      CHECK(m.rawIndicator[i] <= 1.1);
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("reversing orientation flips the curve indicator") {
  BoundaryCurve a = exampleConfig(3).cavities[0];
  BoundaryCurve b = a;
  b.n = -a.n;
  const PanelSet pa = buildPanels(a, 40), pb = buildPanels(b, 40);
  const NearQuadrature na(pa), nb(pb);
  for (Complex z : {a.offset, a.offset + Complex(0.01, 0.02), Complex(1.2, 0.3)}) {
    CHECK(std::abs(curveIndicator(pa, na, 0, z) + curveIndicator(pb, nb, 0, z)) < 1e-13);
  }
  // The cavity orientation gives -1 inside the cavity.
  CHECK(std::abs(curveIndicator(pa, na, 0, a.offset) + 1.0) < 1e-12);
}

TEST_CASE("serial and parallel classification agree") {
  const SolveConfig c = exampleConfig(3);
  const Domain d = makeDomain(c.outer, c.cavities);
  const PanelSet ps = buildDomainPanels(d, c.panelsPerCurve);
  const NearQuadrature nq(ps);
  const auto pts = oracle::randomPoints(500, c.L, 7);
  const auto a = classifyPoints(ps, nq, pts, Exec::Serial, BoundaryPolicy::Outside);
  const auto b = classifyPoints(ps, nq, pts, Exec::Parallel, BoundaryPolicy::Outside);
  CHECK(a.rawIndicator == b.rawIndicator);
}
