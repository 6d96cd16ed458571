#include "pux/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "pux/special_quad.hpp"

namespace pux {

CurvePoint evalCurve(const BoundaryCurve& curve, double t) {
  double r = curve.c0, dr = 0.0, ddr = 0.0;
  for (const auto& [j, c] : curve.cosCoeffs) {
    const double cj = std::cos(j * t), sj = std::sin(j * t);
    r += c * cj;
    dr -= c * j * sj;
    ddr -= c * j * j * cj;
  }
  for (const auto& [j, d] : curve.sinCoeffs) {
    const double cj = std::cos(j * t), sj = std::sin(j * t);
    r += d * sj;
    dr += d * j * cj;
    ddr -= d * j * j * sj;
  }
  const double n = curve.n;
  const Complex e = curve.R * std::polar(1.0, n * t);
  const Complex in(0.0, n);
  CurvePoint p;
  p.z = e * r + curve.offset;
  p.dz = e * (in * r + dr);
  p.ddz = e * (-n * n * r + 2.0 * in * dr + ddr);
  return p;
}

namespace {

std::array<double, kNodesPerPanel> makeNodes(bool weights) {
  using Rule = boost::math::quadrature::gauss<double, kNodesPerPanel>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const auto& src = weights ? w : x;
  constexpr int half = kNodesPerPanel / 2;
  std::array<double, kNodesPerPanel> out{};
  for (int k = 0; k < half; ++k) {
    out[half + k] = src[k];
    out[half - 1 - k] = weights ? src[k] : -src[k];
  }
  return out;
}

// Winding number of a closed polygon around z.
int polygonWinding(const std::vector<Complex>& poly, Complex z) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = poly[i], b = poly[(i + 1) % n];
    const double cross = (b.real() - a.real()) * (z.imag() - a.imag()) -
                         (z.real() - a.real()) * (b.imag() - a.imag());
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && cross > 0) ++wn;
    } else if (b.imag() <= z.imag() && cross < 0) {
      --wn;
    }
  }
  return wn;
}

std::vector<Complex> sampleCurve(const BoundaryCurve& c, int n) {
  std::vector<Complex> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = evalCurve(c, 2.0 * kPi * i / n).z;
  return pts;
}

}  // namespace

const std::array<double, kNodesPerPanel>& gaussNodes() {
  static const auto nodes = makeNodes(false);
  return nodes;
}

const std::array<double, kNodesPerPanel>& gaussWeights() {
  static const auto weights = makeNodes(true);
  return weights;
}

Domain makeDomain(BoundaryCurve outer, std::vector<BoundaryCurve> cavities) {
  constexpr int kSamples = 4096;
  Domain d;
  d.outer = std::move(outer);
  d.cavities = std::move(cavities);
  std::vector<std::vector<Complex>> samples;
  for (std::size_t k = 0; k < d.numCurves(); ++k) {
    const auto& c = d.curve(k);
    for (int i = 0; i < kSamples; ++i) {
      if (std::abs(evalCurve(c, 2.0 * kPi * i / kSamples).dz) <= 0.0) {
        std::ostringstream os;
        os << "curve " << k << " has a singular parametrization";
        throw Error(ErrorKind::Config, os.str());
      }
    }
    samples.push_back(sampleCurve(c, kSamples));
  }
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      double dmin = INFINITY;
      for (const auto& p : samples[a])
        for (const auto& q : samples[b]) dmin = std::min(dmin, std::abs(p - q));
      if (!(dmin > 0.0)) throw Error(ErrorKind::Config, "boundary curves intersect");
      // Curves must not cross: a sampled point of one must not switch sides of the other.
      const int w0 = polygonWinding(samples[b], samples[a][0]);
      for (const auto& p : samples[a])
        if (polygonWinding(samples[b], p) != w0) throw Error(ErrorKind::Config, "boundary curves intersect");
    }
  }
  for (std::size_t k = 0; k < d.cavities.size(); ++k) {
    const auto& pts = samples[k + 1];
    Complex c{0.0, 0.0};
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    bool ok = polygonWinding(pts, c) != 0;
    for (std::size_t j = 0; ok && j < d.cavities.size(); ++j)
      if (j != k && polygonWinding(samples[j + 1], c) != 0) ok = false;
    if (!ok) throw Error(ErrorKind::Config, "cavity centroid is not inside its cavity");
    d.cavitySources.push_back(c);
  }
  return d;
}

double PanelSet::maxPanelArcLength() const {
  double m = 0.0;
  for (const auto& p : panels) m = std::max(m, p.arcLength);
  return m;
}

PanelSet buildPanels(const BoundaryCurve& curve, int nPanels) {
  if (nPanels < 1) throw Error(ErrorKind::Config, "nPanels must be positive");
  const auto& x = gaussNodes();
  const auto& gw = gaussWeights();
  PanelSet ps;
  ps.curves = {curve};
  ps.curveNodeBegin = {0, static_cast<std::size_t>(nPanels) * kNodesPerPanel};
  ps.curvePanelBegin = {0, static_cast<std::size_t>(nPanels)};
  const double len = 2.0 * kPi / nPanels;
  for (int p = 0; p < nPanels; ++p) {
    PanelInfo info;
    info.t0 = p * len;
    info.t1 = (p + 1) * len;
    info.firstNode = ps.z.size();
    info.midpoint = evalCurve(curve, 0.5 * (info.t0 + info.t1)).z;
    for (int k = 0; k < kNodesPerPanel; ++k) {
      const double t = info.t0 + 0.5 * len * (x[k] + 1.0);
      const auto cp = evalCurve(curve, t);
      ps.t.push_back(t);
      ps.w.push_back(0.5 * len * gw[k]);
      ps.z.push_back(cp.z);
      ps.dz.push_back(cp.dz);
      ps.ddz.push_back(cp.ddz);
      info.arcLength += ps.w.back() * std::abs(cp.dz);
    }
    ps.panels.push_back(info);
  }
  return ps;
}

PanelSet buildDomainPanels(const Domain& domain, const std::vector<int>& panelsPerCurve) {
  if (panelsPerCurve.size() != domain.numCurves())
    throw Error(ErrorKind::Config, "panelsPerCurve must list one count per curve");
  PanelSet all;
  all.curveNodeBegin = {0};
  all.curvePanelBegin = {0};
  for (std::size_t k = 0; k < domain.numCurves(); ++k) {
    PanelSet one = buildPanels(domain.curve(k), panelsPerCurve[k]);
    const std::size_t offset = all.z.size();
    for (auto info : one.panels) {
      info.curve = static_cast<int>(k);
      info.firstNode += offset;
      all.panels.push_back(info);
    }
    all.curves.push_back(domain.curve(k));
    auto append = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
    append(all.t, one.t);
    append(all.w, one.w);
    append(all.z, one.z);
    append(all.dz, one.dz);
    append(all.ddz, one.ddz);
    all.curveNodeBegin.push_back(all.z.size());
    all.curvePanelBegin.push_back(all.panels.size());
  }
  return all;
}

ArcLengthTable::ArcLengthTable(const BoundaryCurve& curve, int entries)
    : curve_(curve), cumulative_(entries + 1, 0.0), dt_(2.0 * kPi / entries) {
  for (int i = 0; i < entries; ++i)
    cumulative_[i + 1] = cumulative_[i] + segment(i * dt_, (i + 1) * dt_);
}

// Adaptive Gauss-Legendre: split until two levels agree.
double ArcLengthTable::segment(double a, double b) const {
  const auto& x = gaussNodes();
  const auto& w = gaussWeights();
  auto rule = [&](double lo, double hi) {
    double s = 0.0;
    for (int k = 0; k < kNodesPerPanel; ++k)
      s += w[k] * std::abs(evalCurve(curve_, lo + 0.5 * (hi - lo) * (x[k] + 1.0)).dz);
    return 0.5 * (hi - lo) * s;
  };
  const double whole = rule(a, b);
  const double mid = 0.5 * (a + b);
  const double halves = rule(a, mid) + rule(mid, b);
  if (std::abs(whole - halves) <= 1e-15 * std::abs(halves) || b - a < 1e-6) return halves;
  return segment(a, mid) + segment(mid, b);
}

double ArcLengthTable::lengthAt(double t) const {
  const int entries = static_cast<int>(cumulative_.size()) - 1;
  int i = std::clamp(static_cast<int>(std::floor(t / dt_)), 0, entries - 1);
  return cumulative_[i] + segment(i * dt_, t);
}

double ArcLengthTable::invert(double s) const {
  const int entries = static_cast<int>(cumulative_.size()) - 1;
  s = std::clamp(s, 0.0, total());
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const int i = std::clamp(static_cast<int>(it - cumulative_.begin()) - 1, 0, entries - 1);
  const double lo = i * dt_, hi = (i + 1) * dt_;
  double t = lo + dt_ * (s - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
  for (int iter = 0; iter < 4; ++iter) {
    const double f = cumulative_[i] + segment(lo, t) - s;
    t -= f / std::abs(evalCurve(curve_, t).dz);
    t = std::clamp(t, lo, hi);
  }
  return t;
}

double arcLength(const BoundaryCurve& curve) { return ArcLengthTable(curve).total(); }

std::vector<double> arcLengthParameters(const BoundaryCurve& curve, int nCenters) {
  if (nCenters < 1) throw Error(ErrorKind::Config, "nCenters must be positive");
  const ArcLengthTable table(curve);
  std::vector<double> ts(nCenters);
  for (int k = 0; k < nCenters; ++k) ts[k] = table.invert(table.total() * k / nCenters);
  return ts;
}

std::vector<Complex> arcLengthCenters(const BoundaryCurve& curve, int nCenters) {
  std::vector<Complex> out;
  for (double t : arcLengthParameters(curve, nCenters)) out.push_back(evalCurve(curve, t).z);
  return out;
}

namespace {

// Unit-density double layer from the panels of one curve (or all if curve < 0).
double indicatorSum(const PanelSet& ps, const NearQuadrature& nq, int curve, Complex z) {
  double sum = 0.0;
  const std::size_t p0 = curve < 0 ? 0 : ps.curvePanelBegin[curve];
  const std::size_t p1 = curve < 0 ? ps.numPanels() : ps.curvePanelBegin[curve + 1];
  for (std::size_t p = p0; p < p1; ++p) {
    if (nq.isNear(p, z) && accuracyIndicator(nq, p, z) > kSpecialQuadThreshold) {
      sum += specialQuadUnitPanel(nq, p, z);
      continue;
    }
    const std::size_t b = ps.panels[p].firstNode;
    double s = 0.0;
    for (std::size_t j = b; j < b + kNodesPerPanel; ++j) {
      const Complex W = ps.w[j] * ps.dz[j];
      const Complex d = ps.z[j] - z;
      s += (W.imag() * d.real() - W.real() * d.imag()) / std::norm(d);
    }
    sum += s / (2.0 * kPi);
  }
  return sum;
}

}  // namespace

double curveIndicator(const PanelSet& panels, const NearQuadrature& near, int curve, Complex z) {
  return indicatorSum(panels, near, curve, z);
}

MembershipMask classifyPoints(const PanelSet& ps, const NearQuadrature& nq,
                              const std::vector<Complex>& points, Exec exec, BoundaryPolicy policy) {
  constexpr double kAmbiguity = 1e-6;
  MembershipMask mask;
  const long n = static_cast<long>(points.size());
  mask.perPoint.assign(n, Membership::Outside);
  mask.rawIndicator.assign(n, 0.0);
  long bad = -1;
#pragma omp parallel for schedule(dynamic, 256) if (exec == Exec::Parallel)
  for (long i = 0; i < n; ++i) {
    double v;
    try {
      v = indicatorSum(ps, nq, -1, points[i]);
    } catch (const Error&) {
      v = 0.5;  // on a panel
    }
    mask.rawIndicator[i] = v;
    mask.perPoint[i] = v > 0.5 ? Membership::Inside : Membership::Outside;
    if (std::abs(v - 0.5) <= kAmbiguity) {
      mask.perPoint[i] = Membership::Outside;
      if (policy == BoundaryPolicy::Throw)
#pragma omp critical(pux_classify)
      if (bad < 0 || i < bad) bad = i;
    }
  }
  if (bad >= 0) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << points[bad] << " is numerically on the boundary";
    throw Error(ErrorKind::AmbiguousPoint, os.str(), bad);
  }
  return mask;
}

MembershipMask classifyPoints(const Domain&, const PanelSet& panels,
                              const std::vector<Complex>& points, Exec exec) {
  const NearQuadrature nq(panels);
  return classifyPoints(panels, nq, points, exec);
}

}  // namespace pux
