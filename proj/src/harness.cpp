#include "pux/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>

namespace pux {

double builtinRHS(int id, double x, double y) {
  switch (id) {
    case 1:
      return -std::sin(2 * kPi * x) * std::sin(2 * kPi * y);
    case 2:
      return -200.0 * std::sin(10.0 * (x + y)) + 2.0 / 9.0 + 1000.0 * (1000.0 * x * x - 1.0) * std::exp(-500.0 * x * x);
    case 3: {
      double s = 0.0;
      for (int i = 0; i <= 5; ++i) {
        const double p = std::ldexp(1.0, i);
        s += p * p * std::exp(-std::sqrt(p)) * (std::cos(p * x) + std::cos(p * y));
      }
      return -s;
    }
    default:
      throw Error(ErrorKind::UnknownId, "unknown right-hand side id " + std::to_string(id));
  }
}

double builtinExact(int id, double x, double y) {
  switch (id) {
    case 1:
      return std::sin(2 * kPi * x) * std::sin(2 * kPi * y) / (8 * kPi * kPi);
    case 2:
      return std::sin(10.0 * (x + y)) + x * x / 9.0 + std::exp(-500.0 * x * x);
    case 3: {
      double s = 0.0;
      for (int i = 0; i <= 5; ++i) {
        const double p = std::ldexp(1.0, i);
        s += std::exp(-std::sqrt(p)) * (std::cos(p * x) + std::cos(p * y));
      }
      return s;
    }
    default:
      throw Error(ErrorKind::UnknownId, "unknown solution id " + std::to_string(id));
  }
}

double Problem::f(double x, double y) const { return manufactured == 0 ? 0.0 : builtinRHS(manufactured, x, y); }

double Problem::exact(double x, double y) const {
  double u = manufactured == 0 ? 0.0 : builtinExact(manufactured, x, y);
  if (harmonicAlpha != 0.0) u += harmonicAlpha * std::log(std::abs(Complex(x, y) - harmonicPoint));
  return u;
}

SolveConfig exampleConfig(int id) {
  SolveConfig c;
  c.example = id;
  c.problem.manufactured = id;
  switch (id) {
    case 1:
      c.outer.c0 = 1.0;
      c.outer.offset = {17.0 / 701.0, 5.0 / 439.0};
      c.L = 1.5;
      c.Rp = 0.4;
      c.panelsPerCurve = {32};
      c.partitionsPerCurve = {21};
      break;
    case 2: {
      c.outer.c0 = 0.25;
      c.outer.sinCoeffs = {{3, 0.01}};
      c.outer.cosCoeffs = {{5, 0.02}, {6, 0.01}, {8, 0.01}, {10, 0.01}};
      BoundaryCurve inner;
      inner.c0 = 0.05;
      inner.cosCoeffs = {{2, 0.005}, {5, 0.005}, {7, 0.005}};
      inner.sinCoeffs = {{3, 0.005}};
      inner.n = -1;
      c.cavities = {inner};
      c.L = 0.4;
      c.Rp = 0.0675;
      c.panelsPerCurve = {64, 44};
      c.partitionsPerCurve = {38, 9};
      break;
    }
    case 3: {
      c.outer.c0 = 1.0;
      c.outer.cosCoeffs = {{-5, 0.2}};
      c.outer.sinCoeffs = {{-1, 0.2}};
      BoundaryCurve inner;
      inner.c0 = 1.0;
      inner.cosCoeffs = {{-6, 0.1}};
      inner.sinCoeffs = {{-3, 0.1}};
      inner.R = 0.3;
      inner.offset = {0.0, 0.17};
      inner.n = -1;
      c.cavities = {inner};
      c.L = 1.54;
      c.Rp = 0.12;
      c.panelsPerCurve = {84, 40};
      c.partitionsPerCurve = {82, 23};
      break;
    }
    default:
      throw Error(ErrorKind::UnknownId, "unknown example id " + std::to_string(id));
  }
  return c;
}

void SolveConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (schemaVersion != 1) fail("unsupported schemaVersion");
  if (!(L > 0)) fail("L must be positive");
  if (Nu < 2) fail("Nu must be at least 2");
  if (!(Rp > 0)) fail("Rp must be positive");
  if (Rp * Nu / (2 * L) < 2) fail("P = Rp Nu / 2L must be at least 2");
  if (!(epsilon > 0)) fail("epsilon must be positive");
  if (!(overlapFactor > 0)) fail("overlapFactor must be positive");
  if (M < 0 || M > 400) fail("M must be auto or in 1..400");
  if (kTilde < 0 || kTilde > 5) fail("kTilde must be auto or in 1..5");
  if (panelsPerCurve.size() != 1 + cavities.size()) fail("panelsPerCurve needs one entry per curve");
  if (!partitionsPerCurve.empty() && partitionsPerCurve.size() != 1 + cavities.size())
    fail("partitionsPerCurve needs one entry per curve");
  if (betaTarget < 0) fail("betaTarget must be non-negative");
  if (oversampling < 3) fail("oversampling must be at least 3");
  if (Neval < 2) fail("Neval must be at least 2");
  if (outer.n != 1) fail("outer curve must have n = 1");
  for (const auto& c : cavities)
    if (c.n != -1) fail("cavity curves must have n = -1");
}

std::size_t EvaluationGrid::insideCount() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// The weight function is swapped in after lookup, so it is not part of the key.
std::string stencilKey(double h, double Rp, int M, const GaussianBasis& b, StabilizedPath path) {
  std::ostringstream os;
  os << std::hexfloat << h << ':' << Rp << ':' << b.epsilon << ':' << M << ':' << static_cast<int>(path);
  return os.str();
}

std::mutex& cacheMutex() {
  static std::mutex m;
  return m;
}

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    if (e.stage().empty()) e.setStage(stage);
    throw;
  }
}

}  // namespace

EvaluationGrid makeEvaluationGrid(const SolveConfig& cfg) {
  return staged("classification", [&] {
    const Domain domain = makeDomain(cfg.outer, cfg.cavities);
    const PanelSet panels = buildDomainPanels(domain, cfg.panelsPerCurve);
    const NearQuadrature nq(panels);
    EvaluationGrid eg;
    const double he = 2.0 * cfg.L / cfg.Neval;
    for (int a = 0; a < cfg.Neval; ++a) eg.xs.push_back(-cfg.L + a * he);
    eg.points.reserve(static_cast<std::size_t>(cfg.Neval) * cfg.Neval);
    for (int b = 0; b < cfg.Neval; ++b)
      for (int a = 0; a < cfg.Neval; ++a) eg.points.emplace_back(eg.xs[a], eg.xs[b]);
    const auto mask = classifyPoints(panels, nq, eg.points, cfg.exec, BoundaryPolicy::Outside);
    eg.inside.resize(eg.points.size());
    for (std::size_t i = 0; i < eg.points.size(); ++i) eg.inside[i] = mask.inside(i) ? 1 : 0;
    return eg;
  });
}

Metrics errorMetrics(const std::vector<double>& numerical, const std::vector<double>& exact,
                     const std::vector<std::uint8_t>& mask) {
  if (numerical.size() != exact.size() || mask.size() != exact.size())
    throw Error(ErrorKind::Config, "metric inputs differ in size");
  double diff2 = 0.0, ref2 = 0.0, diffMax = 0.0, refMax = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (!mask[i]) continue;
    const double d = numerical[i] - exact[i];
    diff2 += d * d;
    ref2 += exact[i] * exact[i];
    diffMax = std::max(diffMax, std::abs(d));
    refMax = std::max(refMax, std::abs(exact[i]));
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::EmptyMask, "no evaluation points selected");
  Metrics m;
  m.relL2 = ref2 > 0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2 / count);
  m.maxRel = refMax > 0 ? diffMax / refMax : diffMax;
  return m;
}

namespace {

// Geometry through extension, shared by extendRhs and solvePoisson.
struct Prepared {
  Domain domain;
  PanelSet panels;
  UniformGrid grid;
  ExtendedField fe;
};

void prepare(const SolveConfig& cfg, StencilCache* cache, Prepared& out, ErrorReport& rep, double& maxResidual) {
  out.domain = staged("geometry", [&] { return makeDomain(cfg.outer, cfg.cavities); });
  out.panels = staged("geometry", [&] { return buildDomainPanels(out.domain, cfg.panelsPerCurve); });
  const NearQuadrature nq(out.panels);
  out.grid = UniformGrid(cfg.L, cfg.Nu);
  const double h = out.grid.h();

  const MembershipMask gridMask = staged("classification", [&] {
    return classifyPoints(out.panels, nq, out.grid.nodes(), cfg.exec, BoundaryPolicy::Outside);
  });

  rep.Nu = cfg.Nu;
  rep.P = cfg.Rp / h;
  rep.kTilde = cfg.kTilde > 0 ? cfg.kTilde : heuristicKTilde(rep.P);
  rep.M = cfg.M > 0 ? cfg.M : heuristicM(rep.P);
  const WuFunction wu = makeWu(rep.kTilde);
  const GaussianBasis basis{cfg.epsilon};

  const std::vector<int> counts = cfg.partitionsPerCurve.empty()
                                      ? partitionCounts(out.domain, cfg.Rp, cfg.overlapFactor)
                                      : cfg.partitionsPerCurve;
  const Covering cov = staged("covering", [&] {
    return buildCovering(out.domain, out.panels, out.grid, cfg.Rp, counts, gridMask, rep.M);
  });

  auto t0 = Clock::now();
  std::shared_ptr<const StencilTemplate> tpl = staged("stencil", [&] {
    StencilOptions opt;
    opt.stabilizer = cfg.stabilizer;
    const std::string key = stencilKey(h, cfg.Rp, rep.M, basis, cfg.stabilizer);
    if (cache) {
      std::lock_guard<std::mutex> lock(cacheMutex());
      auto it = cache->find(key);
      if (it != cache->end()) {
        if (it->second->wu.kTilde == wu.kTilde) return it->second;
        return std::make_shared<const StencilTemplate>(withWeightFunction(*it->second, wu));
      }
    }
    auto t = std::make_shared<const StencilTemplate>(buildStencil(h, cfg.Rp, rep.M, basis, wu, opt));
    if (cache) {
      std::lock_guard<std::mutex> lock(cacheMutex());
      (*cache)[key] = t;
    }
    return t;
  });
  rep.times.buildA = since(t0);
  rep.stencilPath = tpl->path;

  t0 = Clock::now();
  ExtensionOptions eopt;
  eopt.betaTarget = cfg.betaTarget;
  eopt.exec = cfg.exec;
  out.fe = staged("extension", [&] {
    return buildExtension([&](double x, double y) { return cfg.problem.f(x, y); }, out.grid, gridMask, cov, *tpl,
                          eopt);
  });
  rep.times.localExtensions = out.fe.secondsLocal;
  rep.times.evaluateFe = since(t0) - out.fe.secondsLocal;
  rep.betaMin = out.fe.betaMinUsed;
  maxResidual = 0.0;
  for (const auto& p : out.fe.partitions) maxResidual = std::max(maxResidual, p.residual);
}

}  // namespace

ExtensionRun extendRhs(const SolveConfig& cfg, StencilCache* cache) {
  cfg.validate();
  Prepared prep;
  ExtensionRun run;
  double residual = 0.0;
  prepare(cfg, cache, prep, run.report, residual);
  run.grid = prep.grid;
  run.field = std::move(prep.fe);
  return run;
}

SolveResult solvePoisson(const SolveConfig& cfg, const EvaluationGrid* evalGrid, StencilCache* cache) {
  cfg.validate();
  SolveResult res;
  ErrorReport& rep = res.report;
  Prepared prep;
  prepare(cfg, cache, prep, rep, res.maxPartitionResidual);
  const Domain& domain = prep.domain;
  const PanelSet& panels = prep.panels;
  const NearQuadrature nq(panels);
  const UniformGrid& grid = prep.grid;
  const ExtendedField& fe = prep.fe;

  auto t0 = Clock::now();
  const SpectralKernel kernel = buildKernel(grid, cfg.oversampling, cfg.exec);
  ParticularSolution up = staged("free-space", [&] { return solveFreeSpace(fe.values, kernel); });
  if (cfg.factor2) up.uP = solveFreeSpaceFactor2(fe.values, kernel);
  rep.times.solveUP = since(t0);

  t0 = Clock::now();
  const std::vector<double> upBoundary = staged("boundary", [&] { return evalAtPoints(up, panels.z, 1e-14, cfg.exec); });
  res.boundaryData.resize(panels.numNodes());
  res.modifiedData.resize(panels.numNodes());
  for (std::size_t i = 0; i < panels.numNodes(); ++i) {
    res.boundaryData[i] = cfg.problem.exact(panels.z[i].real(), panels.z[i].imag());
    res.modifiedData[i] = res.boundaryData[i] - upBoundary[i];
  }
  rep.times.boundary = since(t0);

  t0 = Clock::now();
  const BieSystem sys = makeBieSystem(panels, domain, cfg.gmres);
  res.density = staged("density", [&] { return solveDensity(sys, res.modifiedData, cfg.exec); });
  rep.gmresIterations = res.density.iterations;
  rep.times.density = since(t0);

  t0 = Clock::now();
  if (evalGrid) {
    res.eval = *evalGrid;
  } else {
    res.eval = makeEvaluationGrid(cfg);
  }
  const EvaluationGrid& eg = res.eval;
  staged("evaluation", [&] {
    std::vector<Complex> pts;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < eg.points.size(); ++i)
      if (eg.inside[i]) {
        pts.push_back(eg.points[i]);
        where.push_back(i);
      }
    const std::vector<double> uh = evalField(res.density, sys, nq, pts, cfg.exec);
    const std::vector<double> upGrid = evalOnTensorGrid(up, eg.xs, eg.xs, 1e-14);
    res.u.assign(eg.points.size(), 0.0);
    for (std::size_t k = 0; k < pts.size(); ++k) res.u[where[k]] = uh[k] + upGrid[where[k]];
    return 0;
  });
  rep.times.evaluate = since(t0);

  if (cfg.problem.manufactured != 0 || cfg.problem.harmonicAlpha != 0.0) {
    std::vector<double> exact(eg.points.size(), 0.0);
    for (std::size_t i = 0; i < eg.points.size(); ++i)
      if (eg.inside[i]) exact[i] = cfg.problem.exact(eg.points[i].real(), eg.points[i].imag());
    const Metrics m = errorMetrics(res.u, exact, eg.inside);
    rep.hasReference = true;
    rep.relativeL2 = m.relL2;
    rep.maxRelative = m.maxRel;
  }
  return res;
}

double fittedOrder(const std::vector<int>& Nu, const std::vector<double>& err) {
  const std::size_t n = Nu.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(double(Nu[i])), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<StudyRow> convergenceStudy(const SolveConfig& base, const std::vector<int>& NuList, Reference reference,
                                       StencilCache* cache) {
  std::vector<StudyRow> rows;
  const EvaluationGrid eg = makeEvaluationGrid(base);
  std::vector<std::vector<double>> solutions;
  for (int Nu : NuList) {
    SolveConfig cfg = base;
    cfg.Nu = Nu;
    SolveResult r = solvePoisson(cfg, &eg, cache);
    rows.push_back({r.report, 0.0});
    solutions.push_back(std::move(r.u));
  }
  if (reference == Reference::Self) {
    const auto& finest = solutions.back();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Metrics m = errorMetrics(solutions[i], finest, eg.inside);
      rows[i].report.hasReference = true;
      rows[i].report.relativeL2 = m.relL2;
      rows[i].report.maxRelative = m.maxRel;
    }
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double e0 = rows[i - 1].report.relativeL2, e1 = rows[i].report.relativeL2;
    if (e0 > 0 && e1 > 0)
      rows[i].localOrder = std::log(e1 / e0) / std::log(double(rows[i].report.Nu) / rows[i - 1].report.Nu);
  }
  return rows;
}

std::string studyCsv(const std::vector<StudyRow>& rows, Reference reference) {
  std::ostringstream os;
  os << "# reference," << (reference == Reference::Self ? "self (finest grid)" : "manufactured") << "\n";
  os << "N_u,P,kTilde,M,betaMin,relL2,maxRel,localOrder\n";
  os << std::setprecision(6);
  for (const auto& r : rows) {
    const auto& e = r.report;
    os << e.Nu << ',' << e.P << ',' << e.kTilde << ',' << e.M << ',' << e.betaMin << ',' << std::scientific
       << e.relativeL2 << ',' << e.maxRelative << ',' << std::defaultfloat << r.localOrder << "\n";
  }
  return os.str();
}

}  // namespace pux
