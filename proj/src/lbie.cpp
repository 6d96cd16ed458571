#include "pux/lbie.hpp"

#include "pux/parallel.hpp"

#include <cmath>
#include <sstream>

namespace pux {

BieSystem makeBieSystem(const PanelSet& panels, const Domain& domain, GmresSettings gmres) {
  BieSystem sys;
  sys.panels = &panels;
  sys.sources = domain.cavitySources;
  sys.gmres = gmres;
  if (panels.numCurves() != 1 + sys.sources.size())
    throw Error(ErrorKind::Config, "panel set and domain disagree on the number of curves");
  return sys;
}

std::vector<double> applyOperator(const BieSystem& sys, const std::vector<double>& x, Exec exec) {
  const PanelSet& ps = *sys.panels;
  const long n = static_cast<long>(ps.numNodes());
  const std::size_t kappa = sys.sources.size();
  std::vector<double> wr(n), wi(n), zr(n), zi(n), xw(n);
  for (long j = 0; j < n; ++j) {
    const Complex W = ps.w[j] * ps.dz[j] / (2.0 * kPi);
    wr[j] = W.real();
    wi[j] = W.imag();
    zr[j] = ps.z[j].real();
    zi[j] = ps.z[j].imag();
  }
  std::vector<double> y(sys.dimension(), 0.0);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (long i = 0; i < n; ++i) {
    double s = 0.0;
    const double xi = zr[i], yi = zi[i];
    for (long j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dr = zr[j] - xi, di = zi[j] - yi;
      s += x[j] * (wi[j] * dr - wr[j] * di) / (dr * dr + di * di);
    }
    const double curv = ps.w[i] * (ps.ddz[i] / (2.0 * ps.dz[i])).imag() / (2.0 * kPi);
    s += x[i] * (0.5 + curv);
    for (std::size_t k = 0; k < kappa; ++k) s += x[n + k] * std::log(std::abs(ps.z[i] - sys.sources[k]));
    y[i] = s;
  }
  for (std::size_t k = 0; k < kappa; ++k) {
    double s = 0.0;
    for (std::size_t j = ps.curveNodeBegin[k + 1]; j < ps.curveNodeBegin[k + 2]; ++j)
      s += x[j] * ps.w[j] * std::abs(ps.dz[j]);
    y[n + k] = s;
  }
  return y;
}

namespace reference {

std::vector<double> applyOperator(const BieSystem& sys, const std::vector<double>& x) {
  const PanelSet& ps = *sys.panels;
  const std::size_t n = ps.numNodes();
  const std::size_t kappa = sys.sources.size();
  std::vector<double> y(n + kappa, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.5 * x[i] + x[i] * ps.w[i] * (ps.ddz[i] / (2.0 * ps.dz[i])).imag() / (2.0 * kPi);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += x[j] * ps.w[j] * (ps.dz[j] / (ps.z[j] - ps.z[i])).imag() / (2.0 * kPi);
    for (std::size_t k = 0; k < kappa; ++k) s += x[n + k] * std::log(std::abs(ps.z[i] - sys.sources[k]));
    y[i] = s;
  }
  for (std::size_t k = 0; k < kappa; ++k)
    for (std::size_t j = ps.curveNodeBegin[k + 1]; j < ps.curveNodeBegin[k + 2]; ++j)
      y[n + k] += x[j] * ps.w[j] * std::abs(ps.dz[j]);
  return y;
}

}  // namespace reference

LayerDensity solveDensity(const BieSystem& sys, const std::vector<double>& boundaryData, Exec exec) {
  const std::size_t n = sys.panels->numNodes();
  if (boundaryData.size() != n) throw Error(ErrorKind::Config, "boundary data size mismatch");
  std::vector<double> rhs(boundaryData);
  rhs.resize(sys.dimension(), 0.0);
  auto res = gmres([&](const std::vector<double>& v) { return applyOperator(sys, v, exec); }, rhs, sys.gmres);
  if (!res.converged) {
    std::ostringstream os;
    os << "GMRES stopped after " << res.iterations << " iterations at relative residual " << res.relResidual;
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  LayerDensity d;
  d.mu.assign(res.x.begin(), res.x.begin() + n);
  d.logStrengths.assign(res.x.begin() + n, res.x.end());
  d.iterations = res.iterations;
  d.residual = res.relResidual;
  return d;
}

namespace {

double fieldAt(const LayerDensity& d, const BieSystem& sys, const NearQuadrature* nq, Complex z) {
  const PanelSet& ps = *sys.panels;
  double u = 0.0;
  for (std::size_t p = 0; p < ps.numPanels(); ++p) {
    const std::size_t b = ps.panels[p].firstNode;
    const double* mu = d.mu.data() + b;
    if (nq && nq->isNear(p, z) && accuracyIndicator(*nq, p, z) > kSpecialQuadThreshold) {
      u += specialQuadPanel(*nq, p, mu, z);
      continue;
    }
    double s = 0.0;
    for (int j = 0; j < kNodesPerPanel; ++j) {
      const std::size_t k = b + j;
      const Complex W = ps.w[k] * ps.dz[k];
      const Complex dd = ps.z[k] - z;
      s += mu[j] * (W.imag() * dd.real() - W.real() * dd.imag()) / std::norm(dd);
    }
    u += s / (2.0 * kPi);
  }
  for (std::size_t k = 0; k < sys.sources.size(); ++k)
    u += d.logStrengths[k] * std::log(std::abs(z - sys.sources[k]));
  return u;
}

std::vector<double> evalImpl(const LayerDensity& d, const BieSystem& sys, const NearQuadrature* nq,
                             const std::vector<Complex>& points, Exec exec) {
  const long n = static_cast<long>(points.size());
  std::vector<double> out(n);
  parallelFor(n, exec, [&](long i) { out[i] = fieldAt(d, sys, nq, points[i]); }, 64);
  return out;
}

}  // namespace

std::vector<double> evalField(const LayerDensity& density, const BieSystem& sys, const NearQuadrature& near,
                              const std::vector<Complex>& points, Exec exec) {
  return evalImpl(density, sys, &near, points, exec);
}

std::vector<double> evalFieldRegular(const LayerDensity& density, const BieSystem& sys,
                                     const std::vector<Complex>& points, Exec exec) {
  return evalImpl(density, sys, nullptr, points, exec);
}

}  // namespace pux
