#include "pux/pux.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "pux/parallel.hpp"
#include "pux/special_quad.hpp"

namespace pux {

std::vector<Complex> UniformGrid::nodes() const {
  std::vector<Complex> out(size());
  for (int j = 0; j < Nu; ++j)
    for (int i = 0; i < Nu; ++i) out[index(i, j)] = node(i, j);
  return out;
}

int heuristicKTilde(double P) {
  const int k = static_cast<int>(std::floor(std::sqrt(P) - 0.9));
  return std::clamp(k, 1, 5);
}

int heuristicM(double P) {
  const double m = std::min(0.8 * kPi * P * P / 4.0, 4.0 * P);
  return std::clamp(static_cast<int>(std::lround(m)), 1, 400);
}

Complex Covering::center(std::size_t p) const {
  return p < extension.size() ? extension[p].center : zero[p - extension.size()].center;
}

double Covering::radius(std::size_t p) const {
  return p < extension.size() ? extension[p].radius : zero[p - extension.size()].radius;
}

std::vector<int> partitionCounts(const Domain& domain, double Rp, double overlapFactor) {
  std::vector<int> counts;
  for (std::size_t k = 0; k < domain.numCurves(); ++k)
    counts.push_back(static_cast<int>(std::ceil(arcLength(domain.curve(k)) / (overlapFactor * Rp))));
  return counts;
}

namespace {

// Visits grid nodes with |node - c| < r.
template <class F>
void forNodesWithin(const UniformGrid& grid, Complex c, double r, F&& f) {
  const double h = grid.h();
  const int i0 = std::max(0, static_cast<int>(std::floor((c.real() - r + grid.L) / h)));
  const int i1 = std::min(grid.Nu - 1, static_cast<int>(std::ceil((c.real() + r + grid.L) / h)));
  const int j0 = std::max(0, static_cast<int>(std::floor((c.imag() - r + grid.L) / h)));
  const int j1 = std::min(grid.Nu - 1, static_cast<int>(std::ceil((c.imag() + r + grid.L) / h)));
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const double d = std::abs(grid.node(i, j) - c);
      if (d < r) f(i, j, d);
    }
}

}  // namespace

Covering buildCovering(const Domain& domain, const PanelSet& panels, const UniformGrid& grid, double Rp,
                       const std::vector<int>& nPerCurve, const MembershipMask& gridMask, int M) {
  const double h = grid.h();
  if (!(Rp > 2.0 * h)) throw Error(ErrorKind::Config, "partition radius must exceed two grid cells");
  if (nPerCurve.size() != domain.numCurves()) throw Error(ErrorKind::Config, "one partition count per curve required");
  if (gridMask.size() != grid.size()) throw Error(ErrorKind::Config, "grid mask size mismatch");
  Covering cov;
  cov.Rp = Rp;
  cov.P = Rp / h;
  const auto offsets = gridOffsetsWithin(h, Rp);
  auto inside = [&](int i, int j) { return gridMask.inside(grid.index(i, j)); };

  for (std::size_t k = 0; k < domain.numCurves(); ++k) {
    for (const Complex c : arcLengthCenters(domain.curve(k), nPerCurve[k])) {
      double best = INFINITY;
      int bi = -1, bj = -1;
      forNodesWithin(grid, c, Rp, [&](int i, int j, double d) {
        if (inside(i, j) && d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      });
      if (bi < 0) {
        std::ostringstream os;
        os << "no inside grid node within " << Rp << " of partition center " << c;
        throw Error(ErrorKind::SnapFailure, os.str(), static_cast<long>(cov.extension.size()));
      }
      ExtensionPartition p;
      p.ci = bi;
      p.cj = bj;
      p.center = grid.node(bi, bj);
      p.radius = Rp;
      p.curve = static_cast<int>(k);
      if (std::abs(p.center.real()) + Rp >= grid.L || std::abs(p.center.imag()) + Rp >= grid.L)
        throw Error(ErrorKind::Config, "extension partition does not fit inside the box",
                    static_cast<long>(cov.extension.size()));
      for (const auto& o : offsets)
        if (inside(bi + o[0], bj + o[1])) ++p.insideCount;
      p.beta = static_cast<double>(p.insideCount) / M;
      cov.extension.push_back(p);
    }
  }

  auto inExtension = [&](Complex z) {
    for (const auto& p : cov.extension)
      if (std::abs(z - p.center) < p.radius) return true;
    return false;
  };

  const NearQuadrature nq(panels);
  for (std::size_t k = 0; k < domain.numCurves(); ++k) {
    const auto& curve = domain.curve(k);
    if (k > 0) {
      // Zero partitions in a cavity only when extension partitions leave part of it bare.
      double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
      for (std::size_t n = panels.curveNodeBegin[k]; n < panels.curveNodeBegin[k + 1]; ++n) {
        xmin = std::min(xmin, panels.z[n].real());
        xmax = std::max(xmax, panels.z[n].real());
        ymin = std::min(ymin, panels.z[n].imag());
        ymax = std::max(ymax, panels.z[n].imag());
      }
      bool bare = false;
      for (int j = 0; j < grid.Nu && !bare; ++j)
        for (int i = 0; i < grid.Nu && !bare; ++i) {
          const Complex z = grid.node(i, j);
          if (inside(i, j) || z.real() < xmin || z.real() > xmax || z.imag() < ymin || z.imag() > ymax) continue;
          double ind = 0.0;
          try {
            ind = curveIndicator(panels, nq, static_cast<int>(k), z);
          } catch (const Error&) {
            continue;  // on the cavity boundary
          }
          if (ind < -0.5 && !inExtension(z)) bare = true;
        }
      if (!bare) continue;
    }
    for (double t : arcLengthParameters(curve, 2 * nPerCurve[k])) {
      const auto cp = evalCurve(curve, t);
      const Complex normal = Complex(0.0, -1.0) * cp.dz / std::abs(cp.dz);
      ZeroPartition zp;
      zp.center = cp.z + Rp * normal;
      zp.curve = static_cast<int>(k);
      zp.radius = Rp;
      forNodesWithin(grid, zp.center, Rp, [&](int i, int j, double d) {
        if (inside(i, j)) zp.radius = std::min(zp.radius, d);
      });
      cov.zero.push_back(zp);
    }
  }

  for (int j = 0; j < grid.Nu; ++j)
    for (int i = 0; i < grid.Nu; ++i) {
      if (inside(i, j)) continue;
      const bool adjacent = (i > 0 && inside(i - 1, j)) || (i + 1 < grid.Nu && inside(i + 1, j)) ||
                            (j > 0 && inside(i, j - 1)) || (j + 1 < grid.Nu && inside(i, j + 1));
      if (adjacent && !inExtension(grid.node(i, j))) {
        std::ostringstream os;
        os << "grid node " << grid.node(i, j) << " next to the domain is not in any extension partition";
        throw Error(ErrorKind::CoverageGap, os.str());
      }
    }

  cov.betaMin = INFINITY;
  for (const auto& p : cov.extension) cov.betaMin = std::min(cov.betaMin, p.beta);
  return cov;
}

std::vector<Weight> shepardWeights(const Covering& covering, const WuFunction& wu, Complex node) {
  std::vector<Weight> out;
  double total = 0.0;
  for (std::size_t p = 0; p < covering.size(); ++p) {
    const double r = covering.radius(p);
    const double d = std::abs(node - covering.center(p));
    if (!(d < r)) continue;
    const double psi = wuEval(wu, d / r);
    if (psi > 0.0) {
      out.push_back({p, psi});
      total += psi;
    }
  }
  if (out.empty()) throw Error(ErrorKind::NotCovered, "grid node is not covered by any partition");
  for (auto& w : out) w.weight /= total;
  return out;
}

int downsampleStride(int insideCount, int M, double betaTarget) {
  if (!(betaTarget > 0.0)) return 1;
  return std::max(1, static_cast<int>(std::floor(insideCount / (betaTarget * M))));
}

namespace {

struct LocalSolve {
  std::vector<std::size_t> outsideNodes;  // grid indices
  std::vector<int> outsideRows;           // template rows
  std::vector<double> values;
  PartitionReport report;
};

void checkCompatible(const UniformGrid& grid, const MembershipMask& mask, const Covering& cov,
                     const StencilTemplate& tpl) {
  if (mask.size() != grid.size()) throw Error(ErrorKind::Config, "grid mask size mismatch");
  if (tpl.Rp != cov.Rp) throw Error(ErrorKind::Config, "stencil radius differs from covering radius");
  if (std::abs(tpl.h - grid.h()) > 1e-15 * grid.h()) throw Error(ErrorKind::Config, "stencil spacing differs from grid");
}

std::vector<LocalSolve> localSolves(const std::vector<double>& samples, const UniformGrid& grid,
                                    const MembershipMask& mask, const Covering& cov, const StencilTemplate& tpl,
                                    const ExtensionOptions& opt) {
  const long np = static_cast<long>(cov.extension.size());
  std::vector<LocalSolve> solves(np);
  parallelFor(np, opt.exec, [&](long p) {
    const auto& part = cov.extension[p];
    std::vector<int> insideRows, outsideRows;
    std::vector<double> insideValues;
    std::vector<std::size_t> outsideNodes;
    for (std::size_t r = 0; r < tpl.rows(); ++r) {
      const std::size_t idx = grid.index(part.ci + tpl.gridOffsets[r][0], part.cj + tpl.gridOffsets[r][1]);
      if (mask.inside(idx)) {
        insideRows.push_back(static_cast<int>(r));
        insideValues.push_back(samples[idx]);
      } else {
        outsideRows.push_back(static_cast<int>(r));
        outsideNodes.push_back(idx);
      }
    }
    const int stride = downsampleStride(static_cast<int>(insideRows.size()), tpl.M, opt.betaTarget);
    if (stride > 1) {
      std::size_t keep = 0;
      for (std::size_t r = 0; r < insideRows.size(); r += stride, ++keep) {
        insideRows[keep] = insideRows[r];
        insideValues[keep] = insideValues[r];
      }
      insideRows.resize(keep);
      insideValues.resize(keep);
    }
    LocalExtension ext;
    try {
      ext = localLeastSquaresExtend(tpl, insideRows, outsideRows, insideValues);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("partition ") + std::to_string(p) + ": " + e.what(), p);
    }
    LocalSolve& s = solves[p];
    s.outsideNodes = std::move(outsideNodes);
    s.outsideRows = std::move(outsideRows);
    s.values = std::move(ext.outsideValues);
    s.report.residual = ext.residual;
    s.report.rowsUsed = static_cast<int>(insideRows.size());
    for (double v : s.values) s.report.maxAbsExtension = std::max(s.report.maxAbsExtension, std::abs(v));
  });
  return solves;
}

ExtendedField initField(const std::vector<double>& samples, const UniformGrid& grid, const MembershipMask& mask,
                        const std::vector<LocalSolve>& solves, int M) {
  ExtendedField fe;
  fe.grid = grid;
  fe.values.assign(grid.size(), 0.0);
  fe.provenance.assign(grid.size(), Provenance::Zero);
  for (std::size_t n = 0; n < grid.size(); ++n)
    if (mask.inside(n)) {
      fe.values[n] = samples[n];
      fe.provenance[n] = Provenance::OriginalInsideOmega;
    }
  fe.betaMinUsed = INFINITY;
  for (const auto& s : solves) {
    fe.partitions.push_back(s.report);
    fe.betaMinUsed = std::min(fe.betaMinUsed, static_cast<double>(s.report.rowsUsed) / M);
  }
  return fe;
}

}  // namespace

ExtendedField buildExtension(const std::vector<double>& samples, const UniformGrid& grid,
                             const MembershipMask& mask, const Covering& cov, const StencilTemplate& tpl,
                             const ExtensionOptions& opt) {
  checkCompatible(grid, mask, cov, tpl);
  if (samples.size() != grid.size()) throw Error(ErrorKind::Config, "sample grid size mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  const auto solves = localSolves(samples, grid, mask, cov, tpl, opt);
  const auto t1 = std::chrono::steady_clock::now();
  ExtendedField fe = initField(samples, grid, mask, solves, tpl.M);

  // Scatter in partition order so the result does not depend on thread count.
  std::vector<double> num(grid.size(), 0.0), den(grid.size(), 0.0);
  for (const auto& s : solves)
    for (std::size_t r = 0; r < s.outsideRows.size(); ++r) {
      const double psi = tpl.weightSamples[s.outsideRows[r]];
      if (psi <= 0.0) continue;
      num[s.outsideNodes[r]] += psi * s.values[r];
      den[s.outsideNodes[r]] += psi;
    }
  for (const auto& zp : cov.zero)
    forNodesWithin(grid, zp.center, zp.radius, [&](int i, int j, double d) {
      const std::size_t idx = grid.index(i, j);
      if (den[idx] > 0.0) den[idx] += wuEval(tpl.wu, d / zp.radius);
    });
  for (std::size_t n = 0; n < grid.size(); ++n)
    if (!mask.inside(n) && den[n] > 0.0) {
      fe.values[n] = num[n] / den[n];
      fe.provenance[n] = Provenance::Extended;
    }
  fe.secondsLocal = std::chrono::duration<double>(t1 - t0).count();
  fe.secondsBlend = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  return fe;
}

ExtendedField buildExtension(const std::function<double(double, double)>& f, const UniformGrid& grid,
                             const MembershipMask& mask, const Covering& cov, const StencilTemplate& tpl,
                             const ExtensionOptions& opt) {
  std::vector<double> samples(grid.size(), 0.0);
  for (int j = 0; j < grid.Nu; ++j)
    for (int i = 0; i < grid.Nu; ++i)
      if (mask.inside(grid.index(i, j))) samples[grid.index(i, j)] = f(grid.coord(i), grid.coord(j));
  return buildExtension(samples, grid, mask, cov, tpl, opt);
}

namespace reference {

ExtendedField buildExtension(const std::vector<double>& samples, const UniformGrid& grid,
                             const MembershipMask& mask, const Covering& cov, const StencilTemplate& tpl,
                             const ExtensionOptions& options) {
  checkCompatible(grid, mask, cov, tpl);
  ExtensionOptions opt = options;
  opt.exec = Exec::Serial;
  const auto solves = localSolves(samples, grid, mask, cov, tpl, opt);
  ExtendedField fe = initField(samples, grid, mask, solves, tpl.M);
  std::vector<std::map<std::size_t, double>> local(solves.size());
  for (std::size_t p = 0; p < solves.size(); ++p)
    for (std::size_t r = 0; r < solves[p].outsideNodes.size(); ++r)
      local[p][solves[p].outsideNodes[r]] = solves[p].values[r];
  for (int j = 0; j < grid.Nu; ++j)
    for (int i = 0; i < grid.Nu; ++i) {
      const std::size_t idx = grid.index(i, j);
      if (mask.inside(idx)) continue;
      const Complex z = grid.node(i, j);
      bool covered = false;
      for (const auto& p : cov.extension)
        if (std::abs(z - p.center) < p.radius) covered = true;
      if (!covered) continue;
      double v = 0.0;
      for (const auto& w : shepardWeights(cov, tpl.wu, z))
        if (w.partition < cov.extension.size()) v += w.weight * local[w.partition].at(idx);
      fe.values[idx] = v;
      fe.provenance[idx] = Provenance::Extended;
    }
  return fe;
}

}  // namespace reference

}  // namespace pux
