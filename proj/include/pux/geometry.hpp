#pragma once

#include <array>
#include <map>
#include <vector>

#include "pux/common.hpp"

namespace pux {

// tau(t) = R e^{i n t} (c0 + sum_j c_j cos(jt) + d_j sin(jt)) + offset
struct BoundaryCurve {
  double c0 = 1.0;
  std::map<int, double> cosCoeffs;
  std::map<int, double> sinCoeffs;
  double R = 1.0;
  int n = 1;  // +1 outer boundary, -1 cavity
  Complex offset{0.0, 0.0};
};

struct CurvePoint {
  Complex z;
  Complex dz;
  Complex ddz;
};

CurvePoint evalCurve(const BoundaryCurve& curve, double t);

struct Domain {
  BoundaryCurve outer;
  std::vector<BoundaryCurve> cavities;
  std::vector<Complex> cavitySources;  // one z_k per cavity

  std::size_t numCurves() const { return 1 + cavities.size(); }
  const BoundaryCurve& curve(std::size_t k) const { return k == 0 ? outer : cavities[k - 1]; }
};

// Builds a domain, placing each cavity source at the centroid of the sampled
// cavity boundary. Throws Config if the curves are irregular or intersect, or
// if a centroid falls outside its cavity.
Domain makeDomain(BoundaryCurve outer, std::vector<BoundaryCurve> cavities);

inline constexpr int kNodesPerPanel = 16;

struct PanelInfo {
  int curve = 0;
  double t0 = 0.0;
  double t1 = 0.0;
  double arcLength = 0.0;
  Complex midpoint;  // tau at the parameter midpoint
  std::size_t firstNode = 0;
};

// Gauss-Legendre panel discretization of one or more curves. Node data is stored
// flat; panel p owns nodes [16p, 16p + 16).
struct PanelSet {
  std::vector<BoundaryCurve> curves;
  std::vector<PanelInfo> panels;
  std::vector<double> t;
  std::vector<double> w;  // parameter weights
  std::vector<Complex> z;
  std::vector<Complex> dz;
  std::vector<Complex> ddz;
  std::vector<std::size_t> curveNodeBegin;   // size numCurves + 1
  std::vector<std::size_t> curvePanelBegin;  // size numCurves + 1

  std::size_t numNodes() const { return z.size(); }
  std::size_t numPanels() const { return panels.size(); }
  std::size_t numCurves() const { return curves.size(); }
  double maxPanelArcLength() const;
};

// 16-point Gauss-Legendre rule on [-1, 1], ascending.
const std::array<double, kNodesPerPanel>& gaussNodes();
const std::array<double, kNodesPerPanel>& gaussWeights();

PanelSet buildPanels(const BoundaryCurve& curve, int nPanels);
PanelSet buildDomainPanels(const Domain& domain, const std::vector<int>& panelsPerCurve);

// Cumulative arc length table with inversion.
class ArcLengthTable {
 public:
  explicit ArcLengthTable(const BoundaryCurve& curve, int entries = 4096);
  double total() const { return cumulative_.back(); }
  double lengthAt(double t) const;
  // Parameter t in [0, 2pi) with arc length s measured from t = 0.
  double invert(double s) const;

 private:
  BoundaryCurve curve_;
  std::vector<double> cumulative_;
  double dt_;
  double segment(double a, double b) const;
};

double arcLength(const BoundaryCurve& curve);

// nCenters points at uniform arc-length spacing, starting at t = 0.
std::vector<Complex> arcLengthCenters(const BoundaryCurve& curve, int nCenters);
std::vector<double> arcLengthParameters(const BoundaryCurve& curve, int nCenters);

enum class Membership : std::uint8_t { Inside, Outside };

struct MembershipMask {
  std::vector<Membership> perPoint;
  std::vector<double> rawIndicator;

  std::size_t size() const { return perPoint.size(); }
  bool inside(std::size_t i) const { return perPoint[i] == Membership::Inside; }
};

class NearQuadrature;

// What to do with points whose indicator is within 1e-6 of 1/2.
enum class BoundaryPolicy { Throw, Outside };

// Discretized unit-density double layer summed over all curves: 1 in the domain,
// 0 outside and in cavities. Near points are corrected with special quadrature.
MembershipMask classifyPoints(const PanelSet& panels, const NearQuadrature& near,
                              const std::vector<Complex>& points, Exec exec = Exec::Parallel,
                              BoundaryPolicy policy = BoundaryPolicy::Throw);
MembershipMask classifyPoints(const Domain& domain, const PanelSet& panels,
                              const std::vector<Complex>& points, Exec exec = Exec::Parallel);

// Unit-density indicator of a single curve at z (special quadrature near it).
double curveIndicator(const PanelSet& panels, const NearQuadrature& near, int curve, Complex z);

}  // namespace pux
