#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "pux/geometry.hpp"

namespace pux {

// Per-panel data for interpolatory near-field quadrature of the double layer.
// Each panel is mapped so that its endpoints land on -1 and 1.
struct NearPanel {
  Complex a, b;                       // panel endpoints
  std::array<Complex, kNodesPerPanel> tt;   // mapped nodes
  std::array<Complex, kNodesPerPanel> dtw;  // mapped derivative times weight
  double maxBulge = 0.0;              // max |Im| of the mapped panel
  // Transposed Vandermonde factorisation, kept in extended precision because the
  // monomial basis on 16 nodes loses about five digits.
  Eigen::PartialPivLU<Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>> vandermondeT;
};

class NearQuadrature {
 public:
  NearQuadrature() = default;
  explicit NearQuadrature(const PanelSet& panels);

  const PanelSet& panels() const { return *panels_; }
  const NearPanel& panel(std::size_t p) const { return near_[p]; }

  Complex mapToPanel(std::size_t p, Complex z) const;
  // Exact integral of 1/(t - zt) along the mapped panel.
  Complex exactP0(std::size_t p, Complex zt) const;
  // Gauss-Legendre estimate of the same integral.
  Complex gaussP0(std::size_t p, Complex zt) const;
  bool onPanel(std::size_t p, Complex zt) const;
  // True when z is within one panel arc length of the panel midpoint.
  bool isNear(std::size_t p, Complex z) const;

 private:
  const PanelSet* panels_ = nullptr;
  std::vector<NearPanel> near_;
  // Height of the mapped panel above the real axis where its real part is x.
  bool panelHeightAt(std::size_t p, double x, double& height) const;
};

inline constexpr double kSpecialQuadThreshold = 1e-14;

double accuracyIndicator(const NearQuadrature& nq, std::size_t p, Complex z);

// Contribution (1/2pi) Im int mu dtau/(tau - z) of panel p with the density
// given at its 16 nodes. Throws OnPanel if z lies on the panel.
double specialQuadPanel(const NearQuadrature& nq, std::size_t p, const double* mu, Complex z);

// Same contribution by the plain 16-point rule.
double regularQuadPanel(const PanelSet& ps, std::size_t p, const double* mu, Complex z);

// Unit-density contribution, Im(p0)/(2pi) by the exact moment.
double specialQuadUnitPanel(const NearQuadrature& nq, std::size_t p, Complex z);

}  // namespace pux
