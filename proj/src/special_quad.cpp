#include "pux/special_quad.hpp"

#include <algorithm>
#include <cmath>

namespace pux {

NearQuadrature::NearQuadrature(const PanelSet& panels) : panels_(&panels) {
  near_.resize(panels.numPanels());
  for (std::size_t p = 0; p < panels.numPanels(); ++p) {
    const auto& info = panels.panels[p];
    const auto& curve = panels.curves[info.curve];
    NearPanel& np = near_[p];
    np.a = evalCurve(curve, info.t0).z;
    np.b = evalCurve(curve, info.t1).z;
    const Complex scale = 2.0 / (np.b - np.a);
    using CL = std::complex<long double>;
    Eigen::Matrix<CL, Eigen::Dynamic, Eigen::Dynamic> vt(kNodesPerPanel, kNodesPerPanel);
    for (int j = 0; j < kNodesPerPanel; ++j) {
      const std::size_t n = info.firstNode + j;
      np.tt[j] = (2.0 * panels.z[n] - (np.a + np.b)) / (np.b - np.a);
      np.dtw[j] = scale * panels.dz[n] * panels.w[n];
      np.maxBulge = std::max(np.maxBulge, std::abs(np.tt[j].imag()));
      CL pw = 1.0L;
      for (int k = 0; k < kNodesPerPanel; ++k) {
        vt(k, j) = pw;
        pw *= CL(np.tt[j]);
      }
    }
    const Complex mid = (2.0 * info.midpoint - (np.a + np.b)) / (np.b - np.a);
    np.maxBulge = std::max(np.maxBulge, std::abs(mid.imag()));
    np.vandermondeT.compute(vt);
  }
}

Complex NearQuadrature::mapToPanel(std::size_t p, Complex z) const {
  const NearPanel& np = near_[p];
  return (2.0 * z - (np.a + np.b)) / (np.b - np.a);
}

bool NearQuadrature::isNear(std::size_t p, Complex z) const {
  const auto& info = panels_->panels[p];
  return std::abs(z - info.midpoint) < info.arcLength;
}

bool NearQuadrature::panelHeightAt(std::size_t p, double x, double& height) const {
  if (!(std::abs(x) < 1.0)) return false;
  const auto& info = panels_->panels[p];
  const auto& curve = panels_->curves[info.curve];
  const NearPanel& np = near_[p];
  const Complex scale = 2.0 / (np.b - np.a);
  double t = info.t0 + 0.5 * (x + 1.0) * (info.t1 - info.t0);
  Complex mapped;
  for (int iter = 0; iter < 30; ++iter) {
    const auto cp = evalCurve(curve, t);
    mapped = (2.0 * cp.z - (np.a + np.b)) / (np.b - np.a);
    const double f = mapped.real() - x;
    const double df = (scale * cp.dz).real();
    if (df == 0.0) break;
    const double step = f / df;
    t = std::clamp(t - step, info.t0, info.t1);
    if (std::abs(step) <= 1e-16 * (info.t1 - info.t0)) break;
  }
  mapped = (2.0 * evalCurve(curve, t).z - (np.a + np.b)) / (np.b - np.a);
  height = mapped.imag();
  return true;
}

Complex NearQuadrature::exactP0(std::size_t p, Complex zt) const {
  if (zt.imag() == 0.0) zt = Complex(zt.real(), +0.0);
  Complex p0 = std::log(1.0 - zt) - std::log(-1.0 - zt);
  const NearPanel& np = near_[p];
  double h;
  if (std::abs(zt.imag()) <= 2.0 * np.maxBulge && panelHeightAt(p, zt.real(), h)) {
    if (h > 0.0 && zt.imag() >= 0.0 && zt.imag() < h) p0 -= Complex(0.0, 2.0 * kPi);
    if (h < 0.0 && zt.imag() < 0.0 && zt.imag() > h) p0 += Complex(0.0, 2.0 * kPi);
  }
  return p0;
}

Complex NearQuadrature::gaussP0(std::size_t p, Complex zt) const {
  const NearPanel& np = near_[p];
  Complex s = 0.0;
  for (int j = 0; j < kNodesPerPanel; ++j) s += np.dtw[j] / (np.tt[j] - zt);
  return s;
}

bool NearQuadrature::onPanel(std::size_t p, Complex zt) const {
  constexpr double kTol = 1e-14;
  if (std::abs(zt - 1.0) < kTol || std::abs(zt + 1.0) < kTol) return true;
  double h;
  if (std::abs(zt.imag()) <= 2.0 * near_[p].maxBulge + kTol && panelHeightAt(p, zt.real(), h))
    return std::abs(zt.imag() - h) < kTol;
  return false;
}

double accuracyIndicator(const NearQuadrature& nq, std::size_t p, Complex z) {
  const Complex zt = nq.mapToPanel(p, z);
  return std::abs(nq.gaussP0(p, zt) - nq.exactP0(p, zt));
}

double specialQuadPanel(const NearQuadrature& nq, std::size_t p, const double* mu, Complex z) {
  const Complex zt = nq.mapToPanel(p, z);
  if (nq.onPanel(p, zt)) throw Error(ErrorKind::OnPanel, "evaluation point lies on a panel");
  using CL = std::complex<long double>;
  Eigen::Matrix<CL, Eigen::Dynamic, 1> moments(kNodesPerPanel);
  const CL ztl(zt);
  moments(0) = CL(nq.exactP0(p, zt));
  for (int k = 0; k + 1 < kNodesPerPanel; ++k) {
    const long double odd = ((k + 1) % 2 == 1) ? 2.0L / (k + 1) : 0.0L;
    moments(k + 1) = ztl * moments(k) + odd;
  }
  const Eigen::Matrix<CL, Eigen::Dynamic, 1> lambda = nq.panel(p).vandermondeT.solve(moments);
  long double s = 0.0L;
  for (int j = 0; j < kNodesPerPanel; ++j) s += mu[j] * lambda(j).imag();
  return static_cast<double>(s / (2.0L * kPi));
}

double regularQuadPanel(const PanelSet& ps, std::size_t p, const double* mu, Complex z) {
  const std::size_t b = ps.panels[p].firstNode;
  double s = 0.0;
  for (int j = 0; j < kNodesPerPanel; ++j) {
    const std::size_t n = b + j;
    s += mu[j] * (ps.w[n] * ps.dz[n] / (ps.z[n] - z)).imag();
  }
  return s / (2.0 * kPi);
}

double specialQuadUnitPanel(const NearQuadrature& nq, std::size_t p, Complex z) {
  const Complex zt = nq.mapToPanel(p, z);
  if (nq.onPanel(p, zt)) throw Error(ErrorKind::OnPanel, "evaluation point lies on a panel");
  return nq.exactP0(p, zt).imag() / (2.0 * kPi);
}

}  // namespace pux
