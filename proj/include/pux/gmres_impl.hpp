#pragma once

#include <cmath>
#include <vector>

namespace pux {

template <class Apply>
GmresResult gmres(Apply&& apply, const std::vector<double>& b, const GmresSettings& s) {
  const std::size_t n = b.size();
  GmresResult res;
  res.x.assign(n, 0.0);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  const int m = s.maxIter;
  std::vector<std::vector<double>> V;
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
  V.push_back(b);
  for (double& v : V[0]) v /= bnorm;
  g[0] = bnorm;
  int k = 0;
  for (; k < m; ++k) {
    std::vector<double> w = apply(V[k]);
    for (int j = 0; j <= k; ++j) {
      double h = 0.0;
      for (std::size_t i = 0; i < n; ++i) h += w[i] * V[j][i];
      H[j][k] = h;
      for (std::size_t i = 0; i < n; ++i) w[i] -= h * V[j][i];
    }
    double wn = 0.0;
    for (double v : w) wn += v * v;
    wn = std::sqrt(wn);
    H[k + 1][k] = wn;
    for (int j = 0; j < k; ++j) {
      const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
      H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
      H[j][k] = t;
    }
    const double r = std::hypot(H[k][k], H[k + 1][k]);
    cs[k] = H[k][k] / r;
    sn[k] = H[k + 1][k] / r;
    H[k][k] = r;
    H[k + 1][k] = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] *= cs[k];
    res.relResidual = std::abs(g[k + 1]) / bnorm;
    if (res.relResidual <= s.tol || wn == 0.0) {
      ++k;
      res.converged = true;
      break;
    }
    for (double& v : w) v /= wn;
    V.push_back(std::move(w));
  }
  std::vector<double> y(k, 0.0);
  for (int i = k - 1; i >= 0; --i) {
    double t = g[i];
    for (int j = i + 1; j < k; ++j) t -= H[i][j] * y[j];
    y[i] = t / H[i][i];
  }
  for (int j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) res.x[i] += y[j] * V[j][i];
  res.iterations = k;
  return res;
}

}  // namespace pux
