#pragma once

#include <vector>

#include "pux/geometry.hpp"
#include "pux/special_quad.hpp"

namespace pux {

struct GmresSettings {
  double tol = 1e-13;
  int maxIter = 200;
};

// Double-layer Nystrom system on all curves, augmented with one log source per
// cavity and one zero-mean constraint per cavity curve.
struct BieSystem {
  const PanelSet* panels = nullptr;
  std::vector<Complex> sources;  // z_k, one per cavity
  GmresSettings gmres;

  std::size_t dimension() const { return panels->numNodes() + sources.size(); }
};

BieSystem makeBieSystem(const PanelSet& panels, const Domain& domain, GmresSettings gmres = {});

struct LayerDensity {
  std::vector<double> mu;
  std::vector<double> logStrengths;
  int iterations = 0;
  double residual = 0.0;
};

std::vector<double> applyOperator(const BieSystem& sys, const std::vector<double>& x,
                                  Exec exec = Exec::Parallel);

namespace reference {
// Direct transcription of the Nystrom row formula; for testing.
std::vector<double> applyOperator(const BieSystem& sys, const std::vector<double>& x);
}

struct GmresResult {
  std::vector<double> x;
  int iterations = 0;
  double relResidual = 0.0;
  bool converged = false;
};

// Unrestarted GMRES with modified Gram-Schmidt and Givens rotations.
template <class Apply>
GmresResult gmres(Apply&& apply, const std::vector<double>& b, const GmresSettings& s);

LayerDensity solveDensity(const BieSystem& sys, const std::vector<double>& boundaryData,
                          Exec exec = Exec::Parallel);

// u(z) = D[mu](z) + sum_k A_k log|z - z_k|, with near-panel correction.
std::vector<double> evalField(const LayerDensity& density, const BieSystem& sys,
                              const NearQuadrature& near, const std::vector<Complex>& points,
                              Exec exec = Exec::Parallel);

// Same evaluation without special quadrature.
std::vector<double> evalFieldRegular(const LayerDensity& density, const BieSystem& sys,
                                     const std::vector<Complex>& points, Exec exec = Exec::Parallel);

}  // namespace pux

#include "pux/gmres_impl.hpp"
