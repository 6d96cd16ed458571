#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pux/common.hpp"

namespace pux {

struct GaussianBasis {
  double epsilon = 2.0;
};

double gaussian(const GaussianBasis& basis, double r);

// Compactly supported Wu function (1 - r)_+^{kTilde + 1} p(r).
struct WuFunction {
  int kTilde = 5;           // regularity at the support edge
  int k = 4;                // regularity at the origin
  std::vector<double> poly; // ascending coefficients of p
};

WuFunction makeWu(int kTilde);
double wuEval(const WuFunction& wu, double r);

// Unit-disc Vogel spiral scaled by Rp, j = 1..M.
std::vector<Complex> vogelNodes(int M, double Rp);

enum class StabilizedPath {
  Tsvd,      // truncated-SVD pseudoinverse in double precision
  Extended,  // exact collocation solve in adaptive multiprecision
};

struct StencilOptions {
  StabilizedPath stabilizer = StabilizedPath::Tsvd;
  double condThreshold = 1e12;  // direct solve at or below this condition number
  double tsvdCutoff = 1e-14;
};

struct StencilTemplate {
  double h = 0.0;
  double Rp = 0.0;
  int M = 0;
  GaussianBasis basis;
  WuFunction wu;
  std::vector<Complex> vogel;
  std::vector<std::array<int, 2>> gridOffsets;
  Eigen::MatrixXd A;                 // N x M
  std::vector<double> weightSamples; // psi(|offset h| / Rp)
  std::string path;                  // "direct", "tsvd" or "extended"
  double condPhi = 0.0;              // condition estimate of the collocation matrix
  int rank = 0;
  int precisionBits = 53;

  std::size_t rows() const { return gridOffsets.size(); }
};

// Grid offsets (a, b) with |(a, b) h| <= Rp, ordered by b then a.
std::vector<std::array<int, 2>> gridOffsetsWithin(double h, double Rp);

Eigen::MatrixXd collocationMatrix(const GaussianBasis& basis, const std::vector<Complex>& nodes);

StencilTemplate buildStencil(double h, double Rp, int M, const GaussianBasis& basis, const WuFunction& wu,
                             const StencilOptions& options = {});

// Copy of tpl with the weight function replaced; A does not depend on it.
StencilTemplate withWeightFunction(const StencilTemplate& tpl, const WuFunction& wu);

// Rows of Phi~ Phi^{-1} for the given evaluation points, computed in multiprecision.
// Used by the Extended path; exposed for tests.
Eigen::MatrixXd extendedCardinalRows(const GaussianBasis& basis, const std::vector<Complex>& nodes,
                                     double h, const std::vector<std::array<int, 2>>& offsets, int bits,
                                     double* condEstimate = nullptr, Exec exec = Exec::Parallel);

struct LocalExtension {
  std::vector<double> outsideValues;
  double residual = 0.0;
};

LocalExtension localLeastSquaresExtend(const StencilTemplate& tpl, const std::vector<int>& insideRows,
                                       const std::vector<int>& outsideRows,
                                       const std::vector<double>& insideValues);

}  // namespace pux
