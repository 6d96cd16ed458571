#pragma once

#include <vector>

#include "pux/grid.hpp"

namespace pux {

struct BesselPair {
  double j0, j1;
};

BesselPair besselJ01(double x);

// Fourier transform of the Green's function of -Laplace truncated at radius R.
double kernelHatValue(double R, double k);

struct SpectralKernel {
  UniformGrid grid;
  double R = 0.0;
  int s = 4;
  int n = 0;        // padded points per side, s * Nu
  double period = 0.0;
  std::vector<double> kernelHat;  // n x n, row index m2 (y), FFT ordering

  double wavenumber(int idx) const;  // lattice index -> k component
  double at(int i1, int i2) const { return kernelHat[static_cast<std::size_t>(i2) * n + i1]; }
};

// Truncation radius used for a box of half-side L.
double truncationRadius(double L);

SpectralKernel buildKernel(const UniformGrid& grid, int s = 4, Exec exec = Exec::Parallel);

struct ParticularSolution {
  UniformGrid grid;
  int n = 0;
  double period = 0.0;
  std::vector<double> uP;  // Nu x Nu, same layout as the grid
  // Coefficients c with u(x) = Re sum_m c_m e^{i k_m . (x + L)}, stored for m1 in
  // [0, n/2] (Hermitian half), row index m2 in FFT ordering.
  std::vector<Complex> coeffs;
  double imagResidue = 0.0;       // max |Im| of the inverse transform relative to max |uP|
  std::vector<double> shellTail;  // shellTail[K] = sum of weighted |c| with max(|m1|,|m2|) > K
};

// Delta u = f on R^2 for f supported inside the box.
ParticularSolution solveFreeSpace(const std::vector<double>& fe, const SpectralKernel& kernel);

// Smallest band half-width whose discarded coefficients sum to at most tol.
int retainedBand(const ParticularSolution& sol, double tol);

std::vector<double> evalAtPoints(const ParticularSolution& sol, const std::vector<Complex>& points,
                                 double tol = 1e-14, Exec exec = Exec::Parallel);

// Values on the tensor grid xs x ys, row-major with y slowest.
std::vector<double> evalOnTensorGrid(const ParticularSolution& sol, const std::vector<double>& xs,
                                     const std::vector<double>& ys, double tol = 1e-14);

namespace reference {
// Full-band summation with one complex exponential per mode.
std::vector<double> evalAtPoints(const ParticularSolution& sol, const std::vector<Complex>& points);
}

// The padded-grid convolution computed with a kernel restricted to a 2 Nu grid.
std::vector<double> solveFreeSpaceFactor2(const std::vector<double>& fe, const SpectralKernel& kernel);

}  // namespace pux
