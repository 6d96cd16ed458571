#include "pux/fpoisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>

#include "pux/parallel.hpp"

namespace pux {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planMutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {}
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* p;
};

// Circular convolution on an n x n grid: out = c2r(multiplier * r2c(in)).
template <class Multiply>
void spectralMultiply(int n, std::vector<double>& real, std::vector<Complex>& spec, Multiply&& multiply) {
  const int nh = n / 2 + 1;
  FftwBuffer in(sizeof(double) * n * n), out(sizeof(fftw_complex) * n * nh);
  auto* rin = static_cast<double*>(in.p);
  auto* cout = static_cast<fftw_complex*>(out.p);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(planMutex());
    fwd = fftw_plan_dft_r2c_2d(n, n, rin, cout, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, cout, rin, FFTW_ESTIMATE);
  }
  std::copy(real.begin(), real.end(), rin);
  fftw_execute(fwd);
  spec.resize(static_cast<std::size_t>(n) * nh);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] = Complex(cout[i][0], cout[i][1]);
  multiply(spec);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    cout[i][0] = spec[i].real();
    cout[i][1] = spec[i].imag();
  }
  fftw_execute(bwd);
  std::copy(rin, rin + real.size(), real.begin());
  std::lock_guard<std::mutex> lock(planMutex());
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
}

}  // namespace

BesselPair besselJ01(double x) {
  if (x == 0.0) return {1.0, 0.0};
  return {boost::math::cyl_bessel_j(0, x), boost::math::cyl_bessel_j(1, x)};
}

double kernelHatValue(double R, double k) {
  const double lnR = std::log(R);
  const double x = R * k;
  if (x < 1.0) {
    // Power series of (1 - J0(x)) / x^2 and J1(x) / x; 1 - J0 cancels badly here.
    const double q = -0.25 * x * x;
    double a = 0.0, b = 0.0, ta = 0.25, tb = 0.5;
    for (int m = 1; m <= 14; ++m) {
      a += ta;
      b += tb;
      ta *= q / ((m + 1.0) * (m + 1.0));
      tb *= q / (m * (m + 1.0));
    }
    return R * R * (a - lnR * b);
  }
  const auto jb = besselJ01(x);
  return (1.0 - jb.j0) / (k * k) - R * lnR * jb.j1 / k;
}

double truncationRadius(double L) { return 3.0 * L; }

double SpectralKernel::wavenumber(int idx) const {
  const int m = idx < n / 2 ? idx : idx - n;
  return 2.0 * kPi * m / period;
}

SpectralKernel buildKernel(const UniformGrid& grid, int s, Exec exec) {
  if (s < 3) throw Error(ErrorKind::Config, "oversampling must be at least 3");
  SpectralKernel K;
  K.grid = grid;
  K.R = truncationRadius(grid.L);
  K.s = s;
  K.n = s * grid.Nu;
  if (K.n % 2) ++K.n;
  K.period = K.n * grid.h();
  const int n = K.n;
  K.kernelHat.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double dk = 2.0 * kPi / K.period;
  // Evaluate one octant of the lattice and mirror it.
  parallelFor(n / 2 + 1, exec, [&](long a) {
    for (long b = 0; b <= a; ++b) {
      const double v = kernelHatValue(K.R, dk * std::hypot(double(a), double(b)));
      const long ms[2] = {a, b};
      for (int swap = 0; swap < 2; ++swap)
        for (long p : {ms[swap], -ms[swap]})
          for (long q : {ms[1 - swap], -ms[1 - swap]}) {
            const long i1 = (p + n) % n, i2 = (q + n) % n;
            K.kernelHat[static_cast<std::size_t>(i2) * n + i1] = v;
          }
    }
  }, 4);
  return K;
}

ParticularSolution solveFreeSpace(const std::vector<double>& fe, const SpectralKernel& kernel) {
  const UniformGrid& g = kernel.grid;
  const int Nu = g.Nu, n = kernel.n, nh = n / 2 + 1;
  if (fe.size() != g.size()) throw Error(ErrorKind::Config, "extended field size mismatch");
  ParticularSolution sol;
  sol.grid = g;
  sol.n = n;
  sol.period = kernel.period;
  std::vector<double> padded(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < Nu; ++j)
    for (int i = 0; i < Nu; ++i) padded[static_cast<std::size_t>(j) * n + i] = fe[g.index(i, j)];
  const double scale = -1.0 / (static_cast<double>(n) * n);
  spectralMultiply(n, padded, sol.coeffs, [&](std::vector<Complex>& spec) {
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < nh; ++i1) spec[static_cast<std::size_t>(i2) * nh + i1] *= scale * kernel.at(i1, i2);
  });
  sol.uP.resize(g.size());
  double umax = 0.0;
  for (int j = 0; j < Nu; ++j)
    for (int i = 0; i < Nu; ++i) {
      sol.uP[g.index(i, j)] = padded[static_cast<std::size_t>(j) * n + i];
      umax = std::max(umax, std::abs(sol.uP[g.index(i, j)]));
    }
  // The inverse transform is real by construction; the residue measures the
  // Hermitian defect of the self-conjugate columns.
  double defect = 0.0;
  for (int i1 : {0, n / 2})
    for (int i2 = 0; i2 < n; ++i2) {
      const Complex a = sol.coeffs[static_cast<std::size_t>(i2) * nh + i1];
      const Complex b = sol.coeffs[static_cast<std::size_t>((n - i2) % n) * nh + i1];
      defect += std::abs(a - std::conj(b));
    }
  sol.imagResidue = umax > 0.0 ? defect / umax : 0.0;

  sol.shellTail.assign(n / 2 + 1, 0.0);
  std::vector<double> shell(n / 2 + 1, 0.0);
  for (int i2 = 0; i2 < n; ++i2) {
    const int m2 = std::abs(i2 < n / 2 ? i2 : i2 - n);
    for (int m1 = 0; m1 < nh; ++m1) {
      const double w = (m1 == 0 || m1 == n / 2) ? 1.0 : 2.0;
      shell[std::max(m1, m2)] += w * std::abs(sol.coeffs[static_cast<std::size_t>(i2) * nh + m1]);
    }
  }
  double acc = 0.0;
  for (int K = n / 2; K >= 0; --K) {
    sol.shellTail[K] = acc;
    acc += shell[K];
  }
  return sol;
}

int retainedBand(const ParticularSolution& sol, double tol) {
  int K = sol.n / 2;
  while (K > 0 && sol.shellTail[K - 1] <= tol) --K;
  return K;
}

namespace {

struct Band {
  int K;
  std::vector<int> m2;  // signed row wavenumbers
  // Rows m2, cols m1 in [0, K], Hermitian weights applied; row-major.
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> C;
};

Band makeBand(const ParticularSolution& sol, double tol) {
  Band b;
  b.K = retainedBand(sol, tol);
  const int n = sol.n, nh = n / 2 + 1;
  for (int m = -b.K; m <= b.K; ++m)
    if (m >= -n / 2 && m < n / 2) b.m2.push_back(m);
  b.C.resize(b.m2.size(), b.K + 1);
  for (std::size_t r = 0; r < b.m2.size(); ++r) {
    const int i2 = b.m2[r] >= 0 ? b.m2[r] : b.m2[r] + n;
    for (int m1 = 0; m1 <= b.K; ++m1) {
      const double w = (m1 == 0 || m1 == n / 2) ? 1.0 : 2.0;
      b.C(r, m1) = w * sol.coeffs[static_cast<std::size_t>(i2) * nh + m1];
    }
  }
  return b;
}

void checkInBox(const UniformGrid& g, Complex z) {
  if (!(std::abs(z.real()) <= g.L && std::abs(z.imag()) <= g.L))
    throw Error(ErrorKind::OutOfBox, "evaluation point outside the computational box");
}

}  // namespace

std::vector<double> evalAtPoints(const ParticularSolution& sol, const std::vector<Complex>& points, double tol,
                                 Exec exec) {
  for (const auto& z : points) checkInBox(sol.grid, z);
  const Band band = makeBand(sol, tol);
  const double dk = 2.0 * kPi / sol.period;
  const double L = sol.grid.L;
  const long np = static_cast<long>(points.size());
  std::vector<double> out(np);
  parallelFor(np, exec, [&](long p) {
    const double X = points[p].real() + L, Y = points[p].imag() + L;
    std::vector<Complex> ex(band.K + 1);
    for (int m1 = 0; m1 <= band.K; ++m1) ex[m1] = std::polar(1.0, dk * m1 * X);
    const Eigen::Map<const Eigen::VectorXcd> exv(ex.data(), band.K + 1);
    const Eigen::VectorXcd rowSums = band.C * exv;
    double u = 0.0;
    for (std::size_t r = 0; r < band.m2.size(); ++r) u += (rowSums(r) * std::polar(1.0, dk * band.m2[r] * Y)).real();
    out[p] = u;
  }, 8);
  return out;
}

std::vector<double> evalOnTensorGrid(const ParticularSolution& sol, const std::vector<double>& xs,
                                     const std::vector<double>& ys, double tol) {
  for (double x : xs) checkInBox(sol.grid, {x, 0.0});
  for (double y : ys) checkInBox(sol.grid, {0.0, y});
  const Band band = makeBand(sol, tol);
  const double dk = 2.0 * kPi / sol.period;
  const double L = sol.grid.L;
  const Eigen::Index na = xs.size(), nb = ys.size(), nr = band.m2.size();
  Eigen::MatrixXcd Ex(band.K + 1, na);
  for (Eigen::Index a = 0; a < na; ++a)
    for (int m1 = 0; m1 <= band.K; ++m1) Ex(m1, a) = std::polar(1.0, dk * m1 * (xs[a] + L));
  const Eigen::MatrixXcd T = band.C * Ex;
  Eigen::MatrixXd EyRe(nb, nr), EyIm(nb, nr);
  for (Eigen::Index b = 0; b < nb; ++b)
    for (Eigen::Index r = 0; r < nr; ++r) {
      const Complex e = std::polar(1.0, dk * band.m2[r] * (ys[b] + L));
      EyRe(b, r) = e.real();
      EyIm(b, r) = e.imag();
    }
  const Eigen::MatrixXd U = EyRe * T.real() - EyIm * T.imag();
  std::vector<double> out(static_cast<std::size_t>(na) * nb);
  for (Eigen::Index b = 0; b < nb; ++b)
    for (Eigen::Index a = 0; a < na; ++a) out[static_cast<std::size_t>(b) * na + a] = U(b, a);
  return out;
}

namespace reference {

std::vector<double> evalAtPoints(const ParticularSolution& sol, const std::vector<Complex>& points) {
  const int n = sol.n, nh = n / 2 + 1;
  const double dk = 2.0 * kPi / sol.period;
  std::vector<double> out;
  for (const auto& z : points) {
    checkInBox(sol.grid, z);
    const double X = z.real() + sol.grid.L, Y = z.imag() + sol.grid.L;
    double u = 0.0;
    for (int i2 = 0; i2 < n; ++i2) {
      const int m2 = i2 < n / 2 ? i2 : i2 - n;
      for (int m1 = 0; m1 < nh; ++m1) {
        const double w = (m1 == 0 || m1 == n / 2) ? 1.0 : 2.0;
        u += w * (sol.coeffs[static_cast<std::size_t>(i2) * nh + m1] * std::polar(1.0, dk * (m1 * X + m2 * Y))).real();
      }
    }
    out.push_back(u);
  }
  return out;
}

}  // namespace reference

std::vector<double> solveFreeSpaceFactor2(const std::vector<double>& fe, const SpectralKernel& kernel) {
  const UniformGrid& g = kernel.grid;
  const int Nu = g.Nu, n = kernel.n, n2 = 2 * Nu, nh = n / 2 + 1;
  // Real-space kernel on the padded lattice: inverse transform of the scaled
  // multiplier (the forward pass is overwritten).
  std::vector<double> gReal(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<Complex> spec;
  const double scale = -1.0 / (static_cast<double>(n) * n);
  spectralMultiply(n, gReal, spec, [&](std::vector<Complex>& s) {
    for (int i2 = 0; i2 < n; ++i2)
      for (int i1 = 0; i1 < nh; ++i1) s[static_cast<std::size_t>(i2) * nh + i1] = scale * kernel.at(i1, i2);
  });
  // Restrict to index differences |d| < Nu on the doubled grid.
  std::vector<double> g2(static_cast<std::size_t>(n2) * n2, 0.0);
  for (int d2 = -(Nu - 1); d2 <= Nu - 1; ++d2)
    for (int d1 = -(Nu - 1); d1 <= Nu - 1; ++d1) {
      const std::size_t src = static_cast<std::size_t>((d2 + n) % n) * n + (d1 + n) % n;
      const std::size_t dst = static_cast<std::size_t>((d2 + n2) % n2) * n2 + (d1 + n2) % n2;
      g2[dst] = gReal[src];
    }
  std::vector<Complex> g2hat;
  std::vector<double> tmp = g2;
  spectralMultiply(n2, tmp, g2hat, [](std::vector<Complex>&) {});
  std::vector<double> padded(static_cast<std::size_t>(n2) * n2, 0.0);
  for (int j = 0; j < Nu; ++j)
    for (int i = 0; i < Nu; ++i) padded[static_cast<std::size_t>(j) * n2 + i] = fe[g.index(i, j)];
  const double inv = 1.0 / (static_cast<double>(n2) * n2);
  std::vector<Complex> unused;
  spectralMultiply(n2, padded, unused, [&](std::vector<Complex>& s) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= g2hat[i] * inv;
  });
  std::vector<double> uP(g.size());
  for (int j = 0; j < Nu; ++j)
    for (int i = 0; i < Nu; ++i) uP[g.index(i, j)] = padded[static_cast<std::size_t>(j) * n2 + i];
  return uP;
}

}  // namespace pux
