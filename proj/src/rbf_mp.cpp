#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "pux/parallel.hpp"
#include "pux/rbf.hpp"

namespace pux {

namespace {

class MpArray {
 public:
  MpArray(std::size_t n, int bits) : v_(n) {
    for (auto& x : v_) mpfr_init2(&x, bits);
  }
  ~MpArray() {
    for (auto& x : v_) mpfr_clear(&x);
  }
  MpArray(const MpArray&) = delete;
  MpArray& operator=(const MpArray&) = delete;
  mpfr_ptr operator[](std::size_t i) { return &v_[i]; }
  mpfr_srcptr operator[](std::size_t i) const { return &v_[i]; }

 private:
  std::vector<__mpfr_struct> v_;
};

// exp(-e2 * (dx^2 + dy^2)) with dx, dy formed exactly from doubles.
void gaussMp(mpfr_ptr out, mpfr_srcptr e2, double x0, double x1, double y0, double y1, MpArray& tmp) {
  mpfr_set_d(tmp[0], x0, MPFR_RNDN);
  mpfr_sub_d(tmp[0], tmp[0], x1, MPFR_RNDN);
  mpfr_sqr(tmp[0], tmp[0], MPFR_RNDN);
  mpfr_set_d(tmp[1], y0, MPFR_RNDN);
  mpfr_sub_d(tmp[1], tmp[1], y1, MPFR_RNDN);
  mpfr_sqr(tmp[1], tmp[1], MPFR_RNDN);
  mpfr_add(tmp[0], tmp[0], tmp[1], MPFR_RNDN);
  mpfr_mul(tmp[0], tmp[0], e2, MPFR_RNDN);
  mpfr_neg(tmp[0], tmp[0], MPFR_RNDN);
  mpfr_exp(out, tmp[0], MPFR_RNDN);
}

}  // namespace

Eigen::MatrixXd extendedCardinalRows(const GaussianBasis& basis, const std::vector<Complex>& nodes, double h,
                                     const std::vector<std::array<int, 2>>& offsets, int bits,
                                     double* condEstimate, Exec exec) {
  const int M = static_cast<int>(nodes.size());
  MpArray e2(1, bits), tmp(3, bits);
  mpfr_set_d(e2[0], basis.epsilon, MPFR_RNDN);
  mpfr_sqr(e2[0], e2[0], MPFR_RNDN);

  // Lower Cholesky factor L (row-major) and its transpose U.
  MpArray L(static_cast<std::size_t>(M) * M, bits), U(static_cast<std::size_t>(M) * M, bits);
  auto at = [M](int i, int j) { return static_cast<std::size_t>(i) * M + j; };
  for (int i = 0; i < M; ++i)
    for (int j = 0; j <= i; ++j)
      gaussMp(L[at(i, j)], e2[0], nodes[i].real(), nodes[j].real(), nodes[i].imag(), nodes[j].imag(), tmp);
  double dmin = INFINITY, dmax = 0.0;
  for (int j = 0; j < M; ++j) {
    for (int k = 0; k < j; ++k) {
      mpfr_sqr(tmp[2], L[at(j, k)], MPFR_RNDN);
      mpfr_sub(L[at(j, j)], L[at(j, j)], tmp[2], MPFR_RNDN);
    }
    if (mpfr_sgn(L[at(j, j)]) <= 0) throw Error(ErrorKind::SingularBasis, "collocation matrix lost definiteness");
    mpfr_sqrt(L[at(j, j)], L[at(j, j)], MPFR_RNDN);
    const double d = mpfr_get_d(L[at(j, j)], MPFR_RNDN);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    for (int i = j + 1; i < M; ++i) {
      for (int k = 0; k < j; ++k) {
        mpfr_mul(tmp[2], L[at(i, k)], L[at(j, k)], MPFR_RNDN);
        mpfr_sub(L[at(i, j)], L[at(i, j)], tmp[2], MPFR_RNDN);
      }
      mpfr_div(L[at(i, j)], L[at(i, j)], L[at(j, j)], MPFR_RNDN);
    }
  }
  if (condEstimate) *condEstimate = (dmax / dmin) * (dmax / dmin);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j <= i; ++j) mpfr_set(U[at(j, i)], L[at(i, j)], MPFR_RNDN);

  // Per-axis Gaussian factors for each grid offset coordinate.
  int amin = 0, amax = 0;
  for (const auto& o : offsets) {
    amin = std::min({amin, o[0], o[1]});
    amax = std::max({amax, o[0], o[1]});
  }
  const int span = amax - amin + 1;
  MpArray gx(static_cast<std::size_t>(span) * M, bits), gy(static_cast<std::size_t>(span) * M, bits);
  for (int a = amin; a <= amax; ++a) {
    for (int j = 0; j < M; ++j) {
      mpfr_set_si(tmp[0], a, MPFR_RNDN);
      mpfr_mul_d(tmp[0], tmp[0], h, MPFR_RNDN);
      mpfr_set(tmp[1], tmp[0], MPFR_RNDN);
      mpfr_sub_d(tmp[0], tmp[0], nodes[j].real(), MPFR_RNDN);
      mpfr_sqr(tmp[0], tmp[0], MPFR_RNDN);
      mpfr_mul(tmp[0], tmp[0], e2[0], MPFR_RNDN);
      mpfr_neg(tmp[0], tmp[0], MPFR_RNDN);
      mpfr_exp(gx[static_cast<std::size_t>(a - amin) * M + j], tmp[0], MPFR_RNDN);
      mpfr_sub_d(tmp[1], tmp[1], nodes[j].imag(), MPFR_RNDN);
      mpfr_sqr(tmp[1], tmp[1], MPFR_RNDN);
      mpfr_mul(tmp[1], tmp[1], e2[0], MPFR_RNDN);
      mpfr_neg(tmp[1], tmp[1], MPFR_RNDN);
      mpfr_exp(gy[static_cast<std::size_t>(a - amin) * M + j], tmp[1], MPFR_RNDN);
    }
  }

  Eigen::MatrixXd out(offsets.size(), M);
  const long rows = static_cast<long>(offsets.size());
  parallelFor(rows, exec, [&](long r) {
    MpArray v(M, bits), t(1, bits);
    const std::size_t ga = static_cast<std::size_t>(offsets[r][0] - amin) * M;
    const std::size_t gb = static_cast<std::size_t>(offsets[r][1] - amin) * M;
    for (int j = 0; j < M; ++j) {
      mpfr_mul(v[j], gx[ga + j], gy[gb + j], MPFR_RNDN);
      for (int k = 0; k < j; ++k) {
        mpfr_mul(t[0], L[at(j, k)], v[k], MPFR_RNDN);
        mpfr_sub(v[j], v[j], t[0], MPFR_RNDN);
      }
      mpfr_div(v[j], v[j], L[at(j, j)], MPFR_RNDN);
    }
    for (int j = M - 1; j >= 0; --j) {
      for (int k = j + 1; k < M; ++k) {
        mpfr_mul(t[0], U[at(j, k)], v[k], MPFR_RNDN);
        mpfr_sub(v[j], v[j], t[0], MPFR_RNDN);
      }
      mpfr_div(v[j], v[j], U[at(j, j)], MPFR_RNDN);
    }
    for (int j = 0; j < M; ++j) out(r, j) = mpfr_get_d(v[j], MPFR_RNDN);
  }, 8);
  return out;
}

}  // namespace pux
