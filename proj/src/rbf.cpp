#include "pux/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pux {

double gaussian(const GaussianBasis& basis, double r) {
  const double er = basis.epsilon * r;
  return std::exp(-er * er);
}

WuFunction makeWu(int kTilde) {
  WuFunction wu;
  wu.kTilde = kTilde;
  switch (kTilde) {
    case 1: wu.k = 0; wu.poly = {2, 1}; break;
    case 2: wu.k = 0; wu.poly = {8, 9, 3}; break;
    case 3: wu.k = 2; wu.poly = {4, 16, 12, 3}; break;
    case 4: wu.k = 2; wu.poly = {8, 40, 48, 25, 5}; break;
    case 5: wu.k = 4; wu.poly = {6, 36, 82, 72, 30, 5}; break;
    default: throw Error(ErrorKind::Config, "kTilde must be in 1..5");
  }
  return wu;
}

double wuEval(const WuFunction& wu, double r) {
  if (r >= 1.0) return 0.0;
  double p = 0.0;
  for (auto it = wu.poly.rbegin(); it != wu.poly.rend(); ++it) p = p * r + *it;
  double t = 1.0;
  for (int i = 0; i <= wu.kTilde; ++i) t *= 1.0 - r;
  return t * p;
}

std::vector<Complex> vogelNodes(int M, double Rp) {
  if (M < 1) throw Error(ErrorKind::Config, "M must be positive");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Complex> out(M);
  for (int j = 1; j <= M; ++j) out[j - 1] = Rp * std::sqrt(double(j) / M) * std::polar(1.0, j * golden);
  return out;
}

std::vector<std::array<int, 2>> gridOffsetsWithin(double h, double Rp) {
  const int P = static_cast<int>(std::floor(Rp / h)) + 1;
  // Slightly inclusive so that nodes whose coordinate distance rounds below Rp
  // always have a row.
  const double r2 = (Rp / h) * (Rp / h) * (1.0 + 1e-12);
  std::vector<std::array<int, 2>> out;
  for (int b = -P; b <= P; ++b)
    for (int a = -P; a <= P; ++a)
      if (static_cast<double>(a * a + b * b) <= r2) out.push_back({a, b});
  return out;
}

Eigen::MatrixXd collocationMatrix(const GaussianBasis& basis, const std::vector<Complex>& nodes) {
  const int M = static_cast<int>(nodes.size());
  Eigen::MatrixXd phi(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) phi(i, j) = gaussian(basis, std::abs(nodes[i] - nodes[j]));
  return phi;
}

namespace {

Eigen::MatrixXd evalMatrix(const GaussianBasis& basis, const std::vector<Complex>& nodes, double h,
                           const std::vector<std::array<int, 2>>& offsets) {
  Eigen::MatrixXd out(offsets.size(), nodes.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const Complex y(offsets[i][0] * h, offsets[i][1] * h);
    for (std::size_t j = 0; j < nodes.size(); ++j) out(i, j) = gaussian(basis, std::abs(y - nodes[j]));
  }
  return out;
}

// Smallest precision whose results agree with a run 64 bits finer on sampled rows.
Eigen::MatrixXd extendedPath(const GaussianBasis& basis, const std::vector<Complex>& nodes, double h,
                             const std::vector<std::array<int, 2>>& offsets, int& bits, double& cond) {
  std::vector<std::array<int, 2>> probe;
  for (std::size_t i = 0; i < offsets.size(); i += std::max<std::size_t>(1, offsets.size() / 8))
    probe.push_back(offsets[i]);
  for (bits = 128; bits <= 2048; bits += 64) {
    double est = 0.0;
    Eigen::MatrixXd coarse;
    try {
      coarse = extendedCardinalRows(basis, nodes, h, probe, bits, &est);
    } catch (const Error&) {
      continue;
    }
    // Need roughly log10(cond) + 17 significant digits; keep a margin.
    if (std::log10(std::max(est, 1.0)) + 25.0 > bits * std::log10(2.0)) continue;
    const Eigen::MatrixXd fine = extendedCardinalRows(basis, nodes, h, probe, bits + 64);
    const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
    if ((coarse - fine).cwiseAbs().maxCoeff() > 1e-15 * scale) continue;
    cond = est;
    return extendedCardinalRows(basis, nodes, h, offsets, bits);
  }
  throw Error(ErrorKind::SingularBasis, "multiprecision collocation solve did not stabilize");
}

}  // namespace

StencilTemplate withWeightFunction(const StencilTemplate& tpl, const WuFunction& wu) {
  StencilTemplate out = tpl;
  out.wu = wu;
  for (std::size_t i = 0; i < out.rows(); ++i)
    out.weightSamples[i] =
        wuEval(wu, std::hypot(out.gridOffsets[i][0] * out.h, out.gridOffsets[i][1] * out.h) / out.Rp);
  return out;
}

StencilTemplate buildStencil(double h, double Rp, int M, const GaussianBasis& basis, const WuFunction& wu,
                             const StencilOptions& options) {
  if (!(basis.epsilon > 0.0)) throw Error(ErrorKind::Config, "epsilon must be positive");
  if (M > 400) throw Error(ErrorKind::Config, "M is capped at 400");
  StencilTemplate tpl;
  tpl.h = h;
  tpl.Rp = Rp;
  tpl.M = M;
  tpl.basis = basis;
  tpl.wu = wu;
  tpl.vogel = vogelNodes(M, Rp);
  tpl.gridOffsets = gridOffsetsWithin(h, Rp);
  const std::size_t N = tpl.gridOffsets.size();
  if (N < 2 * static_cast<std::size_t>(M)) {
    std::ostringstream os;
    os << N << " grid points within the partition radius, need at least " << 2 * M;
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  tpl.weightSamples.resize(N);
  for (std::size_t i = 0; i < N; ++i)
    tpl.weightSamples[i] = wuEval(wu, std::hypot(tpl.gridOffsets[i][0] * h, tpl.gridOffsets[i][1] * h) / Rp);

  const Eigen::MatrixXd phi = collocationMatrix(basis, tpl.vogel);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  tpl.condPhi = sv(M - 1) > 0.0 ? sv(0) / sv(M - 1) : INFINITY;

  if (tpl.condPhi <= options.condThreshold) {
    const Eigen::MatrixXd phiTilde = evalMatrix(basis, tpl.vogel, h, tpl.gridOffsets);
    tpl.A = phi.llt().solve(phiTilde.transpose()).transpose();
    tpl.path = "direct";
    tpl.rank = M;
  } else if (options.stabilizer == StabilizedPath::Tsvd) {
    int rank = 0;
    while (rank < M && sv(rank) > options.tsvdCutoff * sv(0)) ++rank;
    tpl.rank = rank;
    if (rank < M / 2.0) {
      std::ostringstream os;
      os << "truncated SVD keeps rank " << rank << " of " << M;
      throw Error(ErrorKind::SingularBasis, os.str());
    }
    const Eigen::MatrixXd phiTilde = evalMatrix(basis, tpl.vogel, h, tpl.gridOffsets);
    const Eigen::MatrixXd U = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd V = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd inv = sv.head(rank).cwiseInverse();
    tpl.A = (phiTilde * V) * inv.asDiagonal() * U.transpose();
    tpl.path = "tsvd";
  } else {
    int bits = 0;
    double cond = 0.0;
    tpl.A = extendedPath(basis, tpl.vogel, h, tpl.gridOffsets, bits, cond);
    tpl.condPhi = cond;
    tpl.precisionBits = bits;
    tpl.rank = M;
    tpl.path = "extended";
  }
  return tpl;
}

LocalExtension localLeastSquaresExtend(const StencilTemplate& tpl, const std::vector<int>& insideRows,
                                       const std::vector<int>& outsideRows,
                                       const std::vector<double>& insideValues) {
  const int M = tpl.M;
  if (static_cast<int>(insideRows.size()) < M) {
    std::ostringstream os;
    os << insideRows.size() << " inside rows for " << M << " unknowns";
    throw Error(ErrorKind::Underdetermined, os.str());
  }
  if (insideValues.size() != insideRows.size()) throw Error(ErrorKind::Config, "inside value count mismatch");
  const Eigen::Index nIn = static_cast<Eigen::Index>(insideRows.size());
  Eigen::MatrixXd AIn(nIn, M);
  Eigen::VectorXd rhs(nIn);
  for (Eigen::Index r = 0; r < nIn; ++r) {
    AIn.row(r) = tpl.A.row(insideRows[r]);
    rhs(r) = insideValues[r];
  }
  LocalExtension out;
  out.outsideValues.assign(outsideRows.size(), 0.0);
  const double rhsNorm = rhs.norm();
  if (rhsNorm == 0.0) return out;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(AIn);
  const Eigen::VectorXd F = qr.solve(rhs);
  out.residual = (AIn * F - rhs).norm() / rhsNorm;
  for (std::size_t r = 0; r < outsideRows.size(); ++r) out.outsideValues[r] = tpl.A.row(outsideRows[r]).dot(F);
  return out;
}

}  // namespace pux
