#pragma once

#include <functional>
#include <vector>

#include "pux/geometry.hpp"
#include "pux/grid.hpp"
#include "pux/rbf.hpp"

namespace pux {

int heuristicKTilde(double P);
int heuristicM(double P);

struct ExtensionPartition {
  int ci = 0, cj = 0;   // grid index of the center
  Complex center;
  double radius = 0.0;
  int curve = 0;
  double beta = 0.0;    // inside node count / M
  int insideCount = 0;
};

struct ZeroPartition {
  Complex center;
  double radius = 0.0;
  int curve = 0;
};

struct Covering {
  std::vector<ExtensionPartition> extension;
  std::vector<ZeroPartition> zero;
  double P = 0.0;
  double betaMin = 0.0;
  double Rp = 0.0;

  // Partition index space: extension partitions first, then zero partitions.
  std::size_t size() const { return extension.size() + zero.size(); }
  Complex center(std::size_t p) const;
  double radius(std::size_t p) const;
};

// Partition counts per curve from the overlap factor: ceil(arcLength / (overlapFactor Rp)).
std::vector<int> partitionCounts(const Domain& domain, double Rp, double overlapFactor);

Covering buildCovering(const Domain& domain, const PanelSet& panels, const UniformGrid& grid, double Rp,
                       const std::vector<int>& nPerCurve, const MembershipMask& gridMask, int M);

struct Weight {
  std::size_t partition;
  double weight;
};

std::vector<Weight> shepardWeights(const Covering& covering, const WuFunction& wu, Complex node);

enum class Provenance : std::uint8_t { OriginalInsideOmega, Extended, Zero };

struct PartitionReport {
  double residual = 0.0;
  double maxAbsExtension = 0.0;
  int rowsUsed = 0;
};

struct ExtendedField {
  UniformGrid grid;
  std::vector<double> values;
  std::vector<Provenance> provenance;
  std::vector<PartitionReport> partitions;
  double betaMinUsed = 0.0;
  double secondsLocal = 0.0;  // local least-squares solves
  double secondsBlend = 0.0;  // weighted blend onto the grid
};

struct ExtensionOptions {
  double betaTarget = 3.0;  // 0 keeps every inside row
  Exec exec = Exec::Parallel;
};

// Inside rows kept for a partition with the given inside count: a deterministic
// stride landing near betaTarget * M.
int downsampleStride(int insideCount, int M, double betaTarget);

ExtendedField buildExtension(const std::vector<double>& gridSamples, const UniformGrid& grid,
                             const MembershipMask& gridMask, const Covering& covering,
                             const StencilTemplate& tpl, const ExtensionOptions& options = {});

ExtendedField buildExtension(const std::function<double(double, double)>& f, const UniformGrid& grid,
                             const MembershipMask& gridMask, const Covering& covering,
                             const StencilTemplate& tpl, const ExtensionOptions& options = {});

namespace reference {
// Blends per node through shepardWeights instead of scattering per partition.
ExtendedField buildExtension(const std::vector<double>& gridSamples, const UniformGrid& grid,
                             const MembershipMask& gridMask, const Covering& covering,
                             const StencilTemplate& tpl, const ExtensionOptions& options = {});
}

}  // namespace pux
