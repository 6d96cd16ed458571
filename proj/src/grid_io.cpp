#include "pux/grid_io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>

namespace pux {

const char* toString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AmbiguousPoint: return "AmbiguousPoint";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularBasis: return "SingularBasis";
    case ErrorKind::Underdetermined: return "Underdetermined";
    case ErrorKind::SnapFailure: return "SnapFailure";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::NotCovered: return "NotCovered";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OnPanel: return "OnPanel";
    case ErrorKind::OutOfBox: return "OutOfBox";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

const char* toString(Provenance p) {
  switch (p) {
    case Provenance::OriginalInsideOmega: return "inside";
    case Provenance::Extended: return "extended";
    case Provenance::Zero: return "zero";
  }
  return "?";
}

std::uint64_t gridChecksum(const std::vector<double>& values) {
  std::uint64_t hsh = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  for (std::size_t i = 0; i < values.size() * sizeof(double); ++i) {
    hsh ^= bytes[i];
    hsh *= 1099511628211ULL;
  }
  return hsh;
}

void writeGridBinary(const std::string& path, const UniformGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) throw Error(ErrorKind::Config, "grid value count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
  const std::int64_t nu = grid.Nu;
  const std::uint64_t sum = gridChecksum(values);
  out.write(reinterpret_cast<const char*>(&nu), 8);
  out.write(reinterpret_cast<const char*>(&grid.L), 8);
  out.write(reinterpret_cast<const char*>(&sum), 8);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
}

std::vector<double> readGridBinary(const std::string& path, UniformGrid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot read " + path);
  std::int64_t nu = 0;
  double L = 0;
  std::uint64_t sum = 0;
  in.read(reinterpret_cast<char*>(&nu), 8);
  in.read(reinterpret_cast<char*>(&L), 8);
  in.read(reinterpret_cast<char*>(&sum), 8);
  grid = UniformGrid(L, static_cast<int>(nu));
  std::vector<double> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
  if (!in || gridChecksum(values) != sum) throw Error(ErrorKind::Config, "corrupt grid file " + path);
  return values;
}

void writeFieldCsv(const std::string& path, const ExtendedField& fe) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
  out << "x,y,value,provenance\n" << std::setprecision(17);
  const auto& g = fe.grid;
  for (int j = 0; j < g.Nu; ++j)
    for (int i = 0; i < g.Nu; ++i) {
      const std::size_t k = g.index(i, j);
      out << g.coord(i) << ',' << g.coord(j) << ',' << fe.values[k] << ',' << toString(fe.provenance[k]) << '\n';
    }
}

}  // namespace pux
