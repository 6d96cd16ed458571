#pragma once

#include <vector>

#include "pux/common.hpp"

namespace pux {

// Uniform grid on B = [-L, L]^2; node (i, j) sits at (-L + i h, -L + j h) and is
// stored at index j * Nu + i.
struct UniformGrid {
  double L = 1.0;
  int Nu = 2;

  UniformGrid() = default;
  UniformGrid(double L_, int Nu_) : L(L_), Nu(Nu_) {
    if (Nu < 2) throw Error(ErrorKind::Config, "grid needs Nu >= 2");
    if (!(L > 0.0)) throw Error(ErrorKind::Config, "grid needs L > 0");
  }
  double h() const { return 2.0 * L / Nu; }
  double coord(int i) const { return -L + i * h(); }
  Complex node(int i, int j) const { return {coord(i), coord(j)}; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * Nu + i; }
  std::size_t size() const { return static_cast<std::size_t>(Nu) * Nu; }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < Nu && j < Nu; }
  std::vector<Complex> nodes() const;
};

}  // namespace pux
