#pragma once

#include <string>
#include <vector>

#include "pux/pux.hpp"

namespace pux {

// Binary grid file: int64 Nu, float64 L, uint64 checksum (FNV-1a over the value
// bytes), then Nu*Nu little-endian float64 values in row-major order (row j holds
// y = -L + j h).
void writeGridBinary(const std::string& path, const UniformGrid& grid, const std::vector<double>& values);
std::vector<double> readGridBinary(const std::string& path, UniformGrid& grid);

std::uint64_t gridChecksum(const std::vector<double>& values);

// CSV with columns x, y, value, provenance.
void writeFieldCsv(const std::string& path, const ExtendedField& fe);

const char* toString(Provenance p);

}  // namespace pux
