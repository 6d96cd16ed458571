#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pux {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Selects the reference loop or the OpenMP kernel for data-parallel work.
enum class Exec { Serial, Parallel };

enum class ErrorKind {
  AmbiguousPoint,
  InsufficientData,
  SingularBasis,
  Underdetermined,
  SnapFailure,
  CoverageGap,
  NotCovered,
  NoConvergence,
  OnPanel,
  OutOfBox,
  UnknownId,
  EmptyMask,
  Config,
};

const char* toString(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, long partition = -1)
      : std::runtime_error(what), kind_(kind), partition_(partition) {}

  ErrorKind kind() const { return kind_; }
  // Index of the failing partition, or -1 when not applicable.
  long partition() const { return partition_; }
  const std::string& stage() const { return stage_; }
  void setStage(std::string s) { stage_ = std::move(s); }

 private:
  ErrorKind kind_;
  long partition_;
  std::string stage_;
};

}  // namespace pux
