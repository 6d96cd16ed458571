#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pux/fpoisson.hpp"
#include "pux/geometry.hpp"
#include "pux/lbie.hpp"
#include "pux/pux.hpp"
#include "pux/rbf.hpp"

namespace pux {

// Right-hand sides of the three built-in problems.
double builtinRHS(int id, double x, double y);
// Exact solutions u* with Laplace u* = builtinRHS.
double builtinExact(int id, double x, double y);

struct Problem {
  int manufactured = 1;          // 0: f = 0
  double harmonicAlpha = 0.0;    // adds alpha log|z - harmonicPoint| to u*
  Complex harmonicPoint{0.0, 0.0};

  double f(double x, double y) const;
  double exact(double x, double y) const;
};

struct SolveConfig {
  int schemaVersion = 1;
  int example = 1;
  BoundaryCurve outer;
  std::vector<BoundaryCurve> cavities;
  double L = 1.5;
  int Nu = 400;
  double Rp = 0.4;
  double epsilon = 2.0;
  double overlapFactor = 0.95;
  int M = 0;       // 0: heuristic
  int kTilde = 0;  // 0: heuristic
  std::vector<int> panelsPerCurve{32};
  std::vector<int> partitionsPerCurve{21};  // empty: derived from overlapFactor
  double betaTarget = 3.0;
  int oversampling = 4;
  bool factor2 = false;
  GmresSettings gmres;
  StabilizedPath stabilizer = StabilizedPath::Tsvd;
  int Neval = 1000;
  Problem problem;
  Exec exec = Exec::Parallel;

  void validate() const;
};

// Built-in geometry and parameters of example 1, 2 or 3.
SolveConfig exampleConfig(int id);

SolveConfig configFromJson(const std::string& text);
std::string configToJson(const SolveConfig& cfg);

struct StageTimes {
  double buildA = 0, localExtensions = 0, evaluateFe = 0, solveUP = 0, boundary = 0, density = 0, evaluate = 0;
};

struct ErrorReport {
  bool hasReference = false;
  double relativeL2 = 0.0;
  double maxRelative = 0.0;
  int Nu = 0, kTilde = 0, M = 0;
  double P = 0.0, betaMin = 0.0;
  std::string stencilPath;
  int gmresIterations = 0;
  StageTimes times;
};

// Evaluation grid of Neval^2 points over the box, pruned to the domain.
struct EvaluationGrid {
  std::vector<double> xs;
  std::vector<Complex> points;
  std::vector<std::uint8_t> inside;
  std::size_t insideCount() const;
};

EvaluationGrid makeEvaluationGrid(const SolveConfig& cfg);

struct SolveResult {
  EvaluationGrid eval;
  std::vector<double> u;  // on eval points, 0 where pruned
  ErrorReport report;
  std::vector<double> boundaryData;      // g at boundary nodes
  std::vector<double> modifiedData;      // g - u^P at boundary nodes
  LayerDensity density;
  double maxPartitionResidual = 0.0;
};

using StencilCache = std::map<std::string, std::shared_ptr<const StencilTemplate>>;

SolveResult solvePoisson(const SolveConfig& cfg, const EvaluationGrid* evalGrid = nullptr,
                         StencilCache* cache = nullptr);

// The extension stage alone: f^e on the uniform grid of the config.
struct ExtensionRun {
  UniformGrid grid;
  ExtendedField field;
  ErrorReport report;  // resolved parameters and stage times; no errors
};

ExtensionRun extendRhs(const SolveConfig& cfg, StencilCache* cache = nullptr);

struct Metrics {
  double relL2 = 0.0;
  double maxRel = 0.0;
};

Metrics errorMetrics(const std::vector<double>& numerical, const std::vector<double>& exact,
                     const std::vector<std::uint8_t>& mask);

// Least-squares slope of log(err) against log(Nu).
double fittedOrder(const std::vector<int>& Nu, const std::vector<double>& err);

struct StudyRow {
  ErrorReport report;
  double localOrder = 0.0;  // relative to the previous row, 0 for the first
};

enum class Reference { Manufactured, Self };

std::vector<StudyRow> convergenceStudy(const SolveConfig& base, const std::vector<int>& NuList,
                                       Reference reference = Reference::Manufactured,
                                       StencilCache* cache = nullptr);

std::string studyCsv(const std::vector<StudyRow>& rows, Reference reference);

}  // namespace pux
