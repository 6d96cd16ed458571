// Command line front end: extend, solve, convergence, classify.
// Exit codes: 0 success, 2 configuration error, 3 numerical-stage failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pux/grid_io.hpp"
#include "pux/harness.hpp"

using namespace pux;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  int example = 0;
  int nu = 0;
  double rp = 0.0;
  std::string out = ".";
};

void addCommon(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--example", c.example, "built-in example")->check(CLI::Range(1, 3));
  sub->add_option("--nu", c.nu, "grid points per side (N_u)");
  sub->add_option("--rp", c.rp, "partition radius R_p");
  sub->add_option("--out", c.out, "output directory");
}

SolveConfig resolve(const Common& c) {
  SolveConfig cfg;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = configFromJson(ss.str());
  } else {
    cfg = exampleConfig(c.example ? c.example : 1);
  }
  if (c.example && !c.config.empty()) {
    // An explicit example replaces the geometry and its tuned parameters.
    const SolveConfig ex = exampleConfig(c.example);
    cfg.example = c.example;
    cfg.outer = ex.outer;
    cfg.cavities = ex.cavities;
    cfg.L = ex.L;
    cfg.Rp = ex.Rp;
    cfg.panelsPerCurve = ex.panelsPerCurve;
    cfg.partitionsPerCurve = ex.partitionsPerCurve;
    cfg.problem.manufactured = ex.problem.manufactured;
  }
  if (c.nu) cfg.Nu = c.nu;
  if (c.rp > 0) cfg.Rp = c.rp;
  cfg.validate();
  fs::create_directories(c.out);
  return cfg;
}

std::string path(const Common& c, const std::string& name) { return (fs::path(c.out) / name).string(); }

void writeText(const std::string& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + file);
  out << text;
}

void printReport(const ErrorReport& e) {
  std::cout << "N_u " << e.Nu << "  P " << e.P << "  kTilde " << e.kTilde << "  M " << e.M << "  betaMin " << e.betaMin
            << "  stencil " << e.stencilPath << "\n";
  const auto& t = e.times;
  std::cout << "times [s]: A " << t.buildA << "  local extensions " << t.localExtensions << "  f^e " << t.evaluateFe
            << "  u^P " << t.solveUP << "  boundary " << t.boundary << "  density " << t.density << "  evaluation "
            << t.evaluate << "\n";
  if (e.gmresIterations) std::cout << "GMRES iterations " << e.gmresIterations << "\n";
  if (e.hasReference) std::cout << "relative l2 " << e.relativeL2 << "  max relative " << e.maxRelative << "\n";
}

void writeEvalCsv(const std::string& file, const EvaluationGrid& eg, const std::vector<double>* u) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + file);
  out << std::setprecision(17) << "x,y,inside" << (u ? ",u" : "") << "\n";
  for (std::size_t i = 0; i < eg.points.size(); ++i) {
    out << eg.points[i].real() << ',' << eg.points[i].imag() << ',' << int(eg.inside[i]);
    if (u) out << ',' << (*u)[i];
    out << "\n";
  }
}

void runExtend(const Common& c) {
  const SolveConfig cfg = resolve(c);
  const ExtensionRun run = extendRhs(cfg);
  writeGridBinary(path(c, "fe.bin"), run.grid, run.field.values);
  writeFieldCsv(path(c, "fe.csv"), run.field);
  printReport(run.report);
  std::cout << "wrote " << path(c, "fe.bin") << " and " << path(c, "fe.csv") << "\n";
}

void runSolve(const Common& c) {
  const SolveConfig cfg = resolve(c);
  const SolveResult r = solvePoisson(cfg);
  writeEvalCsv(path(c, "solution.csv"), r.eval, &r.u);
  writeText(path(c, "config.json"), configToJson(cfg) + "\n");
  if (r.report.hasReference) writeText(path(c, "metrics.csv"), studyCsv({{r.report, 0.0}}, Reference::Manufactured));
  printReport(r.report);
}

void runConvergence(const Common& c, std::vector<int> list, bool self) {
  const SolveConfig cfg = resolve(c);
  if (list.empty()) list = {100, 150, 200, 250, 300, 350, 400};
  const Reference ref = self ? Reference::Self : Reference::Manufactured;
  StencilCache cache;
  const auto rows = convergenceStudy(cfg, list, ref, &cache);
  const std::string csv = studyCsv(rows, ref);
  writeText(path(c, "convergence.csv"), csv);
  std::cout << csv;
  std::vector<int> nu;
  std::vector<double> err;
  for (const auto& r : rows)
    if (r.report.relativeL2 > 0) {
      nu.push_back(r.report.Nu);
      err.push_back(r.report.relativeL2);
    }
  if (nu.size() >= 2) std::cout << "fitted order " << fittedOrder(nu, err) << "\n";
}

void runClassify(const Common& c) {
  const SolveConfig cfg = resolve(c);
  const EvaluationGrid eg = makeEvaluationGrid(cfg);
  writeEvalCsv(path(c, "classification.csv"), eg, nullptr);
  std::cout << eg.insideCount() << " of " << eg.points.size() << " evaluation points inside\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PUX Poisson solver"};
  app.require_subcommand(1);
  Common common;
  std::vector<int> nuList;
  bool self = false;

  auto* ext = app.add_subcommand("extend", "extend the right-hand side to the box and write f^e");
  auto* sol = app.add_subcommand("solve", "solve the Poisson problem on the evaluation grid");
  auto* conv = app.add_subcommand("convergence", "run a convergence study over N_u");
  auto* cls = app.add_subcommand("classify", "classify the evaluation grid against the domain");
  for (auto* s : {ext, sol, conv, cls}) addCommon(s, common);
  conv->add_option("--nu-list", nuList, "N_u values of the study")->delimiter(',');
  conv->add_flag("--self", self, "use the finest grid as reference");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*ext) runExtend(common);
    if (*sol) runSolve(common);
    if (*conv) runConvergence(common, nuList, self);
    if (*cls) runClassify(common);
  } catch (const Error& e) {
    std::cerr << "error: " << toString(e.kind());
    if (!e.stage().empty()) std::cerr << " in " << e.stage();
    std::cerr << ": " << e.what() << "\n";
    const bool config = e.kind() == ErrorKind::Config || e.kind() == ErrorKind::UnknownId;
    return config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
