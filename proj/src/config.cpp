#include <json.hpp>

#include "pux/harness.hpp"

namespace pux {

using nlohmann::json;

namespace {

BoundaryCurve curveFromJson(const json& j) {
  BoundaryCurve c;
  c.c0 = j.value("c0", 1.0);
  c.R = j.value("R", 1.0);
  c.n = j.value("n", 1);
  if (j.contains("cos"))
    for (const auto& [k, v] : j.at("cos").items()) c.cosCoeffs[std::stoi(k)] = v.get<double>();
  if (j.contains("sin"))
    for (const auto& [k, v] : j.at("sin").items()) c.sinCoeffs[std::stoi(k)] = v.get<double>();
  if (j.contains("offset")) {
    const auto& o = j.at("offset");
    c.offset = {o.at(0).get<double>(), o.at(1).get<double>()};
  }
  return c;
}

json curveToJson(const BoundaryCurve& c) {
  json j;
  j["c0"] = c.c0;
  j["R"] = c.R;
  j["n"] = c.n;
  j["cos"] = json::object();
  j["sin"] = json::object();
  for (const auto& [k, v] : c.cosCoeffs) j["cos"][std::to_string(k)] = v;
  for (const auto& [k, v] : c.sinCoeffs) j["sin"][std::to_string(k)] = v;
  j["offset"] = {c.offset.real(), c.offset.imag()};
  return j;
}

int autoOrInt(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "auto") return 0;
    throw Error(ErrorKind::Config, "expected an integer or \"auto\"");
  }
  return j.get<int>();
}

}  // namespace

SolveConfig configFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (!j.contains("schemaVersion")) throw Error(ErrorKind::Config, "config is missing schemaVersion");
    const int example = j.value("example", 0);
    SolveConfig c = example ? exampleConfig(example) : SolveConfig{};
    c.example = example;
    c.schemaVersion = j.at("schemaVersion").get<int>();
    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      c.outer = curveFromJson(d.at("outer"));
      c.cavities.clear();
      for (const auto& cj : d.value("cavities", json::array())) c.cavities.push_back(curveFromJson(cj));
    }
    c.L = j.value("L", c.L);
    c.Nu = j.value("Nu", c.Nu);
    c.Rp = j.value("Rp", c.Rp);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.overlapFactor = j.value("overlapFactor", c.overlapFactor);
    if (j.contains("M")) c.M = autoOrInt(j.at("M"));
    if (j.contains("kTilde")) c.kTilde = autoOrInt(j.at("kTilde"));
    if (j.contains("panelsPerCurve")) c.panelsPerCurve = j.at("panelsPerCurve").get<std::vector<int>>();
    if (j.contains("partitionsPerCurve")) {
      const auto& p = j.at("partitionsPerCurve");
      c.partitionsPerCurve = p.is_string() ? std::vector<int>{} : p.get<std::vector<int>>();
    }
    c.betaTarget = j.value("betaTarget", c.betaTarget);
    c.oversampling = j.value("oversampling", c.oversampling);
    c.factor2 = j.value("factor2", c.factor2);
    if (j.contains("gmres")) {
      c.gmres.tol = j.at("gmres").value("tol", c.gmres.tol);
      c.gmres.maxIter = j.at("gmres").value("maxIter", c.gmres.maxIter);
    }
    if (j.contains("stabilizer")) {
      const auto s = j.at("stabilizer").get<std::string>();
      if (s == "tsvd") c.stabilizer = StabilizedPath::Tsvd;
      else if (s == "extended") c.stabilizer = StabilizedPath::Extended;
      else throw Error(ErrorKind::Config, "stabilizer must be \"tsvd\" or \"extended\"");
    }
    c.Neval = j.value("Neval", c.Neval);
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      c.problem.manufactured = p.value("manufactured", c.problem.manufactured);
      if (p.contains("harmonic")) {
        const auto& hh = p.at("harmonic");
        c.problem.harmonicAlpha = hh.value("alpha", 0.0);
        const auto& pt = hh.at("point");
        c.problem.harmonicPoint = {pt.at(0).get<double>(), pt.at(1).get<double>()};
      }
    }
    if (j.contains("exec")) c.exec = j.at("exec").get<std::string>() == "serial" ? Exec::Serial : Exec::Parallel;
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
}

std::string configToJson(const SolveConfig& c) {
  json j;
  j["schemaVersion"] = c.schemaVersion;
  j["example"] = c.example;
  j["domain"]["outer"] = curveToJson(c.outer);
  j["domain"]["cavities"] = json::array();
  for (const auto& cv : c.cavities) j["domain"]["cavities"].push_back(curveToJson(cv));
  j["L"] = c.L;
  j["Nu"] = c.Nu;
  j["Rp"] = c.Rp;
  j["epsilon"] = c.epsilon;
  j["overlapFactor"] = c.overlapFactor;
  j["M"] = c.M ? json(c.M) : json("auto");
  j["kTilde"] = c.kTilde ? json(c.kTilde) : json("auto");
  j["panelsPerCurve"] = c.panelsPerCurve;
  j["partitionsPerCurve"] = c.partitionsPerCurve.empty() ? json("auto") : json(c.partitionsPerCurve);
  j["betaTarget"] = c.betaTarget;
  j["oversampling"] = c.oversampling;
  j["factor2"] = c.factor2;
  j["gmres"] = {{"tol", c.gmres.tol}, {"maxIter", c.gmres.maxIter}};
  j["stabilizer"] = c.stabilizer == StabilizedPath::Tsvd ? "tsvd" : "extended";
  j["Neval"] = c.Neval;
  j["problem"]["manufactured"] = c.problem.manufactured;
  if (c.problem.harmonicAlpha != 0.0)
    j["problem"]["harmonic"] = {{"alpha", c.problem.harmonicAlpha},
                                {"point", {c.problem.harmonicPoint.real(), c.problem.harmonicPoint.imag()}}};
  j["exec"] = c.exec == Exec::Serial ? "serial" : "parallel";
  return j.dump(2);
}

}  // namespace pux
