#include "mvgof/models.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "mvgof/errors.hpp"

namespace mvgof {

namespace {

double require(const ParamMap& params, const std::string& model, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorKind::InvalidParams, "model '" + model + "' requires parameter '" + key + "'");
  }
  if (!std::isfinite(it->second)) {
    throw Error(ErrorKind::InvalidParams, "parameter '" + key + "' is not finite");
  }
  return it->second;
}

double require_nonneg(const ParamMap& params, const std::string& model, const std::string& key) {
  const double v = require(params, model, key);
  if (v < 0.0) throw Error(ErrorKind::InvalidParams, "parameter '" + key + "' must be >= 0");
  return v;
}

double optional(const ParamMap& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!std::isfinite(it->second)) {
    throw Error(ErrorKind::InvalidParams, "parameter '" + key + "' is not finite");
  }
  return it->second;
}

void reject_unknown(const ParamMap& params, const std::string& model,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : params) {
    if (!allowed.count(key)) {
      throw Error(ErrorKind::InvalidParams, "model '" + model + "' has no parameter '" + key + "'");
    }
  }
}

InitialLaw initial_law(const ParamMap& params) {
  InitialLaw law{optional(params, "m0", 0.0), optional(params, "s0", 1.0)};
  if (law.sd < 0.0) throw Error(ErrorKind::InvalidParams, "parameter 's0' must be >= 0");
  return law;
}

}  // namespace

std::vector<std::string> model_names() { return {"mv-ou", "state-vol", "mean-vol", "sin-vol"}; }

CoefficientModel build_model(const std::string& name, const ParamMap& params) {
  CoefficientModel m;
  m.name = name;
  m.params = params;

  if (name == "mv-ou") {
    reject_unknown(params, name, {"theta", "kappa", "sigma", "m0", "s0"});
    const double theta = require_nonneg(params, name, "theta");
    const double kappa = require(params, name, "kappa");
    const double sigma = require_nonneg(params, name, "sigma");
    const double s2 = sigma * sigma;
    m.drift = [theta, kappa](double x, const EmpiricalMeasure& mu) {
      return -theta * (x - kappa * mu.mean());
    };
    m.a2 = [s2](double, const EmpiricalMeasure&) { return s2; };
  } else if (name == "state-vol") {
    reject_unknown(params, name, {"theta", "lambda1", "lambda2", "m0", "s0"});
    const double theta = require_nonneg(params, name, "theta");
    const double l1 = require_nonneg(params, name, "lambda1");
    const double l2 = require_nonneg(params, name, "lambda2");
    m.drift = [theta](double x, const EmpiricalMeasure&) { return -theta * x; };
    m.a2 = [l1, l2](double x, const EmpiricalMeasure&) { return l1 + l2 * x * x; };
  } else if (name == "mean-vol") {
    // mean(mu)^2 is Lipschitz only on bounded-moment sets.
    reject_unknown(params, name, {"theta", "sigma", "c", "m0", "s0"});
    const double theta = require_nonneg(params, name, "theta");
    const double sigma = require_nonneg(params, name, "sigma");
    const double c = require_nonneg(params, name, "c");
    const double s2 = sigma * sigma;
    m.drift = [theta](double x, const EmpiricalMeasure& mu) { return -theta * (x - mu.mean()); };
    m.a2 = [s2, c](double, const EmpiricalMeasure& mu) {
      const double mean = mu.mean();
      return s2 * (1.0 + c * mean * mean);
    };
  } else if (name == "sin-vol") {
    reject_unknown(params, name, {"theta", "eta", "m0", "s0"});
    const double theta = require_nonneg(params, name, "theta");
    const double eta = require_nonneg(params, name, "eta");
    m.drift = [theta](double x, const EmpiricalMeasure&) { return -theta * x; };
    m.a2 = [eta](double x, const EmpiricalMeasure&) { return eta * (2.0 + std::sin(x)); };
  } else {
    throw Error(ErrorKind::UnknownModel, "no catalog model named '" + name + "'");
  }

  m.initial = initial_law(params);
  return m;
}

BasisFamily::BasisFamily(std::vector<BasisAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw Error(ErrorKind::EmptyBasis, "basis family needs at least one atom");
}

void BasisFamily::evaluate(double x, const EmpiricalMeasure& mu, std::span<double> out) const {
  for (std::size_t k = 0; k < atoms_.size(); ++k) out[k] = atoms_[k].fn(x, mu);
}

BasisFamily build_basis(const std::vector<std::string>& names, const ParamMap& params) {
  for (const auto& [key, value] : params) {
    if (key != "beta") throw Error(ErrorKind::InvalidParams, "unknown basis parameter '" + key + "'");
  }
  if (names.empty()) throw Error(ErrorKind::EmptyBasis, "basis family needs at least one atom");

  std::vector<BasisAtom> atoms;
  atoms.reserve(names.size());
  for (const auto& name : names) {
    if (name == "const") {
      atoms.push_back({name, [](double, const EmpiricalMeasure&) { return 1.0; }});
    } else if (name == "x2") {
      atoms.push_back({name, [](double x, const EmpiricalMeasure&) { return x * x; }});
    } else if (name == "x4") {
      atoms.push_back({name, [](double x, const EmpiricalMeasure&) { return x * x * x * x; }});
    } else if (name == "expx") {
      const double beta = optional(params, "beta", 1.0);
      atoms.push_back({name, [beta](double x, const EmpiricalMeasure&) { return std::exp(beta * x); }});
    } else if (name == "mean2") {
      atoms.push_back({name, [](double, const EmpiricalMeasure& mu) { return mu.mean() * mu.mean(); }});
    } else if (name == "var") {
      atoms.push_back({name, [](double, const EmpiricalMeasure& mu) { return mu.variance(); }});
    } else {
      throw Error(ErrorKind::UnknownAtom, "no basis atom named '" + name + "'");
    }
  }
  return BasisFamily(std::move(atoms));
}

BasisFamily parse_basis_spec(const std::string& spec) {
  std::string atoms_part = spec;
  ParamMap params;
  if (const auto semi = spec.find(';'); semi != std::string::npos) {
    atoms_part = spec.substr(0, semi);
    std::stringstream rest(spec.substr(semi + 1));
    std::string kv;
    while (std::getline(rest, kv, ';')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::InvalidParams, "malformed basis parameter '" + kv + "'");
      try {
        params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidParams, "malformed basis parameter '" + kv + "'");
      }
    }
  }
  std::vector<std::string> names;
  std::stringstream ss(atoms_part);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) names.push_back(name);
  }
  return build_basis(names, params);
}

}  // namespace mvgof
