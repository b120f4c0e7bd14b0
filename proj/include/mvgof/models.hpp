#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mvgof/measures.hpp"

namespace mvgof {

using ParamMap = std::map<std::string, double>;

/// Coefficient evaluated at a state x under the current empirical law.
using MeasureFunction = std::function<double(double x, const EmpiricalMeasure& mu)>;

/// Gaussian initial law N(mean, sd^2); sd == 0 gives a point mass.
struct InitialLaw {
  double mean = 0.0;
  double sd = 1.0;
};

/// Drift b(x, mu) and squared diffusion a^2(x, mu) of a McKean-Vlasov SDE
///   dX_t = b(X_t, mu_t) dt + a(X_t, mu_t) dW_t,  X_0 ~ mu_0.
///
/// Catalog entries are globally Lipschitz with linear growth on bounded
/// moment sets; user-built models are expected to satisfy the same (not
/// checked). Evaluators must depend on mu only through its sorted samples.
struct CoefficientModel {
  std::string name;
  ParamMap params;
  MeasureFunction drift;
  MeasureFunction a2;
  InitialLaw initial;
};

/// Catalog: "mv-ou", "state-vol", "mean-vol", "sin-vol".
/// Throws UnknownModel / InvalidParams.
CoefficientModel build_model(const std::string& name, const ParamMap& params);

std::vector<std::string> model_names();

struct BasisAtom {
  std::string name;
  MeasureFunction fn;
};

/// Ordered candidate family a_1^2, ..., a_d^2. The order fixes the index k
/// used by Gamma_k and Lambda_{k,l}.
class BasisFamily {
 public:
  /// Throws EmptyBasis.
  explicit BasisFamily(std::vector<BasisAtom> atoms);

  std::size_t size() const noexcept { return atoms_.size(); }
  const BasisAtom& atom(std::size_t k) const { return atoms_.at(k); }
  const std::vector<BasisAtom>& atoms() const noexcept { return atoms_; }

  /// Writes a_k^2(x, mu) for every k into out (size d).
  void evaluate(double x, const EmpiricalMeasure& mu, std::span<double> out) const;

 private:
  std::vector<BasisAtom> atoms_;
};

/// Atom catalog: const, x2, x4, expx (exp(beta*x), param "beta", default 1),
/// mean2, var. Throws UnknownAtom / EmptyBasis / InvalidParams.
BasisFamily build_basis(const std::vector<std::string>& names, const ParamMap& params = {});

/// Parses "const,x2" or "const,expx;beta=0.5".
BasisFamily parse_basis_spec(const std::string& spec);

}  // namespace mvgof
