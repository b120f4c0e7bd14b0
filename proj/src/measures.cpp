#include "mvgof/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvgof/errors.hpp"

namespace mvgof {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> sorted) : samples_(std::move(sorted)) {
  const double n = static_cast<double>(samples_.size());
  double sum = 0.0;
  for (double x : samples_) sum += x;
  mean_ = sum / n;
  double ss = 0.0;
  for (double x : samples_) ss += (x - mean_) * (x - mean_);
  variance_ = ss / n;
}

EmpiricalMeasure EmpiricalMeasure::from_samples(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "empirical measure needs at least one sample");
  std::vector<double> sorted(values.begin(), values.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!std::isfinite(sorted[i])) {
      throw Error(ErrorKind::NonFiniteInput, "sample " + std::to_string(i) + " is not finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  return EmpiricalMeasure(std::move(sorted));
}

double wasserstein2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() != nu.size()) {
    throw Error(ErrorKind::SizeMismatch, "wasserstein2 needs equal-size measures (" +
                                             std::to_string(mu.size()) + " vs " +
                                             std::to_string(nu.size()) + ")");
  }
  const auto x = mu.samples();
  const auto y = nu.samples();
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

double moment(const EmpiricalMeasure& mu, int p) {
  if (p < 1) throw Error(ErrorKind::InvalidArgument, "moment order must be >= 1");
  double acc = 0.0;
  for (double x : mu.samples()) {
    const double a = std::abs(x);
    double v = a;
    for (int k = 1; k < p; ++k) v *= a;
    acc += v;
  }
  return acc / static_cast<double>(mu.size());
}

}  // namespace mvgof
