#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mvgof {

/// Equal-weight empirical probability measure on the real line.
///
/// Atoms are sorted once at construction; every functional (mean, variance,
/// moments, W2) sums over the sorted atoms, so results depend only on the
/// multiset of samples and not on the order they were supplied in.
class EmpiricalMeasure {
 public:
  /// Throws EmptySample / NonFiniteInput.
  static EmpiricalMeasure from_samples(std::span<const double> values);

  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }

  double mean() const noexcept { return mean_; }
  /// Population variance (divisor N).
  double variance() const noexcept { return variance_; }

 private:
  explicit EmpiricalMeasure(std::vector<double> sorted);

  std::vector<double> samples_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// Quadratic Wasserstein distance between two equal-size measures, via the
/// order-statistic coupling. Throws SizeMismatch.
double wasserstein2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// (1/N) sum |x_i|^p, p >= 1.
double moment(const EmpiricalMeasure& mu, int p);

}  // namespace mvgof
