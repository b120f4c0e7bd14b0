#pragma once

namespace mvgof {

/// Standard normal CDF, Phi(x) = erfc(-x / sqrt 2) / 2. glibc's erfc is
/// accurate to a few ulp, well inside 1e-12 absolute.
double normal_cdf(double x) noexcept;

/// z with normal_cdf(z) == p to 1e-12, by bisection on normal_cdf.
/// p must lie in (0, 1).
double normal_quantile(double p);

}  // namespace mvgof
