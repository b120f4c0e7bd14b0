#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mvgof/errors.hpp"
#include "mvgof/measures.hpp"
#include "mvgof/oracle.hpp"
#include "mvgof/rng.hpp"

namespace mvgof {
namespace {

EmpiricalMeasure make(std::vector<double> v) { return EmpiricalMeasure::from_samples(v); }

TEST(EmpiricalMeasure, SortsSamples) {
  const auto mu = make({3, 1, 2});
  ASSERT_EQ(mu.size(), 3u);
  EXPECT_EQ(std::vector<double>(mu.samples().begin(), mu.samples().end()), (std::vector<double>{1, 2, 3}));
}

TEST(EmpiricalMeasure, SinglePointAndCoincidentAtoms) {
  const auto one = make({5});
  EXPECT_EQ(one.size(), 1u);
  EXPECT_EQ(one.samples()[0], 5.0);

  const auto zeros = make({0, 0, 0});
  EXPECT_EQ(zeros.size(), 3u);
  EXPECT_EQ(zeros.variance(), 0.0);
}

TEST(EmpiricalMeasure, RejectsEmptyAndNonFinite) {
  try {
    make({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySample);
  }
  for (double bad : {NAN, INFINITY, -INFINITY}) {
    try {
      make({1.0, bad});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NonFiniteInput);
    }
  }
}

TEST(Wasserstein2, BasicValues) {
  const auto mu = make({0.3, -1.2, 4.0});
  EXPECT_EQ(wasserstein2(mu, mu), 0.0);
  EXPECT_DOUBLE_EQ(wasserstein2(make({2.5}), make({-1.0})), 3.5);
  // Brute force over both couplings: min(0.25 + 1, 4 + 0.25) / 2 = 0.625.
  EXPECT_NEAR(wasserstein2(make({0, 1}), make({0.5, 2})), std::sqrt(0.625), 1e-15);
  EXPECT_NEAR(wasserstein2(make({0, 1}), make({0.5, 2})), 0.7905694150420949, 1e-15);
}

TEST(Wasserstein2, SizeMismatch) {
  try {
    wasserstein2(make({1, 2}), make({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeMismatch);
  }
}

TEST(Wasserstein2, MetricProperties) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 40;
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = normal(rng);
      b[i] = 2.0 * normal(rng) + 1.0;
      c[i] = normal(rng) - 3.0;
    }
    const auto mu = make(a), nu = make(b), rho = make(c);
    EXPECT_LE(wasserstein2(mu, rho), wasserstein2(mu, nu) + wasserstein2(nu, rho) + 1e-12);
    EXPECT_EQ(wasserstein2(mu, nu), wasserstein2(nu, mu));

    const double shift = normal(rng) * 5.0;
    auto as = a, bs = b;
    for (auto& v : as) v += shift;
    for (auto& v : bs) v += shift;
    EXPECT_NEAR(wasserstein2(make(as), make(bs)), wasserstein2(mu, nu), 1e-12);
  }
}

TEST(Wasserstein2, MatchesPermutationOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = unif(rng);
    for (auto& v : b) v = unif(rng);
    const auto mu = make(a), nu = make(b);
    EXPECT_NEAR(wasserstein2(mu, nu), oracle::w2_bruteforce(mu, nu), 1e-12);
  }
}

TEST(Moment, Arithmetic) {
  EXPECT_DOUBLE_EQ(moment(make({1, 2, 3}), 2), 14.0 / 3.0);
  EXPECT_EQ(moment(make({0, 0, 0, 0}), 1), 0.0);
  EXPECT_DOUBLE_EQ(moment(make({-2, 2}), 3), 8.0);
}

TEST(Moment, GaussianSecondMoment) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = normal_at(2024, i, 0, Stream::Increment);
  EXPECT_NEAR(moment(make(v), 2), 1.0, 0.02);
}

TEST(EmpiricalMeasure, FunctionalsIgnoreInputOrder) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> v(257);
  for (auto& x : v) x = normal(rng);
  const auto a = make(v);
  std::shuffle(v.begin(), v.end(), rng);
  const auto b = make(v);
  EXPECT_EQ(a.mean(), b.mean());
  EXPECT_EQ(a.variance(), b.variance());
  EXPECT_EQ(moment(a, 4), moment(b, 4));
}

}  // namespace
}  // namespace mvgof
