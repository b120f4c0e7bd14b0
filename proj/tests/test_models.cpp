#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mvgof/errors.hpp"
#include "mvgof/measures.hpp"
#include "mvgof/models.hpp"

namespace mvgof {
namespace {

EmpiricalMeasure point(double x) { return EmpiricalMeasure::from_samples(std::vector<double>{x}); }

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

TEST(BuildModel, CatalogValues) {
  const auto ou = build_model("mv-ou", {{"theta", 1}, {"kappa", 0}, {"sigma", 1}, {"m0", 0}, {"s0", 1}});
  EXPECT_EQ(ou.a2(3.7, point(-2.0)), 1.0);
  EXPECT_EQ(ou.a2(-100.0, point(8.0)), 1.0);
  EXPECT_DOUBLE_EQ(ou.drift(2.0, point(5.0)), -2.0);

  const auto sv = build_model("state-vol", {{"theta", 1}, {"lambda1", 1}, {"lambda2", 0.5}});
  EXPECT_DOUBLE_EQ(sv.a2(2.0, point(0.0)), 3.0);

  const auto mv = build_model("mean-vol", {{"theta", 1}, {"sigma", 1}, {"c", 1}});
  EXPECT_DOUBLE_EQ(mv.a2(0.0, point(2.0)), 5.0);

  const auto sin_vol = build_model("sin-vol", {{"theta", 1}, {"eta", 1}});
  EXPECT_DOUBLE_EQ(sin_vol.a2(0.0, point(0.0)), 2.0);
  EXPECT_EQ(sin_vol.initial.mean, 0.0);
  EXPECT_EQ(sin_vol.initial.sd, 1.0);
}

TEST(BuildModel, Errors) {
  EXPECT_EQ(kind_of([] { build_model("heston", {}); }), ErrorKind::UnknownModel);
  EXPECT_EQ(kind_of([] { build_model("mv-ou", {{"theta", 1}, {"sigma", 1}}); }), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([] { build_model("mv-ou", {{"theta", 1}, {"kappa", 0}, {"sigma", -1}}); }),
            ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([] { build_model("state-vol", {{"theta", 1}, {"lambda1", 1}, {"lambda2", 0.5}, {"x", 1}}); }),
            ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of([] { build_model("sin-vol", {{"theta", 1}, {"eta", 1}, {"s0", -0.1}}); }),
            ErrorKind::InvalidParams);
}

TEST(BuildModel, LinearGrowthAndNonnegativity) {
  const std::vector<CoefficientModel> models = {
      build_model("mv-ou", {{"theta", 1}, {"kappa", 0.5}, {"sigma", 1}}),
      build_model("state-vol", {{"theta", 1}, {"lambda1", 1}, {"lambda2", 0.5}}),
      build_model("mean-vol", {{"theta", 1}, {"sigma", 1}, {"c", 1}}),
      build_model("sin-vol", {{"theta", 1}, {"eta", 1}}),
  };
  // |b| <= 1 + |x| + |mean| <= 2 + x^2 + m2 and a^2 <= 3 + 0.5 x^2 + m2 for
  // these parameters, so C = 6 bounds |b| + a^2 on the whole probe set.
  constexpr double C = 6.0;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  std::uniform_int_distribution<int> size(1, 100);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> samples(static_cast<std::size_t>(size(rng)));
    for (auto& s : samples) s = unif(rng);
    const auto mu = EmpiricalMeasure::from_samples(samples);
    const double x = unif(rng);
    for (const auto& m : models) {
      const double a2 = m.a2(x, mu);
      const double b = m.drift(x, mu);
      ASSERT_TRUE(std::isfinite(a2) && std::isfinite(b)) << m.name;
      EXPECT_GE(a2, 0.0) << m.name;
      EXPECT_LE(std::abs(b) + a2, C * (1.0 + x * x + moment(mu, 2))) << m.name;
    }
  }
}

TEST(BuildBasis, Atoms) {
  const auto c = build_basis({"const"});
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.atom(0).fn(-4.2, point(9.0)), 1.0);

  const auto cx = build_basis({"const", "x2"});
  EXPECT_EQ(cx.atom(1).fn(3.0, point(0.0)), 9.0);

  EXPECT_EQ(build_basis({"mean2"}).atom(0).fn(0.0, point(3.0)), 9.0);
  EXPECT_EQ(build_basis({"x4"}).atom(0).fn(2.0, point(0.0)), 16.0);
  EXPECT_DOUBLE_EQ(build_basis({"expx"}, {{"beta", 0.5}}).atom(0).fn(2.0, point(0.0)), std::exp(1.0));
  const auto two = EmpiricalMeasure::from_samples(std::vector<double>{1.0, 3.0});
  EXPECT_EQ(build_basis({"var"}).atom(0).fn(0.0, two), 1.0);
}

TEST(BuildBasis, Errors) {
  EXPECT_EQ(kind_of([] { build_basis({"const", "cubic"}); }), ErrorKind::UnknownAtom);
  EXPECT_EQ(kind_of([] { build_basis({}); }), ErrorKind::EmptyBasis);
  EXPECT_EQ(kind_of([] { BasisFamily(std::vector<BasisAtom>{}); }), ErrorKind::EmptyBasis);
  EXPECT_EQ(kind_of([] { parse_basis_spec(""); }), ErrorKind::EmptyBasis);
  EXPECT_EQ(kind_of([] { parse_basis_spec("expx;gamma=2"); }), ErrorKind::InvalidParams);
}

TEST(BuildBasis, ParseSpec) {
  const auto b = parse_basis_spec("const,expx;beta=0.25");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.atom(0).name, "const");
  EXPECT_DOUBLE_EQ(b.atom(1).fn(4.0, point(0.0)), std::exp(1.0));
}

TEST(BuildBasis, DependsOnMeasureOnlyThroughSortedSamples) {
  const auto basis = build_basis({"const", "x2", "x4", "expx", "mean2", "var"});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + trial * 3);
    for (auto& s : v) s = 3.0 * normal(rng);
    const auto a = EmpiricalMeasure::from_samples(v);
    std::shuffle(v.begin(), v.end(), rng);
    const auto b = EmpiricalMeasure::from_samples(v);
    std::vector<double> ea(basis.size()), eb(basis.size());
    const double x = normal(rng);
    basis.evaluate(x, a, ea);
    basis.evaluate(x, b, eb);
    EXPECT_EQ(ea, eb);
  }
}

}  // namespace
}  // namespace mvgof
