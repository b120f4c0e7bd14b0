#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "mvgof/errors.hpp"
#include "mvgof/grid_io.hpp"
#include "mvgof/models.hpp"
#include "mvgof/simulate.hpp"

namespace mvgof {
namespace {

CoefficientModel ou(double theta, double sigma, double m0 = 0.0, double s0 = 1.0, double kappa = 0.0) {
  return build_model("mv-ou", {{"theta", theta}, {"kappa", kappa}, {"sigma", sigma}, {"m0", m0}, {"s0", s0}});
}

TEST(SimulateParticles, ShapeAndMetadata) {
  const auto grid = simulate_particles(ou(1, 1), 7, 20, 2.0, 99, 1);
  EXPECT_EQ(grid.particles(), 7u);
  EXPECT_EQ(grid.steps(), 20u);
  EXPECT_EQ(grid.columns(), 21u);
  EXPECT_EQ(grid.values().size(), 7u * 21u);
  EXPECT_NEAR(grid.delta() * 20, 2.0, 2.0 * 1e-12);
  EXPECT_EQ(grid.seed(), 99u);
  EXPECT_EQ(grid.model_name(), "mv-ou");
}

TEST(SimulateParticles, DegenerateDynamicsKeepInitialDraw) {
  const auto frozen = build_model("state-vol", {{"theta", 0}, {"lambda1", 0}, {"lambda2", 0}});
  const auto grid = simulate_particles(frozen, 10, 50, 1.0, 3, 1);
  for (std::size_t i = 0; i < grid.particles(); ++i) {
    for (std::size_t j = 1; j <= grid.steps(); ++j) EXPECT_EQ(grid.at(i, j), grid.at(i, 0));
  }
}

TEST(SimulateParticles, DeterministicAndThreadIndependent) {
  const auto model = build_model("mean-vol", {{"theta", 1}, {"sigma", 0.8}, {"c", 0.5}, {"m0", 0.3}});
  const auto a = simulate_particles(model, 9000, 30, 1.0, 17, 1);
  const auto b = simulate_particles(model, 9000, 30, 1.0, 17, 1);
  const auto c = simulate_particles(model, 9000, 30, 1.0, 17, 4);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a == c);
  const auto d = simulate_particles(model, 9000, 30, 1.0, 18, 1);
  EXPECT_FALSE(a == d);
}

TEST(SimulateParticles, DeterministicOdeLimit) {
  // sigma = 0, point-mass start at 1: Euler on x' = -x, exact value e^{-1}.
  const auto grid = simulate_particles(ou(1, 0, 1.0, 0.0), 4, 1000, 1.0, 1, 1);
  for (std::size_t i = 0; i < grid.particles(); ++i) {
    EXPECT_NEAR(grid.at(i, 1000), std::exp(-1.0), 5e-4);
  }
}

TEST(SimulateParticles, ReportsNegativeSquaredDiffusion) {
  CoefficientModel bad = ou(1, 1);
  bad.a2 = [](double x, const EmpiricalMeasure&) { return x; };
  try {
    simulate_particles(bad, 20, 10, 1.0, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoefficientEvaluation);
    EXPECT_NE(std::string(e.what()).find("particle"), std::string::npos);
  }
}

TEST(SimulateParticles, ReportsBlowup) {
  CoefficientModel explosive = ou(1, 1);
  explosive.drift = [](double x, const EmpiricalMeasure&) { return 1e300 * (1.0 + x * x); };
  try {
    simulate_particles(explosive, 5, 10, 1.0, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalBlowup);
  }
}

TEST(Subsample, IndexArithmetic) {
  const auto grid = simulate_particles(ou(1, 1), 3, 100, 1.0, 8, 1);
  EXPECT_TRUE(subsample(grid, 1) == grid);
  const auto coarse = subsample(grid, 10);
  EXPECT_EQ(coarse.steps(), 10u);
  EXPECT_NEAR(coarse.delta(), 10 * grid.delta(), 1e-15);
  EXPECT_EQ(coarse.seed(), grid.seed());
  EXPECT_EQ(coarse.model_name(), grid.model_name());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j <= 10; ++j) EXPECT_EQ(coarse.at(i, j), grid.at(i, 10 * j));
  }
  try {
    subsample(grid, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadFactor);
  }
}

TEST(Subsample, IncrementVarianceScalesWithFactor) {
  // Driftless sigma = 1: E|dX|^2 = delta exactly, so the ratio is 10.
  const auto model = ou(0, 1);
  double fine = 0.0, coarse = 0.0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto grid = simulate_particles(model, 20, 100, 1.0, 1000 + rep, 1);
    const auto sub = subsample(grid, 10);
    for (std::size_t i = 0; i < grid.particles(); ++i) {
      for (std::size_t j = 0; j < 100; ++j) fine += std::pow(grid.at(i, j + 1) - grid.at(i, j), 2) / 100;
      for (std::size_t j = 0; j < 10; ++j) coarse += std::pow(sub.at(i, j + 1) - sub.at(i, j), 2) / 10;
    }
  }
  EXPECT_NEAR(coarse / fine, 10.0, 1.5);
}

// Squared W2 between equal-weight samples of any sizes: integral of the squared
// gap between the two quantile functions over the merged breakpoints.
double w2_squared_any_size(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, k = 0;
  double u = 0.0, acc = 0.0;
  while (i < a.size() && k < b.size()) {
    const double next = std::min((i + 1) / na, (k + 1) / nb);
    acc += (next - u) * (a[i] - b[k]) * (a[i] - b[k]);
    u = next;
    if ((i + 1) / na <= next) ++i;
    if ((k + 1) / nb <= next) ++k;
  }
  return acc;
}

TEST(PropagationOfChaos, TerminalLawApproachesLargeSystem) {
  const auto model = ou(1, 1, 0.5, 1.0, 0.5);
  const auto reference = simulate_particles(model, 10000, 100, 1.0, 999999, 1).column(100);
  auto median_w2 = [&](std::size_t N) {
    std::vector<double> d;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
      d.push_back(w2_squared_any_size(simulate_particles(model, N, 100, 1.0, 5000 + rep, 1).column(100), reference));
    }
    std::sort(d.begin(), d.end());
    return 0.5 * (d[24] + d[25]);
  };
  EXPECT_LT(median_w2(400), median_w2(100));
}

TEST(PropagationOfChaos, QuantileW2MatchesSortedCoupling) {
  const std::vector<double> a = {0.0, 1.0, 3.0}, b = {0.5, -1.0, 2.0};
  const double expected = std::pow(wasserstein2(EmpiricalMeasure::from_samples(a), EmpiricalMeasure::from_samples(b)), 2);
  EXPECT_NEAR(w2_squared_any_size(a, b), expected, 1e-14);
  // Duplicating every atom leaves the measure unchanged.
  EXPECT_NEAR(w2_squared_any_size({0.0, 0.0, 1.0, 1.0, 3.0, 3.0}, b), expected, 1e-14);
}

TEST(GridIo, RoundTripIsExact) {
  const auto grid = simulate_particles(build_model("sin-vol", {{"theta", 1}, {"eta", 1}}), 6, 12, 0.75, 21, 1);
  const auto dir = std::filesystem::temp_directory_path() / "mvgof_grid_io_test";
  std::filesystem::create_directories(dir);
  write_grid(grid, dir / "panel");
  const auto back = read_grid(dir / "panel");
  EXPECT_TRUE(back == grid);
  std::filesystem::remove_all(dir);
}

TEST(GridIo, RejectsMalformedPanel) {
  const auto dir = std::filesystem::temp_directory_path() / "mvgof_grid_io_bad";
  std::filesystem::create_directories(dir);
  const auto grid = simulate_particles(ou(1, 1), 2, 3, 1.0, 1, 1);
  write_grid(grid, dir / "panel");
  {
    std::ofstream csv(dir / "panel.csv", std::ios::app);
    csv << "1,2,3,4\n";
  }
  try {
    read_grid(dir / "panel");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace mvgof
