// mvgof: simulate McKean-Vlasov particle panels and test volatility specifications.
//
// Exit codes: 0 success, 1 usage error, 2 data/config error, 3 numerical degeneracy.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "mvgof/errors.hpp"
#include "mvgof/experiments.hpp"
#include "mvgof/gof.hpp"
#include "mvgof/grid_io.hpp"
#include "mvgof/oracle.hpp"
#include "mvgof/parallel.hpp"
#include "mvgof/rng.hpp"
#include "mvgof/simulate.hpp"

namespace {

using namespace mvgof;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

int cmd_simulate(const std::string& config_path, const std::string& out_prefix) {
  const auto config = load_config(config_path);
  const auto grid = simulate_particles(config.model(), config.particles, config.steps, config.horizon,
                                       config.base_seed);
  write_grid(grid, out_prefix);
  return 0;
}

int cmd_test(const std::string& data_prefix, const std::string& basis_spec, double alpha, const std::string& mode,
             std::optional<double> delta, const std::string& out_path) {
  const auto grid = read_grid(data_prefix);
  const auto basis = parse_basis_spec(basis_spec);
  const auto report = run_test(grid, basis, alpha, parse_test_mode(mode), delta);
  if (report.diagnostics.rate_warning) {
    std::cerr << "warning: N*delta^2 = "
              << static_cast<double>(report.diagnostics.particles) * report.diagnostics.delta *
                     report.diagnostics.delta
              << " > 1; asymptotic regime N*delta^2 -> 0 is doubtful\n";
  }
  write_text(out_path, report_to_json(report));
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  const auto config = load_config(config_path);
  const auto result = run_experiment(config);
  std::filesystem::create_directories(out_dir);
  write_replications_csv(result, std::filesystem::path(out_dir) / "replications.csv");
  write_text(std::filesystem::path(out_dir) / "aggregate.json", aggregate_to_json(config, result));
  return 0;
}

// Hidden validation checks; each prints one line and fails with exit 3.
int cmd_oracle(const std::string& check, const std::string& config_path, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  bool pass = true;
  if (check == "w2") {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t size = 1 + trial % 8;
      std::vector<double> a(size), b(size);
      for (auto& v : a) v = unif(rng);
      for (auto& v : b) v = unif(rng);
      const auto mu = EmpiricalMeasure::from_samples(a);
      const auto nu = EmpiricalMeasure::from_samples(b);
      worst = std::max(worst, std::abs(wasserstein2(mu, nu) - oracle::w2_bruteforce(mu, nu)));
    }
    pass = worst <= 1e-12;
    std::cout << "w2: max |sorted - bruteforce| = " << worst << (pass ? " PASS" : " FAIL") << '\n';
  } else if (check == "grad") {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index d = 1 + trial % 3;
      const Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return unif(rng); });
      const Eigen::MatrixXd lambda = A * A.transpose() + Eigen::MatrixXd::Identity(d, d);
      const Eigen::VectorXd gamma = Eigen::VectorXd::NullaryExpr(d, [&] { return unif(rng); });
      const double B = 5.0 + unif(rng);
      const auto exact = grad_g(gamma, B, lambda);
      const auto fd = oracle::grad_fd(gamma, B, lambda, 1e-6);
      worst = std::max(worst, (exact - fd).norm() / std::max(1.0, exact.norm()));
    }
    pass = worst <= 1e-6;
    std::cout << "grad: max relative error = " << worst << (pass ? " PASS" : " FAIL") << '\n';
  } else if (check == "reference" || check == "scaling") {
    if (config_path.empty()) throw CLI::ValidationError("--config", "required for this check");
    const auto config = load_config(config_path);
    const auto model = config.model();
    if (check == "reference") {
      const auto spec = config.reference.value_or(ReferenceSpec{});
      const auto ref = oracle::reference_distance(model, config.basis(), spec.particles, spec.steps, spec.seed,
                                                  config.horizon);
      std::cout << "reference: L_ref = " << format_double(ref.L_ref) << " B_ref = " << format_double(ref.B_ref)
                << " G_ref = " << format_double(ref.L_ref / ref.B_ref) << '\n';
    } else {
      for (int p : {2, 4}) {
        const double slope = oracle::moment_scaling_check(model, p, {100, 200, 400, 800},
                                                          {config.particles, config.horizon, config.base_seed});
        const bool ok = std::abs(slope - p / 2.0) <= (p == 2 ? 0.15 : 0.2);
        pass = pass && ok;
        std::cout << "scaling p=" << p << ": slope = " << slope << (ok ? " PASS" : " FAIL") << '\n';
      }
    }
  } else {
    throw CLI::ValidationError("check", "unknown oracle check '" + check + "' (w2, grad, reference, scaling)");
  }
  return pass ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"McKean-Vlasov particle simulation and volatility goodness-of-fit testing"};
  app.require_subcommand(1);

  std::string config_path, out, data, basis_spec = "const", mode = "absolute", check;
  double alpha = 0.05;
  std::optional<double> delta;
  std::uint64_t oracle_seed = 1;

  auto* sim = app.add_subcommand("simulate", "Simulate one particle panel (CSV + JSON sidecar)");
  sim->add_option("--config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output prefix")->required();

  auto* test = app.add_subcommand("test", "Run the goodness-of-fit test on a stored panel");
  test->add_option("--data", data, "Panel prefix (PREFIX.csv + PREFIX.json)")->required();
  test->add_option("--basis", basis_spec, "Basis atoms, e.g. const,x2 or const,expx;beta=0.5")->required();
  test->add_option("--alpha", alpha, "Significance level")->required();
  test->add_option("--mode", mode, "absolute | relative")->check(CLI::IsMember({"absolute", "relative"}));
  test->add_option("--delta", delta, "Relative-mode threshold in (0, 1)");
  test->add_option("--out", out, "Report JSON path")->required();

  auto* exp = app.add_subcommand("experiment", "Monte Carlo size/power study");
  exp->add_option("--config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  exp->add_option("--out", out, "Output directory")->required();

  auto* orc = app.add_subcommand("oracle", "Run a named oracle validation");
  orc->group("");
  orc->add_option("check", check, "w2 | grad | reference | scaling")->required();
  orc->add_option("--config", config_path, "Config JSON for reference/scaling");
  orc->add_option("--seed", oracle_seed, "Seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(config_path, out);
    if (*test) return cmd_test(data, basis_spec, alpha, mode, delta, out);
    if (*exp) return cmd_experiment(config_path, out);
    if (*orc) return cmd_oracle(check, config_path, oracle_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical(e.kind()) ? kExitNumerical : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
