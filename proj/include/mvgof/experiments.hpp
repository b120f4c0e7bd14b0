#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvgof/gof.hpp"
#include "mvgof/models.hpp"
#include "mvgof/oracle.hpp"

namespace mvgof {

inline constexpr int kConfigSchemaVersion = 1;

struct ReferenceSpec {
  std::size_t particles = 10000;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
};

/// One Monte Carlo study. Replication r uses seed base_seed + r.
struct ExperimentConfig {
  std::string model_name;
  ParamMap model_params;
  std::vector<std::string> basis_atoms;
  ParamMap basis_params;
  std::size_t particles = 0;
  std::size_t steps = 0;
  double horizon = 1.0;
  double alpha = 0.05;
  TestMode mode = TestMode::Absolute;
  std::optional<double> delta_threshold;
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  std::optional<ReferenceSpec> reference;

  CoefficientModel model() const { return build_model(model_name, model_params); }
  BasisFamily basis() const { return build_basis(basis_atoms, basis_params); }
};

/// Parses the versioned JSON config. Unknown keys, a missing or wrong
/// schema_version, and invalid sub-specs all raise ConfigError / the module's
/// own error kind.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ReplicationRecord {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double S_hat = NAN;
  double G_hat = NAN;
  double tau2_hat = NAN;
  double statistic = NAN;
  bool reject = false;
  /// Empty on success, otherwise the ErrorKind name.
  std::string failure;
};

struct ExperimentResult {
  std::vector<ReplicationRecord> records;
  std::size_t failures = 0;
  std::size_t successes = 0;
  /// Rejections / successful replications.
  double rejection_rate = 0.0;
  double mean_statistic = NAN;
  double sd_statistic = NAN;
  std::optional<double> ks_distance;
  std::optional<oracle::ReferenceDistance> reference;
  std::optional<double> median_abs_error;
};

/// Simulates and tests every replication; numerical failures are recorded
/// and excluded from aggregates. Results do not depend on `threads`.
/// Throws ExperimentDegenerate when more than 20% of replications fail.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads);
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Recomputes rejection rate, statistic moments, KS distance and median
/// |S_hat - L_ref| from the per-replication records.
void aggregate(ExperimentResult& result);

/// sup_x |F_m(x) - Phi(x)|. Throws TooFewSamples below 10 values.
double ks_normal(std::span<const double> values);

/// rep,seed,S_hat,G_hat,tau2_hat,statistic,reject,failure
void write_replications_csv(const ExperimentResult& result, const std::filesystem::path& path);
std::vector<ReplicationRecord> read_replications_csv(const std::filesystem::path& path);
std::string aggregate_to_json(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace mvgof
