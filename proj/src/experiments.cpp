#include "mvgof/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvgof/errors.hpp"
#include "mvgof/grid_io.hpp"
#include "mvgof/normal.hpp"
#include "mvgof/parallel.hpp"
#include "mvgof/simulate.hpp"

namespace mvgof {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::ConfigError, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorKind::ConfigError, std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string cell(double v) { return std::isnan(v) ? std::string{} : format_double(v); }

double parse_cell(const std::string& s) {
  if (s.empty()) return NAN;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw Error(ErrorKind::ConfigError, "unparseable value '" + s + "'");
  return v;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  reject_unknown_keys(root,
                      {"schema_version", "model", "basis", "basis_params", "N", "n", "T", "alpha", "mode", "delta",
                       "replications", "base_seed", "reference"},
                      "config");
  if (get<int>(root, "schema_version") != kConfigSchemaVersion) {
    throw Error(ErrorKind::ConfigError, "unsupported schema_version (expected " +
                                            std::to_string(kConfigSchemaVersion) + ")");
  }

  ExperimentConfig c;
  const auto& model = root.at("model");
  if (!model.is_object()) throw Error(ErrorKind::ConfigError, "'model' must be an object");
  reject_unknown_keys(model, {"name", "params"}, "model");
  c.model_name = get<std::string>(model, "name");
  if (model.contains("params")) c.model_params = get<ParamMap>(model, "params");

  c.basis_atoms = get<std::vector<std::string>>(root, "basis");
  if (root.contains("basis_params")) c.basis_params = get<ParamMap>(root, "basis_params");

  const auto N = get<long long>(root, "N");
  const auto n = get<long long>(root, "n");
  if (N < 2 || n < 1) throw Error(ErrorKind::ConfigError, "need N >= 2 and n >= 1");
  c.particles = static_cast<std::size_t>(N);
  c.steps = static_cast<std::size_t>(n);
  c.horizon = root.contains("T") ? get<double>(root, "T") : 1.0;
  if (!(c.horizon > 0.0)) throw Error(ErrorKind::ConfigError, "T must be positive");
  c.alpha = root.contains("alpha") ? get<double>(root, "alpha") : 0.05;
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error(ErrorKind::ConfigError, "alpha must be in (0, 1)");
  if (root.contains("mode")) {
    try {
      c.mode = parse_test_mode(get<std::string>(root, "mode"));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, e.what());
    }
  }
  if (root.contains("delta") && !root.at("delta").is_null()) c.delta_threshold = get<double>(root, "delta");
  if (c.mode == TestMode::Relative &&
      (!c.delta_threshold || !(*c.delta_threshold > 0.0 && *c.delta_threshold < 1.0))) {
    throw Error(ErrorKind::ConfigError, "relative mode needs delta in (0, 1)");
  }
  const auto M = root.contains("replications") ? get<long long>(root, "replications") : 1;
  if (M < 1) throw Error(ErrorKind::ConfigError, "replications must be >= 1");
  c.replications = static_cast<std::size_t>(M);
  c.base_seed = root.contains("base_seed") ? get<std::uint64_t>(root, "base_seed") : 0;

  if (root.contains("reference")) {
    const auto& ref = root.at("reference");
    if (!ref.is_object()) throw Error(ErrorKind::ConfigError, "'reference' must be an object");
    reject_unknown_keys(ref, {"N_ref", "n_ref", "seed"}, "reference");
    ReferenceSpec spec;
    spec.particles = get<std::size_t>(ref, "N_ref");
    spec.steps = get<std::size_t>(ref, "n_ref");
    spec.seed = ref.contains("seed") ? get<std::uint64_t>(ref, "seed") : 0;
    if (spec.particles < 1 || spec.steps < 1) throw Error(ErrorKind::ConfigError, "reference needs N_ref, n_ref >= 1");
    c.reference = spec;
  }

  // Validate sub-specs eagerly so typos fail before any simulation.
  (void)c.model();
  (void)c.basis();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

double ks_normal(std::span<const double> values) {
  if (values.size() < 10) throw Error(ErrorKind::TooFewSamples, "KS distance needs at least 10 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double phi = normal_cdf(sorted[i]);
    dist = std::max({dist, static_cast<double>(i + 1) / m - phi, phi - static_cast<double>(i) / m});
  }
  return dist;
}

void aggregate(ExperimentResult& r) {
  std::vector<double> stats;
  std::vector<double> abs_err;
  std::size_t rejects = 0;
  r.failures = 0;
  for (const auto& rec : r.records) {
    if (!rec.failure.empty()) {
      ++r.failures;
      continue;
    }
    stats.push_back(rec.statistic);
    if (rec.reject) ++rejects;
    if (r.reference) abs_err.push_back(std::abs(rec.S_hat - r.reference->L_ref));
  }
  r.successes = stats.size();
  r.rejection_rate = stats.empty() ? NAN : static_cast<double>(rejects) / static_cast<double>(stats.size());
  r.mean_statistic = NAN;
  r.sd_statistic = NAN;
  if (!stats.empty()) {
    double sum = 0.0;
    for (double s : stats) sum += s;
    r.mean_statistic = sum / static_cast<double>(stats.size());
  }
  if (stats.size() >= 2) {
    double ss = 0.0;
    for (double s : stats) ss += (s - r.mean_statistic) * (s - r.mean_statistic);
    r.sd_statistic = std::sqrt(ss / static_cast<double>(stats.size() - 1));
  }
  r.ks_distance.reset();
  if (stats.size() >= 10) r.ks_distance = ks_normal(stats);
  r.median_abs_error.reset();
  if (!abs_err.empty()) {
    std::sort(abs_err.begin(), abs_err.end());
    const std::size_t h = abs_err.size() / 2;
    r.median_abs_error = abs_err.size() % 2 ? abs_err[h] : 0.5 * (abs_err[h - 1] + abs_err[h]);
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads) {
  const auto model = config.model();
  const auto basis = config.basis();

  ExperimentResult result;
  result.records.resize(config.replications);
  parallel_for(config.replications, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      auto& rec = result.records[r];
      rec.rep = r;
      rec.seed = config.base_seed + r;
      try {
        const auto grid = simulate_particles(model, config.particles, config.steps, config.horizon, rec.seed, 1);
        const auto summary = compute_summary(grid, basis, 1);
        rec.S_hat = summary.S_hat;
        rec.G_hat = summary.G_hat;
        const auto report = run_test(summary, config.alpha, config.mode, config.delta_threshold);
        rec.tau2_hat = report.tau2_hat;
        rec.statistic = report.statistic;
        rec.reject = report.reject;
      } catch (const Error& e) {
        if (!is_numerical(e.kind())) throw;
        rec.failure = std::string(to_string(e.kind()));
        rec.reject = false;
      }
    }
  });

  if (config.reference) {
    result.reference = oracle::reference_distance(model, basis, config.reference->particles,
                                                  config.reference->steps, config.reference->seed, config.horizon);
  }
  aggregate(result);
  if (5 * result.failures > config.replications) {
    throw Error(ErrorKind::ExperimentDegenerate, std::to_string(result.failures) + " of " +
                                                     std::to_string(config.replications) +
                                                     " replications failed (limit 20%)");
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, default_thread_count());
}

void write_replications_csv(const ExperimentResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << "rep,seed,S_hat,G_hat,tau2_hat,statistic,reject,failure\n";
  for (const auto& r : result.records) {
    out << r.rep << ',' << r.seed << ',' << cell(r.S_hat) << ',' << cell(r.G_hat) << ',' << cell(r.tau2_hat) << ','
        << cell(r.statistic) << ',' << (r.reject ? 1 : 0) << ',' << r.failure << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<ReplicationRecord> read_replications_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<ReplicationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 8) throw Error(ErrorKind::ConfigError, "malformed replication row: " + line);
    ReplicationRecord r;
    r.rep = std::stoull(cells[0]);
    r.seed = std::stoull(cells[1]);
    r.S_hat = parse_cell(cells[2]);
    r.G_hat = parse_cell(cells[3]);
    r.tau2_hat = parse_cell(cells[4]);
    r.statistic = parse_cell(cells[5]);
    r.reject = cells[6] == "1";
    r.failure = cells[7];
    records.push_back(std::move(r));
  }
  return records;
}

std::string aggregate_to_json(const ExperimentConfig& config, const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["model"] = config.model_name;
  j["basis"] = config.basis_atoms;
  j["N"] = config.particles;
  j["n"] = config.steps;
  j["T"] = config.horizon;
  j["alpha"] = config.alpha;
  j["mode"] = to_string(config.mode);
  j["delta_threshold"] = config.delta_threshold ? nlohmann::ordered_json(*config.delta_threshold) : nullptr;
  j["replications"] = config.replications;
  j["base_seed"] = config.base_seed;
  j["successes"] = r.successes;
  j["failures"] = r.failures;
  j["rejection_rate"] = number_or_null(r.rejection_rate);
  j["mean_statistic"] = number_or_null(r.mean_statistic);
  j["sd_statistic"] = number_or_null(r.sd_statistic);
  j["ks_distance"] = r.ks_distance ? nlohmann::ordered_json(*r.ks_distance) : nullptr;
  if (r.reference) {
    j["reference"] = {{"L_ref", r.reference->L_ref},
                      {"B_ref", r.reference->B_ref},
                      {"N_ref", r.reference->N_ref},
                      {"n_ref", r.reference->n_ref},
                      {"seed", r.reference->seed}};
  } else {
    j["reference"] = nullptr;
  }
  j["median_abs_error"] = r.median_abs_error ? nlohmann::ordered_json(*r.median_abs_error) : nullptr;
  return j.dump(2) + "\n";
}

}  // namespace mvgof
