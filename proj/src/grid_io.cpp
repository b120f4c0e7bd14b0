#include "mvgof/grid_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvgof/errors.hpp"

namespace mvgof {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* ext) {
  return std::filesystem::path(prefix.string() + ext);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_grid(const ObservationGrid& grid, const std::filesystem::path& prefix) {
  const auto csv_path = with_suffix(prefix, ".csv");
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw Error(ErrorKind::IoError, "cannot open " + csv_path.string() + " for writing");
  for (std::size_t j = 0; j < grid.columns(); ++j) csv << (j ? ",t_" : "t_") << j;
  csv << '\n';
  for (std::size_t i = 0; i < grid.particles(); ++i) {
    const auto row = grid.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) csv << ',';
      csv << format_double(row[j]);
    }
    csv << '\n';
  }
  if (!csv) throw Error(ErrorKind::IoError, "write failed for " + csv_path.string());

  nlohmann::ordered_json meta;
  meta["T"] = grid.horizon();
  meta["n"] = grid.steps();
  meta["N"] = grid.particles();
  meta["seed"] = grid.seed();
  meta["model_name"] = grid.model_name();
  meta["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : grid.params()) meta["params"][k] = v;
  const auto json_path = with_suffix(prefix, ".json");
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw Error(ErrorKind::IoError, "cannot open " + json_path.string() + " for writing");
  js << meta.dump(2) << '\n';
}

ObservationGrid read_grid(const std::filesystem::path& prefix) {
  const auto json_path = with_suffix(prefix, ".json");
  std::ifstream js(json_path);
  if (!js) throw Error(ErrorKind::IoError, "cannot open " + json_path.string());
  nlohmann::json meta;
  double T = 0.0;
  std::size_t n = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::string model_name;
  ParamMap params;
  try {
    js >> meta;
    T = meta.at("T").get<double>();
    n = meta.at("n").get<std::size_t>();
    N = meta.at("N").get<std::size_t>();
    seed = meta.value("seed", std::uint64_t{0});
    model_name = meta.value("model_name", std::string{});
    if (meta.contains("params")) params = meta.at("params").get<ParamMap>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, "bad grid sidecar " + json_path.string() + ": " + e.what());
  }

  const auto csv_path = with_suffix(prefix, ".csv");
  std::ifstream csv(csv_path);
  if (!csv) throw Error(ErrorKind::IoError, "cannot open " + csv_path.string());
  std::string line;
  std::getline(csv, line);  // header
  std::vector<double> values;
  values.reserve(N * (n + 1));
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw Error(ErrorKind::ConfigError, "unparseable value '" + cell + "' in " + csv_path.string());
      }
      values.push_back(v);
      ++cols;
    }
    if (cols != n + 1) {
      throw Error(ErrorKind::ConfigError, "row " + std::to_string(rows) + " of " + csv_path.string() + " has " +
                                              std::to_string(cols) + " columns, expected " +
                                              std::to_string(n + 1));
    }
    ++rows;
  }
  if (rows != N) {
    throw Error(ErrorKind::ConfigError, csv_path.string() + " has " + std::to_string(rows) + " rows, expected " +
                                            std::to_string(N));
  }
  return ObservationGrid(std::move(values), N, n, T, seed, model_name, params);
}

}  // namespace mvgof
