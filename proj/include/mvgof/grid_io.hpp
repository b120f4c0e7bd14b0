#pragma once

#include <filesystem>
#include <string>

#include "mvgof/simulate.hpp"

namespace mvgof {

/// Writes PREFIX.csv (header t_0..t_n, one row per particle, %.17g values)
/// and PREFIX.json ({T, n, N, seed, model_name, params}).
void write_grid(const ObservationGrid& grid, const std::filesystem::path& prefix);

/// Reads the pair written by write_grid. Throws IoError / ConfigError.
ObservationGrid read_grid(const std::filesystem::path& prefix);

/// "%.17g": round-trips every finite double.
std::string format_double(double v);

}  // namespace mvgof
