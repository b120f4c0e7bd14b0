#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvgof/measures.hpp"
#include "mvgof/models.hpp"

namespace mvgof {

/// Panel X^i_{t_j}, i = 0..N-1, j = 0..n, observed at t_j = T j / n.
/// Stored row-major: one row per particle.
class ObservationGrid {
 public:
  /// Throws InvalidArgument on shape mismatch, NonFiniteInput on non-finite values.
  ObservationGrid(std::vector<double> values, std::size_t particles, std::size_t steps, double horizon,
                  std::uint64_t seed, std::string model_name, ParamMap params = {});

  std::size_t particles() const noexcept { return particles_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t columns() const noexcept { return steps_ + 1; }
  double horizon() const noexcept { return horizon_; }
  double delta() const noexcept { return horizon_ / static_cast<double>(steps_); }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& model_name() const noexcept { return model_name_; }
  const ParamMap& params() const noexcept { return params_; }

  double at(std::size_t particle, std::size_t step) const { return values_[particle * columns() + step]; }
  std::span<const double> row(std::size_t particle) const {
    return std::span<const double>(values_).subspan(particle * columns(), columns());
  }
  std::vector<double> column(std::size_t step) const;
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const ObservationGrid&, const ObservationGrid&) = default;

 private:
  std::vector<double> values_;
  std::size_t particles_;
  std::size_t steps_;
  double horizon_;
  std::uint64_t seed_;
  std::string model_name_;
  ParamMap params_;
};

struct SimulationSpec {
  std::size_t particles = 0;
  std::size_t steps = 0;
  double horizon = 1.0;
  std::uint64_t seed = 0;
};

/// Called once per time index j = 0..n with the particle states at t_j and
/// their (sorted) empirical measure.
using ColumnVisitor =
    std::function<void(std::size_t step, std::span<const double> state, const EmpiricalMeasure& measure)>;

/// Euler-Maruyama for the N-particle system
///   X^i_{j+1} = X^i_j + b(X^i_j, mu^N_j) dt + sqrt(a2(X^i_j, mu^N_j) dt) xi^i_j,
/// streaming each column to `visit` instead of storing the panel.
/// Noise xi^i_j = normal_at(seed, i, j, Increment); X^i_0 = m0 + s0 * normal_at(seed, i, 0, Initial).
/// Output is bit-identical for any `threads`.
void simulate_stream(const CoefficientModel& model, const SimulationSpec& spec, const ColumnVisitor& visit,
                     std::size_t threads);

ObservationGrid simulate_particles(const CoefficientModel& model, std::size_t particles, std::size_t steps,
                                   double horizon, std::uint64_t seed, std::size_t threads);
ObservationGrid simulate_particles(const CoefficientModel& model, std::size_t particles, std::size_t steps,
                                   double horizon, std::uint64_t seed);

/// Keeps every factor-th column. Throws BadFactor unless factor divides n.
ObservationGrid subsample(const ObservationGrid& grid, std::size_t factor);

}  // namespace mvgof
