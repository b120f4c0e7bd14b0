#include "mvgof/simulate.hpp"

#include <cmath>
#include <sstream>

#include "mvgof/errors.hpp"
#include "mvgof/parallel.hpp"
#include "mvgof/rng.hpp"

namespace mvgof {

namespace {

// Below this many particles a step is too cheap to be worth spawning workers.
constexpr std::size_t kMinParticlesPerWorker = 4096;

std::string location(std::size_t particle, std::size_t step) {
  std::ostringstream os;
  os << "particle " << particle << ", step " << step;
  return os.str();
}

}  // namespace

ObservationGrid::ObservationGrid(std::vector<double> values, std::size_t particles, std::size_t steps,
                                 double horizon, std::uint64_t seed, std::string model_name, ParamMap params)
    : values_(std::move(values)),
      particles_(particles),
      steps_(steps),
      horizon_(horizon),
      seed_(seed),
      model_name_(std::move(model_name)),
      params_(std::move(params)) {
  if (particles_ == 0 || steps_ == 0) throw Error(ErrorKind::InvalidArgument, "grid needs N >= 1 and n >= 1");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorKind::InvalidArgument, "grid horizon must be a positive finite number");
  }
  if (values_.size() != particles_ * (steps_ + 1)) {
    throw Error(ErrorKind::InvalidArgument, "grid values do not match N x (n+1)");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw Error(ErrorKind::NonFiniteInput, "grid value at " + location(k / columns(), k % columns()) +
                                                 " is not finite");
    }
  }
}

std::vector<double> ObservationGrid::column(std::size_t step) const {
  std::vector<double> col(particles_);
  for (std::size_t i = 0; i < particles_; ++i) col[i] = at(i, step);
  return col;
}

void simulate_stream(const CoefficientModel& model, const SimulationSpec& spec, const ColumnVisitor& visit,
                     std::size_t threads) {
  if (spec.particles == 0 || spec.steps == 0) {
    throw Error(ErrorKind::InvalidArgument, "simulation needs N >= 1 and n >= 1");
  }
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    throw Error(ErrorKind::InvalidArgument, "simulation horizon must be positive");
  }
  const std::size_t N = spec.particles;
  const double dt = spec.horizon / static_cast<double>(spec.steps);
  const double sqrt_dt = std::sqrt(dt);
  const std::size_t workers = std::min(threads, std::max<std::size_t>(1, N / kMinParticlesPerWorker));

  std::vector<double> state(N);
  std::vector<double> next(N);
  for (std::size_t i = 0; i < N; ++i) {
    state[i] = model.initial.mean + model.initial.sd * normal_at(spec.seed, i, 0, Stream::Initial);
  }

  for (std::size_t j = 0;; ++j) {
    const auto measure = EmpiricalMeasure::from_samples(state);
    visit(j, state, measure);
    if (j == spec.steps) break;

    const auto step = static_cast<std::uint32_t>(j);
    parallel_for(N, workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const double x = state[i];
        const double a2 = model.a2(x, measure);
        if (!(a2 >= 0.0) || !std::isfinite(a2)) {
          throw Error(ErrorKind::CoefficientEvaluation,
                      "squared diffusion is " + std::to_string(a2) + " at " + location(i, j));
        }
        const double b = model.drift(x, measure);
        const double xi = normal_at(spec.seed, i, step, Stream::Increment);
        next[i] = x + b * dt + std::sqrt(a2) * sqrt_dt * xi;
        if (!std::isfinite(next[i])) {
          throw Error(ErrorKind::NumericalBlowup, "state became non-finite at " + location(i, j + 1));
        }
      }
    });
    state.swap(next);
  }
}

ObservationGrid simulate_particles(const CoefficientModel& model, std::size_t particles, std::size_t steps,
                                   double horizon, std::uint64_t seed, std::size_t threads) {
  const std::size_t cols = steps + 1;
  std::vector<double> values(particles * cols);
  simulate_stream(
      model, {particles, steps, horizon, seed},
      [&](std::size_t j, std::span<const double> state, const EmpiricalMeasure&) {
        for (std::size_t i = 0; i < state.size(); ++i) values[i * cols + j] = state[i];
      },
      threads);
  return ObservationGrid(std::move(values), particles, steps, horizon, seed, model.name, model.params);
}

ObservationGrid simulate_particles(const CoefficientModel& model, std::size_t particles, std::size_t steps,
                                   double horizon, std::uint64_t seed) {
  return simulate_particles(model, particles, steps, horizon, seed, default_thread_count());
}

ObservationGrid subsample(const ObservationGrid& grid, std::size_t factor) {
  if (factor == 0 || grid.steps() % factor != 0) {
    throw Error(ErrorKind::BadFactor, "factor " + std::to_string(factor) + " does not divide n = " +
                                          std::to_string(grid.steps()));
  }
  const std::size_t steps = grid.steps() / factor;
  std::vector<double> values;
  values.reserve(grid.particles() * (steps + 1));
  for (std::size_t i = 0; i < grid.particles(); ++i) {
    for (std::size_t j = 0; j <= steps; ++j) values.push_back(grid.at(i, j * factor));
  }
  return ObservationGrid(std::move(values), grid.particles(), steps, grid.horizon(), grid.seed(), grid.model_name(),
                         grid.params());
}

}  // namespace mvgof
