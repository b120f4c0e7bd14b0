#include "mvgof/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mvgof/errors.hpp"
#include "mvgof/gof.hpp"
#include "mvgof/parallel.hpp"
#include "mvgof/simulate.hpp"

namespace mvgof::oracle {

double w2_bruteforce(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() != nu.size()) throw Error(ErrorKind::SizeMismatch, "w2_bruteforce needs equal sizes");
  if (mu.size() > 8) throw Error(ErrorKind::TooLarge, "w2_bruteforce enumerates at most 8! couplings");
  const auto x = mu.samples();
  const auto y = nu.samples();
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) cost += (x[i] - y[perm[i]]) * (x[i] - y[perm[i]]);
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(x.size()));
}

Eigen::VectorXd fd_gradient(const DistanceFunction& f, const Eigen::VectorXd& gamma, double B,
                            const Eigen::MatrixXd& lambda, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  const auto d = gamma.size();
  Eigen::VectorXd grad(d * d + d + 1);

  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd up = gamma, down = gamma;
    up(k) += step;
    down(k) -= step;
    grad(k) = (f(up, B, lambda) - f(down, B, lambda)) / (2.0 * step);
  }
  grad(d) = (f(gamma, B + step, lambda) - f(gamma, B - step, lambda)) / (2.0 * step);

  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index k = 0; k <= l; ++k) {
      Eigen::MatrixXd up = lambda, down = lambda;
      up(k, l) += step;
      down(k, l) -= step;
      if (k != l) {
        up(l, k) += step;
        down(l, k) -= step;
      }
      double deriv = (f(gamma, B, up) - f(gamma, B, down)) / (2.0 * step);
      if (k != l) deriv *= 0.5;
      grad(d + 1 + k + l * d) = deriv;
      grad(d + 1 + l + k * d) = deriv;
    }
  }
  return grad;
}

Eigen::VectorXd grad_fd(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda, double step) {
  return fd_gradient(closed_form_distance, gamma, B, lambda, step);
}

Eigen::VectorXd grad_relative_fd(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda,
                                 double step) {
  const auto relative = [](const Eigen::VectorXd& g, double b, const Eigen::MatrixXd& lam) {
    return closed_form_distance(g, b, lam) / b;
  };
  return fd_gradient(relative, gamma, B, lambda, step);
}

ReferenceDistance reference_distance(const CoefficientModel& model, const BasisFamily& basis, std::size_t N_ref,
                                     std::size_t n_ref, std::uint64_t seed, double horizon) {
  const std::size_t d = basis.size();
  const double dt = horizon / static_cast<double>(n_ref);

  // Per-column particle averages first, then a Riemann sum over columns.
  long double b_acc = 0.0L;
  std::vector<long double> g_acc(d, 0.0L);
  std::vector<long double> l_acc(d * d, 0.0L);
  std::vector<double> atoms(d);

  simulate_stream(
      model, {N_ref, n_ref, horizon, seed},
      [&](std::size_t j, std::span<const double> state, const EmpiricalMeasure& mu) {
        if (j == n_ref) return;
        long double b_col = 0.0L;
        std::vector<long double> g_col(d, 0.0L);
        std::vector<long double> l_col(d * d, 0.0L);
        for (double x : state) {
          const double a2 = model.a2(x, mu);
          for (std::size_t k = 0; k < d; ++k) atoms[k] = basis.atom(k).fn(x, mu);
          b_col += static_cast<long double>(a2) * a2;
          for (std::size_t k = 0; k < d; ++k) {
            g_col[k] += static_cast<long double>(atoms[k]) * a2;
            for (std::size_t l = 0; l < d; ++l) l_col[k * d + l] += static_cast<long double>(atoms[k]) * atoms[l];
          }
        }
        const long double inv_n = 1.0L / static_cast<long double>(state.size());
        b_acc += b_col * inv_n;
        for (std::size_t k = 0; k < d; ++k) g_acc[k] += g_col[k] * inv_n;
        for (std::size_t q = 0; q < d * d; ++q) l_acc[q] += l_col[q] * inv_n;
      },
      default_thread_count());

  ReferenceDistance ref;
  ref.N_ref = N_ref;
  ref.n_ref = n_ref;
  ref.seed = seed;
  ref.B_ref = static_cast<double>(b_acc * dt);
  ref.Gamma_ref.resize(static_cast<Eigen::Index>(d));
  ref.Lambda_ref.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < d; ++k) {
    ref.Gamma_ref(static_cast<Eigen::Index>(k)) = static_cast<double>(g_acc[k] * dt);
    for (std::size_t l = 0; l < d; ++l) {
      ref.Lambda_ref(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) =
          static_cast<double>(l_acc[k * d + l] * dt);
    }
  }
  ref.L_ref = closed_form_distance(ref.Gamma_ref, ref.B_ref, ref.Lambda_ref);
  return ref;
}

double moment_scaling_check(const CoefficientModel& model, int p, const std::vector<std::size_t>& n_list,
                            const ScalingOptions& options) {
  if (p != 2 && p != 4 && p != 6) throw Error(ErrorKind::InvalidArgument, "moment order must be 2, 4 or 6");
  if (n_list.size() < 3) throw Error(ErrorKind::InvalidArgument, "scaling check needs at least 3 grid sizes");
  const std::size_t finest = *std::max_element(n_list.begin(), n_list.end());
  for (auto n : n_list) {
    if (n == 0 || finest % n != 0) {
      throw Error(ErrorKind::BadFactor, "every n must divide the finest n = " + std::to_string(finest));
    }
  }
  const auto fine = simulate_particles(model, options.particles, finest, options.horizon, options.seed);

  std::vector<double> log_dt, log_m;
  for (auto n : n_list) {
    const auto grid = subsample(fine, finest / n);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.particles(); ++i) {
      const auto path = grid.row(i);
      for (std::size_t j = 0; j < n; ++j) acc += std::pow(std::abs(path[j + 1] - path[j]), p);
    }
    const double m = acc / static_cast<double>(grid.particles() * n);
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw Error(ErrorKind::NaNSlope, "increment moment is " + std::to_string(m) + " at n = " + std::to_string(n));
    }
    log_dt.push_back(std::log(grid.delta()));
    log_m.push_back(std::log(m));
  }
  const double k = static_cast<double>(log_dt.size());
  const double mx = std::accumulate(log_dt.begin(), log_dt.end(), 0.0) / k;
  const double my = std::accumulate(log_m.begin(), log_m.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_dt.size(); ++i) {
    sxy += (log_dt[i] - mx) * (log_m[i] - my);
    sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace mvgof::oracle
