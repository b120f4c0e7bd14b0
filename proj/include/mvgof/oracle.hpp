#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mvgof/measures.hpp"
#include "mvgof/models.hpp"

// Brute-force references for validating the main pipeline. Nothing here
// reuses the summation kernels of gof or measures.
namespace mvgof::oracle {

/// Minimum over all N! permutation couplings. Throws TooLarge for N > 8.
double w2_bruteforce(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

using DistanceFunction = std::function<double(const Eigen::VectorXd&, double, const Eigen::MatrixXd&)>;

/// Central differences of f in influence layout. Off-diagonal Lambda entries
/// are perturbed in symmetric pairs; the resulting directional derivative is
/// split equally between (k, l) and (l, k), which equals the entrywise partial
/// of a function of a symmetric argument.
Eigen::VectorXd fd_gradient(const DistanceFunction& f, const Eigen::VectorXd& gamma, double B,
                            const Eigen::MatrixXd& lambda, double step);

/// fd_gradient of closed_form_distance.
Eigen::VectorXd grad_fd(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda, double step);
/// fd_gradient of the relative distance 1 - Gamma^T Lambda^{-1} Gamma / B.
Eigen::VectorXd grad_relative_fd(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda,
                                 double step);

struct ReferenceDistance {
  double L_ref = 0.0;
  double B_ref = 0.0;
  Eigen::VectorXd Gamma_ref;
  Eigen::MatrixXd Lambda_ref;
  std::size_t N_ref = 0;
  std::size_t n_ref = 0;
  std::uint64_t seed = 0;
};

/// Population B, Gamma, Lambda approximated on a large particle run using the
/// true a^2 (no squared increments): Riemann sums over t_0..t_{n-1}, particle
/// averages in place of integrals against mu_t.
ReferenceDistance reference_distance(const CoefficientModel& model, const BasisFamily& basis, std::size_t N_ref,
                                     std::size_t n_ref, std::uint64_t seed, double horizon = 1.0);

struct ScalingOptions {
  std::size_t particles = 500;
  double horizon = 1.0;
  std::uint64_t seed = 1;
};

/// Least-squares slope of log mean|dX|^p against log delta. One panel is
/// simulated at the finest n in n_list and subsampled to the others.
/// Throws NaNSlope when any mean increment moment is zero or non-finite.
double moment_scaling_check(const CoefficientModel& model, int p, const std::vector<std::size_t>& n_list,
                            const ScalingOptions& options = {});

}  // namespace mvgof::oracle
