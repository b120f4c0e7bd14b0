#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvgof/models.hpp"
#include "mvgof/simulate.hpp"

namespace mvgof {

/// Reciprocal condition threshold below which Lambda is treated as singular.
inline constexpr double kLambdaRcondFloor = 1e-10;

/// Estimated distance components for one observation panel.
///
/// Rows of `influence` are the per-particle vectors
///   (Z_1, ..., Z_d, Z_B, vec(Z_Lambda))
/// with vec column-major, so entry (k, l) of Z_Lambda sits at d + 1 + k + l*d.
/// The same layout is used by grad_g and covariance_hat.
struct GofSummary {
  double B_hat = 0.0;
  Eigen::VectorXd Gamma_hat;
  Eigen::MatrixXd Lambda_hat;
  double S_hat = 0.0;
  double G_hat = 0.0;
  Eigen::MatrixXd influence;
  std::size_t d = 0;
  std::size_t particles = 0;
  std::size_t steps = 0;
  double delta = 0.0;
  double lambda_rcond = 0.0;
};

inline std::size_t influence_width(std::size_t d) noexcept { return d * d + d + 1; }

/// Builds B_hat, Gamma_hat, Lambda_hat, S_hat, G_hat and the influence rows
/// from increments over j = 0..n-1 with left-endpoint basis evaluation.
/// Sums run over j ascending within a particle, then over particles in index
/// order. Throws InsufficientParticles (N < 2), DegenerateData (B_hat == 0),
/// SingularLambda.
GofSummary compute_summary(const ObservationGrid& grid, const BasisFamily& basis, std::size_t threads);
GofSummary compute_summary(const ObservationGrid& grid, const BasisFamily& basis);

/// g = B - Gamma^T Lambda^{-1} Gamma via Cholesky solve. Throws SingularLambda.
double closed_form_distance(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda);

/// Reciprocal condition estimate (1-norm) of a symmetric Lambda; 0 when it is
/// not positive definite.
double lambda_rcond(const Eigen::MatrixXd& lambda);

/// Gradient of g in influence layout:
///   dg/dGamma = -2 Lambda^{-1} Gamma,  dg/dB = 1,
///   dg/dLambda = Lambda^{-1} Gamma Gamma^T Lambda^{-1}  (entrywise partials).
Eigen::VectorXd grad_g(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda);

/// Gradient of h = 1 - Gamma^T Lambda^{-1} Gamma / B (the relative distance G).
Eigen::VectorXd grad_relative(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda);

/// (1/N) sum_i (V_i - Vbar)(V_i - Vbar)^T. Throws InsufficientParticles for N < 2.
Eigen::MatrixXd covariance_hat(const Eigen::MatrixXd& influence);

/// grad^T Sigma_hat grad for an arbitrary gradient in influence layout.
double delta_method_variance(const Eigen::MatrixXd& influence, const Eigen::VectorXd& gradient);

/// Delta-method variance of sqrt(N) S_hat.
double tau2_hat(const GofSummary& summary);
/// Delta-method variance of sqrt(N) G_hat.
double tau2_relative_hat(const GofSummary& summary);

enum class TestMode { Absolute, Relative };

std::string to_string(TestMode mode);
TestMode parse_test_mode(const std::string& text);

struct TestDiagnostics {
  double lambda_rcond = 0.0;
  std::size_t particles = 0;
  std::size_t steps = 0;
  double delta = 0.0;
  std::size_t d = 0;
  double B_hat = 0.0;
  double S_hat = 0.0;
  double G_hat = 0.0;
  double critical_value = 0.0;
  /// N * delta^2 > 1: the asymptotic regime N * delta^2 -> 0 is not plausible.
  bool rate_warning = false;
};

struct TestReport {
  double statistic = 0.0;
  double tau2_hat = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  TestMode mode = TestMode::Absolute;
  std::optional<double> delta_threshold;
  TestDiagnostics diagnostics;
};

/// Strict one-sided rule: a statistic equal to the critical value does not reject.
inline bool exceeds_critical(double statistic, double critical) noexcept { return statistic > critical; }

/// One-sided test. Absolute: statistic = sqrt(N) S_hat / tau_hat, H0: L = 0.
/// Relative: statistic = sqrt(N) (G_hat - delta) / tau_G_hat, H0: G <= delta.
/// Rejects iff statistic > z_{1-alpha}. Throws DegenerateVariance when the
/// variance estimate is zero.
TestReport run_test(const GofSummary& summary, double alpha, TestMode mode,
                    std::optional<double> delta_threshold = std::nullopt);
TestReport run_test(const ObservationGrid& grid, const BasisFamily& basis, double alpha, TestMode mode,
                    std::optional<double> delta_threshold = std::nullopt);

/// {statistic, tau2_hat, p_value, alpha, reject, mode, delta_threshold, diagnostics{...}}
std::string report_to_json(const TestReport& report);

}  // namespace mvgof
