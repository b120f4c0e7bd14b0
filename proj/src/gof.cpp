#include "mvgof/gof.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mvgof/errors.hpp"
#include "mvgof/normal.hpp"
#include "mvgof/parallel.hpp"

namespace mvgof {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_lambda(const Eigen::MatrixXd& lambda) {
  if (lambda.rows() != lambda.cols() || lambda.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "Lambda must be a non-empty square matrix");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(lambda);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularLambda, "Lambda is not positive definite");
  const double rcond = llt.rcond();
  if (!(rcond >= kLambdaRcondFloor)) {
    std::ostringstream os;
    os << "Lambda reciprocal condition " << rcond << " below " << kLambdaRcondFloor
       << " (numerically dependent basis?)";
    throw Error(ErrorKind::SingularLambda, os.str());
  }
  return llt;
}

void check_dims(const Eigen::VectorXd& gamma, const Eigen::MatrixXd& lambda) {
  if (lambda.rows() != gamma.size() || lambda.cols() != gamma.size()) {
    throw Error(ErrorKind::SizeMismatch, "Gamma and Lambda dimensions disagree");
  }
}

}  // namespace

double lambda_rcond(const Eigen::MatrixXd& lambda) {
  Eigen::LLT<Eigen::MatrixXd> llt(lambda);
  if (llt.info() != Eigen::Success) return 0.0;
  return llt.rcond();
}

double closed_form_distance(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda) {
  check_dims(gamma, lambda);
  const auto llt = factor_lambda(lambda);
  return B - gamma.dot(llt.solve(gamma));
}

Eigen::VectorXd grad_g(const Eigen::VectorXd& gamma, double /*B*/, const Eigen::MatrixXd& lambda) {
  check_dims(gamma, lambda);
  const auto d = gamma.size();
  const Eigen::VectorXd w = factor_lambda(lambda).solve(gamma);
  Eigen::VectorXd grad(influence_width(static_cast<std::size_t>(d)));
  grad.head(d) = -2.0 * w;
  grad(d) = 1.0;
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index k = 0; k < d; ++k) grad(d + 1 + k + l * d) = w(k) * w(l);
  }
  return grad;
}

Eigen::VectorXd grad_relative(const Eigen::VectorXd& gamma, double B, const Eigen::MatrixXd& lambda) {
  check_dims(gamma, lambda);
  if (!(B > 0.0)) throw Error(ErrorKind::DegenerateData, "relative distance needs B > 0");
  const auto d = gamma.size();
  const Eigen::VectorXd w = factor_lambda(lambda).solve(gamma);
  const double proj = gamma.dot(w);
  Eigen::VectorXd grad(influence_width(static_cast<std::size_t>(d)));
  grad.head(d) = -2.0 * w / B;
  grad(d) = proj / (B * B);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index k = 0; k < d; ++k) grad(d + 1 + k + l * d) = w(k) * w(l) / B;
  }
  return grad;
}

GofSummary compute_summary(const ObservationGrid& grid, const BasisFamily& basis, std::size_t threads) {
  const std::size_t N = grid.particles();
  const std::size_t n = grid.steps();
  const std::size_t d = basis.size();
  const std::size_t m = influence_width(d);
  const double dt = grid.delta();
  if (N < 2) throw Error(ErrorKind::InsufficientParticles, "goodness-of-fit summary needs N >= 2");

  std::vector<EmpiricalMeasure> measures;
  measures.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = grid.column(j);
    measures.push_back(EmpiricalMeasure::from_samples(col));
  }

  Eigen::MatrixXd V(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(m));
  parallel_for(N, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> atoms(d);
    std::vector<double> zk(d);
    std::vector<double> zl(d * d);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(zk.begin(), zk.end(), 0.0);
      std::fill(zl.begin(), zl.end(), 0.0);
      double zb = 0.0;
      const auto path = grid.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double inc = path[j + 1] - path[j];
        const double inc2 = inc * inc;
        basis.evaluate(path[j], measures[j], atoms);
        zb += inc2 * inc2;
        for (std::size_t k = 0; k < d; ++k) {
          zk[k] += atoms[k] * inc2;
          for (std::size_t l = k; l < d; ++l) zl[k + l * d] += atoms[k] * atoms[l];
        }
      }
      const auto row = static_cast<Eigen::Index>(i);
      for (std::size_t k = 0; k < d; ++k) V(row, static_cast<Eigen::Index>(k)) = zk[k];
      V(row, static_cast<Eigen::Index>(d)) = zb / (3.0 * dt);
      for (std::size_t l = 0; l < d; ++l) {
        for (std::size_t k = 0; k < d; ++k) {
          const double v = k <= l ? zl[k + l * d] : zl[l + k * d];
          V(row, static_cast<Eigen::Index>(d + 1 + k + l * d)) = dt * v;
        }
      }
    }
  });

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < V.rows(); ++i) mean += V.row(i).transpose();
  mean /= static_cast<double>(N);

  GofSummary s;
  s.d = d;
  s.particles = N;
  s.steps = n;
  s.delta = dt;
  s.Gamma_hat = mean.head(static_cast<Eigen::Index>(d));
  s.B_hat = mean(static_cast<Eigen::Index>(d));
  s.Lambda_hat = Eigen::Map<const Eigen::MatrixXd>(mean.data() + d + 1, static_cast<Eigen::Index>(d),
                                                   static_cast<Eigen::Index>(d));
  s.influence = std::move(V);
  s.lambda_rcond = lambda_rcond(s.Lambda_hat);

  if (s.B_hat == 0.0) throw Error(ErrorKind::DegenerateData, "all increments are zero (B_hat == 0)");
  s.S_hat = closed_form_distance(s.Gamma_hat, s.B_hat, s.Lambda_hat);
  s.G_hat = s.S_hat / s.B_hat;
  return s;
}

GofSummary compute_summary(const ObservationGrid& grid, const BasisFamily& basis) {
  return compute_summary(grid, basis, default_thread_count());
}

Eigen::MatrixXd covariance_hat(const Eigen::MatrixXd& influence) {
  const auto N = influence.rows();
  if (N < 2) throw Error(ErrorKind::InsufficientParticles, "covariance estimate needs N >= 2");
  const Eigen::RowVectorXd mean = influence.colwise().mean();
  const Eigen::MatrixXd centered = influence.rowwise() - mean;
  Eigen::MatrixXd sigma = centered.transpose() * centered / static_cast<double>(N);
  return 0.5 * (sigma + sigma.transpose());
}

double delta_method_variance(const Eigen::MatrixXd& influence, const Eigen::VectorXd& gradient) {
  if (influence.cols() != gradient.size()) {
    throw Error(ErrorKind::SizeMismatch, "gradient length does not match influence width");
  }
  const auto N = influence.rows();
  if (N < 2) throw Error(ErrorKind::InsufficientParticles, "variance estimate needs N >= 2");
  // grad^T Sigma_hat grad == (1/N) sum_i (grad^T (V_i - Vbar))^2; the projected
  // form avoids cancellation between large path-level covariance entries.
  const Eigen::VectorXd proj = influence * gradient;
  const double mean = proj.mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) acc += (proj(i) - mean) * (proj(i) - mean);
  double tau2 = acc / static_cast<double>(N);
  if (tau2 < 0.0 && tau2 >= -1e-12) tau2 = 0.0;
  return tau2;
}

double tau2_hat(const GofSummary& s) {
  return delta_method_variance(s.influence, grad_g(s.Gamma_hat, s.B_hat, s.Lambda_hat));
}

double tau2_relative_hat(const GofSummary& s) {
  return delta_method_variance(s.influence, grad_relative(s.Gamma_hat, s.B_hat, s.Lambda_hat));
}

std::string to_string(TestMode mode) { return mode == TestMode::Absolute ? "absolute" : "relative"; }

TestMode parse_test_mode(const std::string& text) {
  if (text == "absolute") return TestMode::Absolute;
  if (text == "relative") return TestMode::Relative;
  throw Error(ErrorKind::InvalidArgument, "mode must be 'absolute' or 'relative', got '" + text + "'");
}

TestReport run_test(const GofSummary& s, double alpha, TestMode mode, std::optional<double> delta_threshold) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be in (0, 1)");

  TestReport r;
  r.alpha = alpha;
  r.mode = mode;
  const double root_n = std::sqrt(static_cast<double>(s.particles));
  if (mode == TestMode::Absolute) {
    r.tau2_hat = tau2_hat(s);
    if (!(r.tau2_hat > 0.0)) throw Error(ErrorKind::DegenerateVariance, "tau_hat is zero");
    r.statistic = root_n * s.S_hat / std::sqrt(r.tau2_hat);
  } else {
    if (!delta_threshold || !(*delta_threshold > 0.0 && *delta_threshold < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "relative mode needs a threshold delta in (0, 1)");
    }
    r.delta_threshold = delta_threshold;
    r.tau2_hat = tau2_relative_hat(s);
    if (!(r.tau2_hat > 0.0)) throw Error(ErrorKind::DegenerateVariance, "tau_G_hat is zero");
    r.statistic = root_n * (s.G_hat - *delta_threshold) / std::sqrt(r.tau2_hat);
  }
  const double z = normal_quantile(1.0 - alpha);
  r.reject = exceeds_critical(r.statistic, z);
  r.p_value = 1.0 - normal_cdf(r.statistic);

  auto& diag = r.diagnostics;
  diag.lambda_rcond = s.lambda_rcond;
  diag.particles = s.particles;
  diag.steps = s.steps;
  diag.delta = s.delta;
  diag.d = s.d;
  diag.B_hat = s.B_hat;
  diag.S_hat = s.S_hat;
  diag.G_hat = s.G_hat;
  diag.critical_value = z;
  diag.rate_warning = static_cast<double>(s.particles) * s.delta * s.delta > 1.0;
  return r;
}

TestReport run_test(const ObservationGrid& grid, const BasisFamily& basis, double alpha, TestMode mode,
                    std::optional<double> delta_threshold) {
  return run_test(compute_summary(grid, basis), alpha, mode, delta_threshold);
}

std::string report_to_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["statistic"] = r.statistic;
  j["tau2_hat"] = r.tau2_hat;
  j["p_value"] = r.p_value;
  j["alpha"] = r.alpha;
  j["reject"] = r.reject;
  j["mode"] = to_string(r.mode);
  j["delta_threshold"] = r.delta_threshold ? nlohmann::ordered_json(*r.delta_threshold) : nullptr;
  const auto& d = r.diagnostics;
  j["diagnostics"] = {
      {"lambda_rcond", d.lambda_rcond}, {"N", d.particles},         {"n", d.steps},
      {"delta", d.delta},               {"d", d.d},                 {"B_hat", d.B_hat},
      {"S_hat", d.S_hat},               {"G_hat", d.G_hat},         {"critical_value", d.critical_value},
      {"rate_warning", d.rate_warning},
  };
  return j.dump(2) + "\n";
}

}  // namespace mvgof
