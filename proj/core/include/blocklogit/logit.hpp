#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace blocklogit {

struct LogitOptions {
  int max_iterations = 100;
  double score_tol = 1e-8;        // convergence: max |score| below this
  double loglik_rel_tol = 1e-12;  // or relative log-likelihood change below this
  double separation_threshold = 30.0;  // |beta| on the per-column standardized scale
};

// One converged maximum-likelihood logit fit. y and X are kept so that
// cluster-robust covariances and marginal effects can be formed afterwards.
struct FitResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;  // inverse observed information at the MLE
  double log_lik = 0.0;
  std::int64_t n = 0;
  int k = 0;
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
};

// Numerically stable logistic cdf and Bernoulli-logit log-likelihood.
double logistic_cdf(double eta);
double log_likelihood(const Eigen::VectorXd& beta, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& X);

// Newton/IRLS with step-halving on log-likelihood decrease.
FitResult fit_logit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                    const LogitOptions& options = {});

std::pair<double, double> information_criteria(double log_lik, int k,
                                               std::int64_t n);
std::pair<double, double> information_criteria(const FitResult& fit);

// CR0-style sandwich with cluster-aggregated scores and the
// G/(G-1) * (n-1)/(n-k) small-sample factor.
Eigen::MatrixXd cluster_robust_cov(const FitResult& fit,
                                   const std::vector<std::int64_t>& cluster);

struct AmeResult {
  double ame = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p = 1.0;
  int stars = 0;  // 2 if p < 0.01, 1 if p < 0.05, else 0
};

inline const char* star_string(int stars) {
  return stars >= 2 ? "**" : (stars == 1 ? "*" : "");
}

// Two-sided thresholds behind the stars; every table footnotes them.
inline constexpr double kStarThreshold1 = 0.05;
inline constexpr double kStarThreshold2 = 0.01;

double normal_cdf(double z);
int significance_stars(double p);

// Average marginal effect of switching between two designs (focus off / on),
// delta-method standard error from cov (or cov_override when supplied).
AmeResult ame_contrast(const FitResult& fit, const Eigen::MatrixXd& x_off,
                       const Eigen::MatrixXd& x_on,
                       const std::optional<Eigen::MatrixXd>& cov_override = {});

// Convenience form for a binary focus column inside X.
AmeResult ame_binary(const FitResult& fit, int focus, const Eigen::MatrixXd& X,
                     const std::optional<Eigen::MatrixXd>& cov_override = {});

// Gradient of the AME in beta; exposed for the finite-difference checks.
Eigen::VectorXd ame_gradient(const Eigen::VectorXd& beta,
                             const Eigen::MatrixXd& x_off,
                             const Eigen::MatrixXd& x_on);
double ame_point(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x_off,
                 const Eigen::MatrixXd& x_on);

}  // namespace blocklogit
