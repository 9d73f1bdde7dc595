#include "blocklogit/logit.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "blocklogit/errors.hpp"

namespace blocklogit {

double logistic_cdf(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

int significance_stars(double p) {
  if (p < kStarThreshold2) return 2;
  if (p < kStarThreshold1) return 1;
  return 0;
}

double log_likelihood(const Eigen::VectorXd& beta, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& X) {
  if (y.size() != X.rows() || beta.size() != X.cols()) {
    fail_validation("logit/DimensionMismatch",
                    "log_likelihood: y " + std::to_string(y.size()) + ", X " +
                        std::to_string(X.rows()) + "x" + std::to_string(X.cols()) +
                        ", beta " + std::to_string(beta.size()));
  }
  const Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double e = eta[i];
    // y*eta - log(1 + exp(eta)), folded so the exp argument is never positive
    if (e >= 0.0) {
      ll += (y[i] - 1.0) * e - std::log1p(std::exp(-e));
    } else {
      ll += y[i] * e - std::log1p(std::exp(e));
    }
  }
  return ll;
}

std::pair<double, double> information_criteria(double log_lik, int k,
                                               std::int64_t n) {
  const double aic = -2.0 * log_lik + 2.0 * k;
  const double bic = -2.0 * log_lik + k * std::log(static_cast<double>(n));
  return {aic, bic};
}

std::pair<double, double> information_criteria(const FitResult& fit) {
  if (!fit.converged) {
    fail_estimation("logit/NotConverged",
                    "information criteria requested on a non-converged fit");
  }
  return information_criteria(fit.log_lik, fit.k, fit.n);
}

namespace {

// Per-column scale for separation detection: population sd, constant
// columns (intercept) fall back to 1 so raw |beta| applies.
Eigen::VectorXd column_scales(const Eigen::MatrixXd& X) {
  Eigen::VectorXd scales(X.cols());
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    scales[j] = sd > 1e-12 ? sd : 1.0;
  }
  return scales;
}

}  // namespace

FitResult fit_logit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                    const LogitOptions& options) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n) {
    fail_validation("logit/DimensionMismatch",
                    "y has " + std::to_string(y.size()) + " rows, X has " +
                        std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      fail_validation("logit/DimensionMismatch",
                      "y must be 0/1, got " + std::to_string(y[i]));
    }
  }

  FitResult fit;
  fit.n = n;
  fit.k = static_cast<int>(k);
  fit.y = y;
  fit.X = X;

  if (k == 0) {
    fit.beta = Eigen::VectorXd(0);
    fit.cov = Eigen::MatrixXd(0, 0);
    fit.log_lik = log_likelihood(fit.beta, y, X);
    fit.converged = true;
    std::tie(fit.aic, fit.bic) = information_criteria(fit.log_lik, 0, n);
    return fit;
  }

  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
      fail_estimation("logit/RankDeficient",
                      "design matrix has rank " + std::to_string(qr.rank()) +
                          " < " + std::to_string(k) + " columns");
    }
  }

  const Eigen::VectorXd scales = column_scales(X);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  double ll = log_likelihood(beta, y, X);
  Eigen::MatrixXd info(k, k);

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu[i] = logistic_cdf(eta[i]);
      w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-10);
    }
    const Eigen::VectorXd score = X.transpose() * (y - mu);
    info = X.transpose() * w.asDiagonal() * X;

    if (score.lpNorm<Eigen::Infinity>() < options.score_tol) {
      fit.converged = true;
      fit.iterations = iter;
      break;
    }
    if (iter == options.max_iterations) break;

    const Eigen::VectorXd step = info.ldlt().solve(score);
    double stepsize = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double candidate_ll = log_likelihood(candidate, y, X);
    for (int halving = 0;
         (!std::isfinite(candidate_ll) || candidate_ll < ll) && halving < 30;
         ++halving) {
      stepsize *= 0.5;
      candidate = beta + stepsize * step;
      candidate_ll = log_likelihood(candidate, y, X);
    }
    beta = candidate;

    for (Eigen::Index j = 0; j < k; ++j) {
      if (std::abs(beta[j]) * scales[j] > options.separation_threshold) {
        fail_estimation("logit/PerfectSeparation",
                        "coefficient " + std::to_string(j) +
                            " diverged past the standardized threshold " +
                            std::to_string(options.separation_threshold));
      }
    }

    const double rel_change = std::abs(candidate_ll - ll) / (std::abs(ll) + 1.0);
    ll = candidate_ll;
    if (rel_change < options.loglik_rel_tol) {
      // recompute curvature at the accepted point before stopping
      const Eigen::VectorXd eta2 = X * beta;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double m = logistic_cdf(eta2[i]);
        w[i] = std::max(m * (1.0 - m), 1e-10);
      }
      info = X.transpose() * w.asDiagonal() * X;
      fit.converged = true;
      fit.iterations = iter + 1;
      break;
    }
  }

  if (!fit.converged) {
    fail_estimation("logit/NotConverged",
                    "IRLS did not converge in " +
                        std::to_string(options.max_iterations) + " iterations");
  }

  // Separation can also surface as a flattened log-likelihood: the score
  // drops below tolerance purely because fitted probabilities saturate along
  // the diverging direction. A converged fit with a saturated observation is
  // not a maximum.
  {
    const Eigen::VectorXd eta = X * beta;
    if (eta.lpNorm<Eigen::Infinity>() > 16.0) {
      fail_estimation("logit/PerfectSeparation",
                      "log-likelihood flattened with saturated fitted "
                      "probabilities (max |eta| = " +
                          std::to_string(eta.lpNorm<Eigen::Infinity>()) + ")");
    }
  }

  fit.beta = beta;
  fit.log_lik = ll;
  fit.cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose().eval());
  std::tie(fit.aic, fit.bic) = information_criteria(fit.log_lik, fit.k, fit.n);
  return fit;
}

Eigen::MatrixXd cluster_robust_cov(const FitResult& fit,
                                   const std::vector<std::int64_t>& cluster) {
  const Eigen::Index n = fit.X.rows();
  const Eigen::Index k = fit.X.cols();
  if (static_cast<Eigen::Index>(cluster.size()) != n) {
    fail_validation("logit/DimensionMismatch",
                    "cluster vector length " + std::to_string(cluster.size()) +
                        " != n " + std::to_string(n));
  }

  const Eigen::VectorXd eta = fit.X * fit.beta;
  Eigen::VectorXd resid(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = logistic_cdf(eta[i]);
    resid[i] = fit.y[i] - mu;
    w[i] = std::max(mu * (1.0 - mu), 1e-10);
  }

  std::unordered_map<std::int64_t, Eigen::VectorXd> sums;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto it = sums.try_emplace(cluster[i], Eigen::VectorXd::Zero(k)).first;
    it->second += resid[i] * fit.X.row(i).transpose();
  }
  const auto g = static_cast<double>(sums.size());
  if (sums.size() < 2) {
    fail_estimation("logit/TooFewClusters",
                    "cluster-robust covariance needs at least 2 clusters, got " +
                        std::to_string(sums.size()));
  }

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, s] : sums) {
    meat += s * s.transpose();
  }

  const Eigen::MatrixXd bread =
      (fit.X.transpose() * w.asDiagonal() * fit.X)
          .ldlt()
          .solve(Eigen::MatrixXd::Identity(k, k));
  const double nn = static_cast<double>(n);
  const double correction = g / (g - 1.0) * (nn - 1.0) / (nn - fit.k);
  Eigen::MatrixXd cov = correction * bread * meat * bread;
  return 0.5 * (cov + cov.transpose().eval());
}

double ame_point(const Eigen::VectorXd& beta, const Eigen::MatrixXd& x_off,
                 const Eigen::MatrixXd& x_on) {
  const Eigen::VectorXd eta0 = x_off * beta;
  const Eigen::VectorXd eta1 = x_on * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta0.size(); ++i) {
    total += logistic_cdf(eta1[i]) - logistic_cdf(eta0[i]);
  }
  return total / static_cast<double>(eta0.size());
}

Eigen::VectorXd ame_gradient(const Eigen::VectorXd& beta,
                             const Eigen::MatrixXd& x_off,
                             const Eigen::MatrixXd& x_on) {
  const Eigen::VectorXd eta0 = x_off * beta;
  const Eigen::VectorXd eta1 = x_on * beta;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(beta.size());
  for (Eigen::Index i = 0; i < eta0.size(); ++i) {
    const double l1 = logistic_cdf(eta1[i]);
    const double l0 = logistic_cdf(eta0[i]);
    grad += l1 * (1.0 - l1) * x_on.row(i).transpose() -
            l0 * (1.0 - l0) * x_off.row(i).transpose();
  }
  return grad / static_cast<double>(eta0.size());
}

AmeResult ame_contrast(const FitResult& fit, const Eigen::MatrixXd& x_off,
                       const Eigen::MatrixXd& x_on,
                       const std::optional<Eigen::MatrixXd>& cov_override) {
  if (x_off.rows() != x_on.rows() || x_off.cols() != fit.beta.size() ||
      x_on.cols() != fit.beta.size()) {
    fail_validation("logit/DimensionMismatch", "ame_contrast design mismatch");
  }
  const Eigen::MatrixXd& cov = cov_override ? *cov_override : fit.cov;

  AmeResult out;
  out.ame = ame_point(fit.beta, x_off, x_on);
  const Eigen::VectorXd grad = ame_gradient(fit.beta, x_off, x_on);
  out.se = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  if (out.se > 0.0) {
    out.z = out.ame / out.se;
    out.p = 2.0 * (1.0 - normal_cdf(std::abs(out.z)));
  } else {
    out.z = 0.0;
    out.p = 1.0;
  }
  out.stars = significance_stars(out.p);
  return out;
}

AmeResult ame_binary(const FitResult& fit, int focus, const Eigen::MatrixXd& X,
                     const std::optional<Eigen::MatrixXd>& cov_override) {
  if (focus < 0 || focus >= X.cols()) {
    fail_validation("logit/FocusNotBinary",
                    "focus column " + std::to_string(focus) + " out of range");
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double v = X(i, focus);
    if (v != 0.0 && v != 1.0) {
      fail_validation("logit/FocusNotBinary",
                      "focus column contains " + std::to_string(v));
    }
  }
  Eigen::MatrixXd x_off = X;
  Eigen::MatrixXd x_on = X;
  x_off.col(focus).setZero();
  x_on.col(focus).setOnes();
  return ame_contrast(fit, x_off, x_on, cov_override);
}

}  // namespace blocklogit
