#include "blocklogit/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "blocklogit/errors.hpp"

namespace blocklogit {

const char* to_string(Criterion c) {
  return c == Criterion::Bic ? "BIC" : "AIC";
}

const char* to_string(MaOrder o) {
  return o == MaOrder::PoolFirst ? "pool-first" : "average-first";
}

std::string SubmodelId::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int b = 1; b <= h; ++b) {
    if (includes(b)) {
      if (!first) out += ' ';
      out += std::to_string(b);
      first = false;
    }
  }
  out += '}';
  return out;
}

std::vector<SubmodelId> enumerate_submodels(int h) {
  if (h < 0 || h > 20) {
    fail_validation("averaging/ModelSpaceTooLarge",
                    "2^" + std::to_string(h) + " submodels exceed the cap of 2^20");
  }
  std::vector<SubmodelId> out;
  out.reserve(1u << h);
  for (std::uint32_t mask = 0; mask < (1u << h); ++mask) {
    out.push_back(SubmodelId{mask, h});
  }
  return out;
}

FitResult fit_submodel(const SubmodelId& id, const GrandDesign& design,
                       const LogitOptions& options) {
  if (id.h != design.block_count()) {
    fail_validation("averaging/LengthMismatch",
                    "submodel id refers to " + std::to_string(id.h) +
                        " blocks, design has " +
                        std::to_string(design.block_count()));
  }
  return fit_logit(design.y, design.matrix_for(id.blocks), options);
}

std::vector<double> ic_weights(const std::vector<double>& ics) {
  if (ics.empty()) {
    fail_validation("averaging/LengthMismatch", "empty criterion vector");
  }
  for (double ic : ics) {
    if (!std::isfinite(ic)) {
      fail_estimation("averaging/NonFiniteIC",
                      "non-finite information criterion value");
    }
  }
  const double best = *std::min_element(ics.begin(), ics.end());
  std::vector<double> weights(ics.size());
  double total = 0.0;
  for (std::size_t i = 0; i < ics.size(); ++i) {
    weights[i] = std::exp(-0.5 * (ics[i] - best));
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

double buckland_variance(const std::vector<double>& betas,
                         const std::vector<double>& variances,
                         const std::vector<double>& lambda, double beta_ma) {
  double s = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double d = betas[i] - beta_ma;
    s += lambda[i] * std::sqrt(variances[i] + d * d);
  }
  return s * s;
}

AveragedEstimate model_average(const std::vector<double>& betas,
                               const std::vector<double>& variances,
                               const std::vector<double>& lambda) {
  if (betas.size() != variances.size() || betas.size() != lambda.size()) {
    fail_validation("averaging/LengthMismatch",
                    "betas, variances, lambda must have equal lengths");
  }
  double total = 0.0;
  for (double l : lambda) {
    if (l < 0.0) {
      fail_validation("averaging/InvalidWeights", "negative weight");
    }
    total += l;
  }
  if (std::abs(total - 1.0) > 1e-8) {
    fail_validation("averaging/InvalidWeights",
                    "weights sum to " + std::to_string(total));
  }

  AveragedEstimate out;
  out.beta_ma = 0.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    out.beta_ma += lambda[i] * betas[i];
  }
  out.var_ma = buckland_variance(betas, variances, lambda, out.beta_ma);
  out.submodels.resize(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    out.submodels[i].estimate = betas[i];
    out.submodels[i].variance = variances[i];
    out.submodels[i].lambda = lambda[i];
  }
  return out;
}

namespace {

struct GridCell {
  double estimate = 0.0;
  double variance = 0.0;
  double log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int k = 0;
};

GridCell evaluate_cell(const SubmodelId& id, const GrandDesign& design,
                       const MiAverageOptions& options) {
  const Eigen::MatrixXd X = design.matrix_for(id.blocks);
  const FitResult fit = fit_logit(design.y, X, options.logit);

  std::optional<Eigen::MatrixXd> cov;
  if (options.cluster_se) {
    if (design.cluster.empty()) {
      fail_validation("averaging/LengthMismatch",
                      "cluster standard errors need an interviewer-id role");
    }
    cov = cluster_robust_cov(fit, design.cluster);
  }

  GridCell cell;
  cell.log_lik = fit.log_lik;
  cell.aic = fit.aic;
  cell.bic = fit.bic;
  cell.k = fit.k;
  if (options.statistic == AveragedStatistic::FocusCoefficient) {
    const int f = design.focus_col;
    cell.estimate = fit.beta[f];
    cell.variance = cov ? (*cov)(f, f) : fit.cov(f, f);
  } else {
    const auto [x_off, x_on] = design.focus_contrast_for(id.blocks);
    const AmeResult ame = ame_contrast(fit, x_off, x_on, cov);
    cell.estimate = ame.ame;
    cell.variance = ame.se * ame.se;
  }
  return cell;
}

}  // namespace

AveragedEstimate mi_model_average(const ImputationSet& imputations,
                                  const PatternSet& patterns,
                                  const ModelSpec& model,
                                  const MiAverageOptions& options,
                                  const FocusThresholds* thresholds) {
  if (imputations.completed.empty()) {
    fail_validation("averaging/LengthMismatch", "empty imputation set");
  }
  const int m = static_cast<int>(imputations.completed.size());

  // Assemble every completed design; merging is deterministic so all M share
  // the same block structure.
  std::vector<GrandDesign> designs;
  designs.reserve(m);
  for (const Dataset& completed : imputations.completed) {
    designs.push_back(
        assemble_grand_design(completed, patterns, model, thresholds));
  }
  const int h = designs.front().block_count();
  const auto ids = enumerate_submodels(h);
  const auto r_count = ids.size();

  // grid[r][m]
  std::vector<std::vector<GridCell>> grid(r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    grid[r].reserve(m);
    for (int i = 0; i < m; ++i) {
      grid[r].push_back(evaluate_cell(ids[r], designs[i], options));
    }
  }

  // Pooled per-submodel summaries drive the diagnostics table in both orders.
  std::vector<SubmodelSummary> summaries(r_count);
  std::vector<double> mean_aic(r_count);
  std::vector<double> mean_bic(r_count);
  for (std::size_t r = 0; r < r_count; ++r) {
    std::vector<double> est;
    std::vector<double> var;
    double aic = 0.0;
    double bic = 0.0;
    double log_lik = 0.0;
    for (const GridCell& cell : grid[r]) {
      est.push_back(cell.estimate);
      var.push_back(cell.variance);
      aic += cell.aic;
      bic += cell.bic;
      log_lik += cell.log_lik;
    }
    SubmodelSummary& s = summaries[r];
    s.id = ids[r];
    s.k = grid[r].front().k;
    s.aic = aic / m;
    s.bic = bic / m;
    s.log_lik = log_lik / m;
    if (m >= 2) {
      const PooledEstimate pooled = rubin_pool(est, var);
      s.estimate = pooled.qbar;
      s.variance = pooled.t;
    } else {
      s.estimate = est.front();
      s.variance = var.front();
    }
    mean_aic[r] = s.aic;
    mean_bic[r] = s.bic;
  }

  const std::vector<double> lambda_aic = ic_weights(mean_aic);
  const std::vector<double> lambda_bic = ic_weights(mean_bic);
  const std::vector<double>& lambda =
      options.criterion == Criterion::Bic ? lambda_bic : lambda_aic;
  for (std::size_t r = 0; r < r_count; ++r) {
    summaries[r].lambda_aic = lambda_aic[r];
    summaries[r].lambda_bic = lambda_bic[r];
    summaries[r].lambda = lambda[r];
    summaries[r].ic = options.criterion == Criterion::Bic ? summaries[r].bic
                                                          : summaries[r].aic;
  }

  AveragedEstimate out;
  out.criterion = options.criterion;
  out.submodels = summaries;

  if (options.order == MaOrder::PoolFirst) {
    std::vector<double> est(r_count);
    std::vector<double> var(r_count);
    for (std::size_t r = 0; r < r_count; ++r) {
      est[r] = summaries[r].estimate;
      var[r] = summaries[r].variance;
    }
    out.beta_ma = std::inner_product(lambda.begin(), lambda.end(), est.begin(), 0.0);
    out.var_ma = buckland_variance(est, var, lambda, out.beta_ma);
  } else {
    // AverageFirst: weights within each imputation, then Rubin over the M
    // averaged estimates.
    std::vector<double> est_m(m);
    std::vector<double> var_m(m);
    for (int i = 0; i < m; ++i) {
      std::vector<double> ics(r_count);
      std::vector<double> est(r_count);
      std::vector<double> var(r_count);
      for (std::size_t r = 0; r < r_count; ++r) {
        const GridCell& cell = grid[r][i];
        ics[r] = options.criterion == Criterion::Bic ? cell.bic : cell.aic;
        est[r] = cell.estimate;
        var[r] = cell.variance;
      }
      const auto w = ic_weights(ics);
      est_m[i] = std::inner_product(w.begin(), w.end(), est.begin(), 0.0);
      var_m[i] = buckland_variance(est, var, w, est_m[i]);
    }
    if (m >= 2) {
      const PooledEstimate pooled = rubin_pool(est_m, var_m);
      out.beta_ma = pooled.qbar;
      out.var_ma = pooled.t;
    } else {
      out.beta_ma = est_m.front();
      out.var_ma = var_m.front();
    }
  }
  return out;
}

void write_submodel_csv(const AveragedEstimate& averaged, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    fail_validation("tabular/WriteError", "cannot write " + path);
  }
  out << "r,blocks,k,logL,aic,bic,lambda_aic,lambda_bic,beta_focus,se\n";
  char buf[256];
  for (const auto& s : averaged.submodels) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  s.id.r(), s.id.to_string().c_str(), s.k, s.log_lik, s.aic,
                  s.bic, s.lambda_aic, s.lambda_bic, s.estimate,
                  std::sqrt(std::max(0.0, s.variance)));
    out << buf;
  }
}

}  // namespace blocklogit
