#include "blocklogit/methods.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "blocklogit/errors.hpp"

namespace blocklogit {

const char* to_string(MethodKind m) {
  switch (m) {
    case MethodKind::Cca: return "cca";
    case MethodKind::FiMi: return "fi-mi";
    case MethodKind::BbmaBic: return "bbma-bic";
    case MethodKind::BbmaAic: return "bbma-aic";
  }
  return "?";
}

MethodKind parse_method(const std::string& text) {
  if (text == "cca") return MethodKind::Cca;
  if (text == "fi-mi") return MethodKind::FiMi;
  if (text == "bbma-bic") return MethodKind::BbmaBic;
  if (text == "bbma-aic") return MethodKind::BbmaAic;
  fail_validation("cli/BadMethod", "unknown method '" + text + "'");
}

namespace {

double normal_quantile(double p) {
  boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

double t_quantile(double p, double df) {
  if (!std::isfinite(df) || df > 1e8) return normal_quantile(p);
  boost::math::students_t dist(df);
  return boost::math::quantile(dist, p);
}

double t_two_sided_p(double z, double df) {
  const double az = std::abs(z);
  if (!std::isfinite(df) || df > 1e8) {
    return 2.0 * (1.0 - normal_cdf(az));
  }
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, az));
}

ImputationSet& ensure_imputations(MethodSetup& setup) {
  if (!setup.imputations) {
    setup.imputations = multiple_impute(setup.eligible, setup.options.m,
                                        setup.options.seed, setup.options.impute);
  }
  return *setup.imputations;
}

MethodEstimate estimate_cca(MethodSetup& setup) {
  const Dataset cc = complete_case_subset(setup.eligible, setup.patterns);
  const Design design = build_design(cc, setup.model, setup.thresholds_ptr());
  const FitResult fit = fit_logit(design.y, design.X, setup.options.logit);

  std::optional<Eigen::MatrixXd> cov;
  if (setup.options.cluster_se) {
    cov = cluster_robust_cov(fit, design.cluster);
  }

  MethodEstimate out;
  out.method = MethodKind::Cca;
  out.ame = ame_binary(fit, design.focus_col, design.X, cov);
  out.df = std::numeric_limits<double>::infinity();
  const double q = normal_quantile(0.5 + setup.options.ci_level / 2.0);
  out.ci_lo = out.ame.ame - q * out.ame.se;
  out.ci_hi = out.ame.ame + q * out.ame.se;
  out.coef = fit.beta[design.focus_col];
  const double var = cov ? (*cov)(design.focus_col, design.focus_col)
                         : fit.cov(design.focus_col, design.focus_col);
  out.coef_se = std::sqrt(std::max(0.0, var));
  out.n_used = fit.n;
  return out;
}

MethodEstimate estimate_fi_mi(MethodSetup& setup) {
  const ImputationSet& imputations = ensure_imputations(setup);

  std::vector<double> ame_est;
  std::vector<double> ame_var;
  std::vector<double> coef_est;
  std::vector<double> coef_var;
  std::int64_t n_used = 0;
  for (const Dataset& completed : imputations.completed) {
    const Design design =
        build_design(completed, setup.model, setup.thresholds_ptr());
    const FitResult fit = fit_logit(design.y, design.X, setup.options.logit);
    std::optional<Eigen::MatrixXd> cov;
    if (setup.options.cluster_se) {
      cov = cluster_robust_cov(fit, design.cluster);
    }
    const AmeResult ame = ame_binary(fit, design.focus_col, design.X, cov);
    ame_est.push_back(ame.ame);
    ame_var.push_back(ame.se * ame.se);
    coef_est.push_back(fit.beta[design.focus_col]);
    coef_var.push_back(cov ? (*cov)(design.focus_col, design.focus_col)
                           : fit.cov(design.focus_col, design.focus_col));
    n_used = fit.n;
  }

  const PooledEstimate pooled = rubin_pool(ame_est, ame_var);

  MethodEstimate out;
  out.method = MethodKind::FiMi;
  out.ame.ame = pooled.qbar;
  out.ame.se = std::sqrt(std::max(0.0, pooled.t));
  if (out.ame.se > 0.0) {
    out.ame.z = out.ame.ame / out.ame.se;
    out.ame.p = t_two_sided_p(out.ame.z, pooled.df);
  }
  out.ame.stars = significance_stars(out.ame.p);
  out.df = pooled.df;
  const double q = t_quantile(0.5 + setup.options.ci_level / 2.0, pooled.df);
  out.ci_lo = out.ame.ame - q * out.ame.se;
  out.ci_hi = out.ame.ame + q * out.ame.se;

  const PooledEstimate pooled_coef = rubin_pool(coef_est, coef_var);
  out.coef = pooled_coef.qbar;
  out.coef_se = std::sqrt(std::max(0.0, pooled_coef.t));
  out.m_used = imputations.m;
  out.n_used = n_used;
  return out;
}

MethodEstimate estimate_bbma(MethodSetup& setup, Criterion criterion) {
  const ImputationSet& imputations = ensure_imputations(setup);

  MiAverageOptions options;
  options.criterion = criterion;
  options.order = setup.options.ma_order;
  options.statistic = AveragedStatistic::FocusAme;
  options.cluster_se = setup.options.cluster_se;
  options.logit = setup.options.logit;

  const AveragedEstimate averaged =
      mi_model_average(imputations, setup.patterns, setup.model, options,
                       setup.thresholds_ptr());

  MethodEstimate out;
  out.method = criterion == Criterion::Bic ? MethodKind::BbmaBic : MethodKind::BbmaAic;
  out.ame.ame = averaged.beta_ma;
  out.ame.se = std::sqrt(std::max(0.0, averaged.var_ma));
  if (out.ame.se > 0.0) {
    out.ame.z = out.ame.ame / out.ame.se;
    out.ame.p = 2.0 * (1.0 - normal_cdf(std::abs(out.ame.z)));
  }
  out.ame.stars = significance_stars(out.ame.p);
  out.df = std::numeric_limits<double>::infinity();
  const double q = normal_quantile(0.5 + setup.options.ci_level / 2.0);
  out.ci_lo = out.ame.ame - q * out.ame.se;
  out.ci_hi = out.ame.ame + q * out.ame.se;
  out.m_used = imputations.m;
  out.n_used = setup.eligible.nrow();
  out.averaged = averaged;

  if (setup.options.want_coefficient) {
    MiAverageOptions coef_options = options;
    coef_options.statistic = AveragedStatistic::FocusCoefficient;
    const AveragedEstimate coef_avg =
        mi_model_average(imputations, setup.patterns, setup.model, coef_options,
                         setup.thresholds_ptr());
    out.coef = coef_avg.beta_ma;
    out.coef_se = std::sqrt(std::max(0.0, coef_avg.var_ma));
  }
  return out;
}

}  // namespace

MethodSetup prepare_analysis(const Dataset& dataset, const ModelSpec& model,
                             const EstimateOptions& options) {
  MethodSetup setup;
  setup.options = options;
  setup.model = model;

  // eligible respondents: rows with the item's outcome observed
  const int outcome_col = dataset.require_column(model.outcome);
  std::vector<std::int64_t> rows;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (dataset.observed(outcome_col, r)) rows.push_back(r);
  }
  if (rows.empty()) {
    fail_estimation("tabular/EmptyEligibleSet",
                    "no eligible rows for item '" + model.outcome + "'");
  }
  setup.eligible = dataset.subset(rows);

  if (model.focus.empty()) {
    setup.thresholds = focus_thresholds(setup.eligible);
  }
  setup.patterns = detect_patterns(setup.eligible);
  return setup;
}

MethodEstimate run_method(MethodSetup& setup, MethodKind kind) {
  switch (kind) {
    case MethodKind::Cca: return estimate_cca(setup);
    case MethodKind::FiMi: return estimate_fi_mi(setup);
    case MethodKind::BbmaBic: return estimate_bbma(setup, Criterion::Bic);
    case MethodKind::BbmaAic: return estimate_bbma(setup, Criterion::Aic);
  }
  fail_validation("cli/BadMethod", "unhandled method");
}

}  // namespace blocklogit
