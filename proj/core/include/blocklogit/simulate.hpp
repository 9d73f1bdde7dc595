#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blocklogit/dataset.hpp"
#include "blocklogit/methods.hpp"

namespace blocklogit {

// Hierarchical survey generator: countries > interviewers > respondents.
// The outcome indicator follows a logit on (intercept, focus, r_numeracy,
// r_female); interviewer expectations heap on focal values; missingness is
// two-level MAR with propensities restricted to always-observed columns.
struct SimConfig {
  std::uint64_t seed = 1;
  bool seed_set = false;

  int countries = 12;
  int interviewers_per_country = 15;
  double respondents_per_interviewer_mean = 12.0;
  bool respondents_fixed = false;  // exact count per interviewer

  double beta_intercept = 0.3;
  double beta_focus = 0.7;
  std::map<std::string, double> beta_controls = {{"r_numeracy", 0.4},
                                                 {"r_female", -0.2}};

  // expectation heaping mass: multiples of 10, multiples of 5, uniform
  double heap_mult10 = 0.7;
  double heap_mult5 = 0.2;
  double heap_uniform = 0.1;

  double iw_female_p = 0.72;
  double iw_age_mean = 51.4;
  double iw_age_sd = 11.8;
  double iw_health_p = 0.585;
  double r_female_p = 0.552;
  double r_age_mean = 65.8;
  double r_age_sd = 8.1;
  double r_numeracy_p = 0.657;

  // logit coefficients; key "intercept" plus always-observed column names,
  // and "@iws_missing" for the capi propensity
  std::map<std::string, double> iws_propensity = {{"intercept", -30.0}};
  std::map<std::string, double> capi_propensity = {{"intercept", -30.0}};

  std::vector<std::string> iws_maskable = {"iw_expect", "iw_health"};
  std::vector<std::string> capi_maskable = {"r_numeracy"};

  static SimConfig from_json_file(const std::string& path);
  static SimConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  // MAR by construction: no propensity may read a maskable column.
  void validate() const;
  Schema schema() const;
  std::vector<std::string> beta_names() const;
  Eigen::VectorXd beta_vector() const;
};

struct TruthRecord {
  std::vector<std::string> beta_names;
  Eigen::VectorXd beta_true;
  double true_ame = 0.0;  // exact over the generated population
  std::map<std::string, double> country_medians;
};

std::pair<Dataset, TruthRecord> gen_population(const SimConfig& config);

Dataset apply_missingness(const Dataset& complete, const SimConfig& config);

std::string country_code(int index);  // 1-based; table row order, then C13..

struct McMethodOutcome {
  bool ok = false;
  std::string error;
  double estimate = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covers = false;
};

struct McReplication {
  int rep = 0;
  double truth = 0.0;
  std::vector<McMethodOutcome> methods;  // cca, fi-mi, bbma-bic, bbma-aic
};

struct McMethodAggregate {
  MethodKind method = MethodKind::Cca;
  int ok = 0;
  int failed = 0;
  double mean_estimate = 0.0;
  double mean_bias = 0.0;
  double mc_se_bias = 0.0;   // empirical sd of estimates / sqrt(ok)
  double empirical_sd = 0.0;
  double mean_se = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;
};

struct MonteCarloReport {
  int replications = 0;
  std::uint64_t seed = 0;
  int m = 0;
  std::vector<McReplication> reps;
  std::vector<McMethodAggregate> methods;

  void write_methods_csv(const std::string& path) const;
  void write_reps_csv(const std::string& path) const;
  std::string summary_text() const;
};

struct MonteCarloOptions {
  int m = 20;
  int threads = 0;  // 0 = hardware concurrency
  ImputeOptions impute;
  bool cluster_se = false;
  MaOrder ma_order = MaOrder::PoolFirst;
};

MonteCarloReport monte_carlo(const SimConfig& config, int replications,
                             const MonteCarloOptions& options = {});

}  // namespace blocklogit
