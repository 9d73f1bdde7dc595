#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blocklogit/dataset.hpp"

namespace blocklogit {

struct ImputeOptions {
  int burn_in = 10;       // FCS sweeps before a completed dataset is taken
  int pmm_donors = 5;     // predictive-mean-matching donor pool
  double age_window = 10; // |difference| window for continuous roster matching
};

struct ChainDiagnostics {
  int iterations = 0;
  std::map<std::string, std::int64_t> imputed_counts;
  std::vector<std::string> warnings;
};

// M completed datasets. All datasets agree on every originally observed cell;
// within one imputation every respondent of a given interviewer carries the
// same interviewer-variable values.
struct ImputationSet {
  int m = 0;
  std::uint64_t seed = 0;
  std::vector<Dataset> completed;
  std::vector<std::uint64_t> sub_seeds;
  std::vector<ChainDiagnostics> chains;
};

// One row per interviewer: country, roster attributes, iws variables.
// Fails if a broadcast interviewer variable varies within an interviewer.
Dataset collapse_interviewers(const Dataset& dataset);

// Joint hot-deck at the interviewer level: every recipient takes all of its
// missing iws values from a single same-country donor, preferring donors that
// agree on the observed roster attributes (binary exact, continuous within
// the age window).
Dataset hot_deck_interviewers(const Dataset& interviewer_table, std::uint64_t seed,
                              const ImputeOptions& options = {});

// Chained-equation sweep over the maskable respondent variables, visiting
// columns in ascending missing-fraction order. Binary columns are imputed by
// posterior logistic draws, continuous ones by type-1 PMM.
Dataset fcs_chain(const Dataset& dataset, int iterations, std::uint64_t seed,
                  const ImputeOptions& options = {},
                  ChainDiagnostics* diagnostics = nullptr);

// Every masked cell replaced by a draw from the column's observed values.
// Used to initialize chains and wherever an arbitrary full-rank fill is
// needed.
Dataset marginal_fill(const Dataset& dataset, std::uint64_t seed);

// Two sequential samplers per imputation: interviewer-level hot-deck
// broadcast to respondent rows, then the respondent-level FCS chain.
ImputationSet multiple_impute(const Dataset& dataset, int m, std::uint64_t seed,
                              const ImputeOptions& options = {});

void save_imputation_set(const ImputationSet& set, const std::string& directory);

struct PooledEstimate {
  double qbar = 0.0;  // pooled point estimate
  double ubar = 0.0;  // within-imputation variance
  double b = 0.0;     // between-imputation variance
  double t = 0.0;     // total variance
  double fmi = 0.0;   // (1+1/M) b / t
  double fmi_df_adjusted = 0.0;
  double df = 0.0;    // Rubin degrees of freedom, +inf when b = 0
  int m = 0;
};

PooledEstimate rubin_pool(const std::vector<double>& estimates,
                          const std::vector<double>& variances);

// ceil(100 * fmi), never below 2
int choose_m(double fmi);

}  // namespace blocklogit
