#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blocklogit/dataset.hpp"

namespace blocklogit {

// Group-level missingness patterns. Pattern id 0 is the complete pattern;
// ids 1..H are the distinct incomplete group masks in first-occurrence order.
struct PatternSet {
  std::vector<std::uint32_t> incomplete_masks;  // bit g set = group g missing
  std::vector<int> assignment;                  // per row, 0..H
  std::vector<std::int64_t> counts;             // size H+1, counts[0] = complete
  std::vector<std::string> group_names;

  int pattern_count() const { return static_cast<int>(incomplete_masks.size()); }
  std::string mask_string(std::uint32_t mask) const;
};

// Median split of interviewer expectations within country: 1 iff the value
// strictly exceeds the median of the non-missing values of its country.
std::vector<std::optional<double>> build_focus_indicator(
    const std::vector<std::optional<double>>& values,
    const std::vector<std::int64_t>& country);

// The two-step form used by the estimation pipelines: thresholds are fixed
// from the originally observed (reporting) interviewers and then applied to
// observed and imputed values alike, so the complete-case rows keep the same
// indicator in every method.
std::map<std::string, double> expectation_medians_by_country(
    const Dataset& dataset);

struct FocusThresholds {
  std::map<std::string, double> median_by_country;
};

FocusThresholds focus_thresholds(const Dataset& dataset);

// Per-row focus indicator from the expectation column; missing propagates.
std::vector<std::optional<double>> focus_for_rows(const Dataset& dataset,
                                                  const FocusThresholds& thresholds);

PatternSet detect_patterns(const Dataset& dataset,
                           const std::vector<std::vector<std::string>>& groups,
                           const std::vector<std::string>& group_names = {});

// Groups taken from the schema: iws columns then capi columns.
PatternSet detect_patterns(const Dataset& dataset);

Dataset complete_case_subset(const Dataset& dataset, const PatternSet& patterns);

// Incomplete patterns with fewer than k_design+1 rows cannot support their
// own interaction block; they are folded into the Hamming-nearest larger
// incomplete pattern.
PatternSet merge_small_patterns(const PatternSet& patterns, int k_design,
                                std::vector<std::string>* warnings);

// Analysis model resolved from schema roles.
struct ModelSpec {
  std::string outcome;
  std::string focus;        // binary focus column, or
  std::string expectation;  // expectation column split at the country median
  std::vector<std::string> controls;

  static ModelSpec from_schema(const Schema& schema, const std::string& outcome_item);
};

// Plain design matrix (intercept, focus, controls) over rows whose outcome
// and regressors are all observed. Categorical controls are one-hot expanded
// here, not at load time.
struct Design {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  int focus_col = -1;
  std::vector<std::int64_t> rows;          // positions in the source dataset
  std::vector<std::int64_t> cluster;       // interviewer codes, empty if unbound
};

Design build_design(const Dataset& dataset, const ModelSpec& model,
                    const FocusThresholds* thresholds = nullptr);

// Grand-model design: fill-in regressors W plus one interaction block per
// incomplete pattern, Zblock_h = diag(1{row in h}) * W. The block carries its
// own copy of the intercept so the fully unrestricted grand model reproduces
// the complete-case estimate of the W coefficients exactly.
struct GrandDesign {
  Eigen::VectorXd y;
  Eigen::MatrixXd W;
  std::vector<Eigen::MatrixXd> zblocks;
  std::vector<std::string> names;  // W column names
  int focus_col = -1;
  PatternSet patterns;             // after small-pattern merging
  std::vector<std::int64_t> cluster;
  std::vector<std::string> warnings;

  int block_count() const { return static_cast<int>(zblocks.size()); }
  int k_fill() const { return static_cast<int>(W.cols()); }

  // [W | Z_h for h in mask] with blocks in ascending h order.
  Eigen::MatrixXd matrix_for(std::uint32_t block_mask) const;
  std::vector<std::string> names_for(std::uint32_t block_mask) const;

  // Designs with the focus switched off/on everywhere, interactions rebuilt.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> focus_contrast_for(
      std::uint32_t block_mask) const;
};

GrandDesign assemble_grand_design(const Dataset& filled, const PatternSet& patterns,
                                  const ModelSpec& model,
                                  const FocusThresholds* thresholds = nullptr);

void write_pattern_summary_csv(const PatternSet& patterns, const std::string& path);

}  // namespace blocklogit
