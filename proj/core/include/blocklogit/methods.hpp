#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "blocklogit/averaging.hpp"
#include "blocklogit/dataset.hpp"
#include "blocklogit/impute.hpp"
#include "blocklogit/logit.hpp"
#include "blocklogit/patterns.hpp"

namespace blocklogit {

enum class MethodKind { Cca, FiMi, BbmaBic, BbmaAic };

const char* to_string(MethodKind m);
MethodKind parse_method(const std::string& text);

struct EstimateOptions {
  int m = 20;
  std::uint64_t seed = 0;
  ImputeOptions impute;
  LogitOptions logit;
  bool cluster_se = false;
  MaOrder ma_order = MaOrder::PoolFirst;
  bool want_coefficient = true;  // skip the coefficient grid in hot loops
  double ci_level = 0.95;
};

struct MethodEstimate {
  MethodKind method = MethodKind::Cca;
  AmeResult ame;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double df = 0.0;  // +inf for normal intervals
  std::optional<double> coef;
  std::optional<double> coef_se;
  int m_used = 1;
  std::int64_t n_used = 0;
  std::optional<AveragedEstimate> averaged;  // AME-scale submodel detail
};

// Shared per-item state: eligible rows, focus thresholds frozen from the
// originally observed expectations, the original missingness patterns, and a
// lazily created imputation set reused by every MI-based method.
struct MethodSetup {
  Dataset eligible;
  ModelSpec model;
  std::optional<FocusThresholds> thresholds;
  PatternSet patterns;
  EstimateOptions options;
  std::optional<ImputationSet> imputations;

  const FocusThresholds* thresholds_ptr() const {
    return thresholds ? &*thresholds : nullptr;
  }
};

MethodSetup prepare_analysis(const Dataset& dataset, const ModelSpec& model,
                             const EstimateOptions& options);

// Runs one estimator; creates the shared imputation set on first MI use.
MethodEstimate run_method(MethodSetup& setup, MethodKind kind);

}  // namespace blocklogit
