#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "blocklogit/impute.hpp"
#include "blocklogit/logit.hpp"
#include "blocklogit/patterns.hpp"

namespace blocklogit {

enum class Criterion { Bic, Aic };
enum class MaOrder { PoolFirst, AverageFirst };
enum class AveragedStatistic { FocusCoefficient, FocusAme };

const char* to_string(Criterion c);
const char* to_string(MaOrder o);

// One of the 2^H submodels: bit h-1 set means interaction block h enters.
// r = blocks + 1 indexes the model space in binary-counting order, so r = 1
// is the pure fill-in model and r = 2^H carries every block (and therefore
// reproduces the complete-case estimate of the fill-in coefficients).
struct SubmodelId {
  std::uint32_t blocks = 0;
  int h = 0;

  int r() const { return static_cast<int>(blocks) + 1; }
  bool includes(int block) const { return (blocks >> (block - 1)) & 1u; }
  int block_count() const { return std::popcount(blocks); }
  std::string to_string() const;

  static SubmodelId empty(int h) { return {0u, h}; }
  static SubmodelId full(int h) {
    return {h == 0 ? 0u : ((1u << h) - 1u), h};
  }
};

std::vector<SubmodelId> enumerate_submodels(int h);

FitResult fit_submodel(const SubmodelId& id, const GrandDesign& design,
                       const LogitOptions& options = {});

// exp(-delta/2) normalized, computed in delta form.
std::vector<double> ic_weights(const std::vector<double>& ics);

struct SubmodelSummary {
  SubmodelId id;
  double estimate = 0.0;  // pooled focus statistic under this submodel
  double variance = 0.0;
  double ic = 0.0;        // criterion value that produced lambda
  double lambda = 0.0;
  int k = 0;
  double log_lik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double lambda_aic = 0.0;
  double lambda_bic = 0.0;
};

struct AveragedEstimate {
  std::vector<SubmodelSummary> submodels;
  double beta_ma = 0.0;
  double var_ma = 0.0;  // Buckland unconditional variance
  Criterion criterion = Criterion::Bic;
};

double buckland_variance(const std::vector<double>& betas,
                         const std::vector<double>& variances,
                         const std::vector<double>& lambda, double beta_ma);

AveragedEstimate model_average(const std::vector<double>& betas,
                               const std::vector<double>& variances,
                               const std::vector<double>& lambda);

struct MiAverageOptions {
  Criterion criterion = Criterion::Bic;
  MaOrder order = MaOrder::PoolFirst;
  AveragedStatistic statistic = AveragedStatistic::FocusCoefficient;
  bool cluster_se = false;
  LogitOptions logit;
};

// Fit the full R x M grid, Rubin-pool each submodel across imputations,
// average the criterion across imputations for the weights, then model
// average (or, under AverageFirst, average within each imputation and pool
// the M averaged estimates).
AveragedEstimate mi_model_average(const ImputationSet& imputations,
                                  const PatternSet& patterns,
                                  const ModelSpec& model,
                                  const MiAverageOptions& options = {},
                                  const FocusThresholds* thresholds = nullptr);

void write_submodel_csv(const AveragedEstimate& averaged, const std::string& path);

}  // namespace blocklogit
