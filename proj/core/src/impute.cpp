#include "blocklogit/impute.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <Eigen/Dense>
#include <json.hpp>

#include "blocklogit/errors.hpp"
#include "blocklogit/logit.hpp"
#include "blocklogit/rng.hpp"

namespace blocklogit {

namespace {

bool interviewer_level(const ColumnSpec& spec) {
  return spec.group == VarGroup::Iws || spec.group == VarGroup::Roster;
}

bool token_kind(const ColumnSpec& spec) {
  return spec.kind == ColumnKind::Id || spec.kind == ColumnKind::Categorical;
}

double draw_chi2(Rng& rng, double df) {
  if (df <= 1.0) {
    const double z = rng.normal();
    return z * z;
  }
  // Marsaglia-Tsang gamma(df/2, 2)
  const double a = 0.5 * df;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return 2.0 * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return 2.0 * d * v;
  }
}

}  // namespace

Dataset collapse_interviewers(const Dataset& dataset) {
  const int iw_col = dataset.require_role(ColumnRole::InterviewerId);

  Schema schema;
  schema.na_token = dataset.schema().na_token;
  std::vector<int> keep_cols;
  for (int c = 0; c < dataset.ncol(); ++c) {
    const ColumnSpec& spec = dataset.spec(c);
    if (spec.role == ColumnRole::InterviewerId ||
        spec.role == ColumnRole::CountryId || interviewer_level(spec)) {
      schema.columns.push_back(spec);
      keep_cols.push_back(c);
    }
  }

  std::vector<std::int64_t> first_row;
  std::unordered_map<std::string, std::int64_t> seen;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    const std::string iw = dataset.token(iw_col, r);
    auto it = seen.find(iw);
    if (it == seen.end()) {
      seen.emplace(iw, r);
      first_row.push_back(r);
    } else {
      // broadcast consistency: interviewer-level cells must match row one
      const std::int64_t r0 = it->second;
      for (int c : keep_cols) {
        const bool obs_a = dataset.observed(c, r0);
        const bool obs_b = dataset.observed(c, r);
        const bool same =
            obs_a == obs_b &&
            (!obs_a || (token_kind(dataset.spec(c))
                            ? dataset.token(c, r0) == dataset.token(c, r)
                            : dataset.value(c, r0) == dataset.value(c, r)));
        if (!same) {
          fail_validation("impute/InconsistentInterviewer",
                          "column '" + dataset.spec(c).name +
                              "' varies within interviewer '" + iw + "'");
        }
      }
    }
  }

  Dataset out(schema);
  for (std::int64_t r : first_row) {
    out.append_row();
    const std::int64_t row = out.nrow() - 1;
    for (std::size_t j = 0; j < keep_cols.size(); ++j) {
      const int c = keep_cols[j];
      if (!dataset.observed(c, r)) continue;
      if (token_kind(dataset.spec(c))) {
        out.set_token(static_cast<int>(j), row, dataset.token(c, r));
      } else {
        out.set_value(static_cast<int>(j), row, dataset.value(c, r));
      }
    }
  }
  return out;
}

Dataset hot_deck_interviewers(const Dataset& interviewer_table, std::uint64_t seed,
                              const ImputeOptions& options) {
  const Dataset& table = interviewer_table;
  const int country_col = table.require_role(ColumnRole::CountryId);

  std::vector<int> donated_cols;  // iws + roster cells a donor provides
  std::vector<int> match_cols;    // roster attributes used for matching
  for (int c = 0; c < table.ncol(); ++c) {
    const ColumnSpec& spec = table.spec(c);
    if (spec.group == VarGroup::Iws) donated_cols.push_back(c);
    if (spec.group == VarGroup::Roster) {
      donated_cols.push_back(c);
      match_cols.push_back(c);
    }
  }

  auto complete_donor = [&](std::int64_t r) {
    for (int c : donated_cols) {
      if (!table.observed(c, r)) return false;
    }
    return true;
  };

  std::unordered_map<std::string, std::vector<std::int64_t>> donors_by_country;
  std::vector<std::int64_t> recipients;
  for (std::int64_t r = 0; r < table.nrow(); ++r) {
    if (complete_donor(r)) {
      donors_by_country[table.token(country_col, r)].push_back(r);
    } else {
      recipients.push_back(r);
    }
  }

  Dataset out = table;
  Rng rng(seed);
  for (std::int64_t r : recipients) {
    const std::string country = table.token(country_col, r);
    auto it = donors_by_country.find(country);
    if (it == donors_by_country.end() || it->second.empty()) {
      fail_estimation("impute/NoDonorsInCountry",
                      "no fully observed interviewer in country '" + country + "'");
    }
    const std::vector<std::int64_t>& pool = it->second;

    std::vector<std::int64_t> matched;
    for (std::int64_t d : pool) {
      bool ok = true;
      for (int c : match_cols) {
        if (!table.observed(c, r)) continue;  // unobserved attributes do not constrain
        const ColumnSpec& spec = table.spec(c);
        if (spec.kind == ColumnKind::Continuous) {
          if (std::abs(table.value(c, d) - table.value(c, r)) > options.age_window) {
            ok = false;
            break;
          }
        } else if (token_kind(spec)) {
          if (table.token(c, d) != table.token(c, r)) {
            ok = false;
            break;
          }
        } else if (table.value(c, d) != table.value(c, r)) {
          ok = false;
          break;
        }
      }
      if (ok) matched.push_back(d);
    }

    const std::vector<std::int64_t>& candidates = matched.empty() ? pool : matched;
    const std::int64_t donor =
        candidates[rng.uniform_int(candidates.size())];
    for (int c : donated_cols) {
      if (out.observed(c, r)) continue;
      if (token_kind(table.spec(c))) {
        out.set_token(c, r, table.token(c, donor));
      } else {
        out.set_value(c, r, table.value(c, donor));
      }
    }
  }
  return out;
}

Dataset marginal_fill(const Dataset& dataset, std::uint64_t seed) {
  Dataset out = dataset;
  Rng rng(seed);
  for (int c = 0; c < dataset.ncol(); ++c) {
    if (dataset.missing_count(c) == 0) continue;
    std::vector<std::int64_t> observed_rows;
    for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
      if (dataset.observed(c, r)) observed_rows.push_back(r);
    }
    if (observed_rows.empty()) {
      fail_estimation("impute/AllMissingColumn",
                      "column '" + dataset.spec(c).name + "' has no observed values");
    }
    for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
      if (dataset.observed(c, r)) continue;
      const std::int64_t src = observed_rows[rng.uniform_int(observed_rows.size())];
      if (token_kind(dataset.spec(c))) {
        out.set_token(c, r, dataset.token(c, src));
      } else {
        out.set_value(c, r, dataset.value(c, src));
      }
    }
  }
  return out;
}

namespace {

struct UnivariateTask {
  int col = -1;
  ImputeModel model = ImputeModel::Default;
  std::vector<std::int64_t> observed_rows;
  std::vector<std::int64_t> missing_rows;
};

// Predictor matrix: intercept + every other non-id column, categorical
// one-hot against its first code, constant columns dropped.
Eigen::MatrixXd predictor_matrix(const Dataset& state, int target_col,
                                 const std::vector<std::int64_t>& rows) {
  std::vector<int> cols;
  for (int c = 0; c < state.ncol(); ++c) {
    if (c == target_col) continue;
    const ColumnSpec& spec = state.spec(c);
    if (spec.kind == ColumnKind::Id) continue;
    cols.push_back(c);
  }

  std::vector<Eigen::VectorXd> built;
  for (int c : cols) {
    const ColumnSpec& spec = state.spec(c);
    if (spec.kind == ColumnKind::Categorical) {
      std::vector<double> codes;
      for (std::int64_t r : rows) {
        const double v = state.value(c, r);
        if (std::find(codes.begin(), codes.end(), v) == codes.end()) {
          codes.push_back(v);
        }
      }
      std::sort(codes.begin(), codes.end());
      for (std::size_t i = 1; i < codes.size(); ++i) {
        Eigen::VectorXd col(rows.size());
        for (std::size_t j = 0; j < rows.size(); ++j) {
          col[j] = state.value(c, rows[j]) == codes[i] ? 1.0 : 0.0;
        }
        built.push_back(std::move(col));
      }
    } else {
      Eigen::VectorXd col(rows.size());
      for (std::size_t j = 0; j < rows.size(); ++j) {
        col[j] = state.value(c, rows[j]);
      }
      built.push_back(std::move(col));
    }
  }

  // drop constants; the intercept carries them
  std::vector<Eigen::VectorXd> kept;
  for (auto& col : built) {
    const double mean = col.mean();
    if ((col.array() - mean).abs().maxCoeff() > 1e-12) {
      kept.push_back(std::move(col));
    }
  }

  Eigen::MatrixXd X(rows.size(), 1 + kept.size());
  X.col(0).setOnes();
  for (std::size_t j = 0; j < kept.size(); ++j) {
    X.col(1 + static_cast<Eigen::Index>(j)) = kept[j];
  }
  return X;
}

void impute_binary_logistic(Dataset& state, const UnivariateTask& task, Rng& rng,
                            ChainDiagnostics* diagnostics) {
  const int c = task.col;
  // degenerate observed distribution: impute the constant
  double first = state.value(c, task.observed_rows.front());
  bool constant = true;
  for (std::int64_t r : task.observed_rows) {
    if (state.value(c, r) != first) {
      constant = false;
      break;
    }
  }
  if (constant) {
    for (std::int64_t r : task.missing_rows) state.set_value(c, r, first);
    return;
  }

  std::vector<std::int64_t> all_rows = task.observed_rows;
  all_rows.insert(all_rows.end(), task.missing_rows.begin(), task.missing_rows.end());
  const Eigen::MatrixXd x_all = predictor_matrix(state, c, all_rows);
  const auto n_obs = static_cast<Eigen::Index>(task.observed_rows.size());
  const Eigen::MatrixXd x_obs = x_all.topRows(n_obs);
  const Eigen::MatrixXd x_mis = x_all.bottomRows(x_all.rows() - n_obs);

  Eigen::VectorXd y(n_obs);
  for (Eigen::Index i = 0; i < n_obs; ++i) {
    y[i] = state.value(c, task.observed_rows[i]);
  }

  try {
    const FitResult fit = fit_logit(y, x_obs);
    Eigen::LLT<Eigen::MatrixXd> llt(fit.cov);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::Estimation, "impute/NonConvergentUnivariateFit",
                  "posterior covariance not positive definite");
    }
    Eigen::VectorXd z(fit.beta.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Eigen::VectorXd lz = llt.matrixL() * z;
    const Eigen::VectorXd beta_star = fit.beta + lz;
    const Eigen::VectorXd eta = x_mis * beta_star;
    for (std::size_t i = 0; i < task.missing_rows.size(); ++i) {
      const double p = logistic_cdf(eta[static_cast<Eigen::Index>(i)]);
      state.set_value(c, task.missing_rows[i], rng.bernoulli(p) ? 1.0 : 0.0);
    }
  } catch (const Error&) {
    if (diagnostics) {
      diagnostics->warnings.push_back(
          "impute/NonConvergentUnivariateFit: column '" + state.spec(c).name +
          "' fell back to marginal draws");
    }
    std::vector<double> observed;
    for (std::int64_t r : task.observed_rows) observed.push_back(state.value(c, r));
    for (std::int64_t r : task.missing_rows) {
      state.set_value(c, r, observed[rng.uniform_int(observed.size())]);
    }
  }
}

void impute_continuous_pmm(Dataset& state, const UnivariateTask& task, Rng& rng,
                           int donors, ChainDiagnostics* diagnostics) {
  const int c = task.col;
  std::vector<std::int64_t> all_rows = task.observed_rows;
  all_rows.insert(all_rows.end(), task.missing_rows.begin(), task.missing_rows.end());
  const Eigen::MatrixXd x_all = predictor_matrix(state, c, all_rows);
  const auto n_obs = static_cast<Eigen::Index>(task.observed_rows.size());
  const Eigen::MatrixXd x_obs = x_all.topRows(n_obs);
  const Eigen::MatrixXd x_mis = x_all.bottomRows(x_all.rows() - n_obs);
  const Eigen::Index k = x_obs.cols();

  Eigen::VectorXd y(n_obs);
  for (Eigen::Index i = 0; i < n_obs; ++i) {
    y[i] = state.value(c, task.observed_rows[i]);
  }

  bool fallback = false;
  Eigen::VectorXd yhat_obs;
  Eigen::VectorXd yhat_mis;
  if (n_obs <= k) {
    fallback = true;
  } else {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_obs);
    if (qr.rank() < k) {
      fallback = true;
    } else {
      const Eigen::VectorXd beta_hat = qr.solve(y);
      const double rss = (y - x_obs * beta_hat).squaredNorm();
      const double df = static_cast<double>(n_obs - k);
      const double sigma2_star = rss / draw_chi2(rng, df);
      const Eigen::MatrixXd xtx_inv =
          (x_obs.transpose() * x_obs)
              .ldlt()
              .solve(Eigen::MatrixXd::Identity(k, k));
      Eigen::LLT<Eigen::MatrixXd> llt(
          0.5 * (xtx_inv + xtx_inv.transpose()).eval());
      if (llt.info() != Eigen::Success) {
        fallback = true;
      } else {
        Eigen::VectorXd z(k);
        for (Eigen::Index i = 0; i < k; ++i) z[i] = rng.normal();
        const Eigen::VectorXd lz = llt.matrixL() * z;
        const Eigen::VectorXd beta_star = beta_hat + std::sqrt(sigma2_star) * lz;
        yhat_obs = x_obs * beta_hat;   // type-1 matching
        yhat_mis = x_mis * beta_star;
      }
    }
  }

  if (fallback) {
    if (diagnostics) {
      diagnostics->warnings.push_back(
          "impute/NonConvergentUnivariateFit: column '" + state.spec(c).name +
          "' fell back to marginal draws");
    }
    std::vector<double> observed;
    for (std::int64_t r : task.observed_rows) observed.push_back(state.value(c, r));
    for (std::int64_t r : task.missing_rows) {
      state.set_value(c, r, observed[rng.uniform_int(observed.size())]);
    }
    return;
  }

  // sort donor predictions once, then take the closest `donors` per recipient
  std::vector<std::pair<double, std::int64_t>> ranked(n_obs);
  for (Eigen::Index i = 0; i < n_obs; ++i) {
    ranked[i] = {yhat_obs[i], task.observed_rows[i]};
  }
  std::sort(ranked.begin(), ranked.end());

  const int pool = std::min<int>(donors, static_cast<int>(n_obs));
  for (std::size_t i = 0; i < task.missing_rows.size(); ++i) {
    const double target = yhat_mis[static_cast<Eigen::Index>(i)];
    auto it = std::lower_bound(
        ranked.begin(), ranked.end(), std::make_pair(target, std::int64_t{0}),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    // two-pointer expansion around the insertion point
    std::int64_t lo = it - ranked.begin() - 1;
    std::int64_t hi = it - ranked.begin();
    std::vector<std::int64_t> best;
    while (static_cast<int>(best.size()) < pool) {
      const bool lo_ok = lo >= 0;
      const bool hi_ok = hi < static_cast<std::int64_t>(ranked.size());
      if (!lo_ok && !hi_ok) break;
      if (!hi_ok || (lo_ok && target - ranked[lo].first <= ranked[hi].first - target)) {
        best.push_back(ranked[lo--].second);
      } else {
        best.push_back(ranked[hi++].second);
      }
    }
    const std::int64_t donor = best[rng.uniform_int(best.size())];
    state.set_value(c, task.missing_rows[i], state.value(c, donor));
  }
}

}  // namespace

Dataset fcs_chain(const Dataset& dataset, int iterations, std::uint64_t seed,
                  const ImputeOptions& options, ChainDiagnostics* diagnostics) {
  for (int c : dataset.outcome_columns()) {
    if (dataset.missing_count(c) > 0) {
      fail_validation("impute/MaskedOutcome",
                      "outcome column '" + dataset.spec(c).name +
                          "' has masked cells; restrict to eligible rows first");
    }
  }

  std::vector<UnivariateTask> tasks;
  for (int c = 0; c < dataset.ncol(); ++c) {
    const ColumnSpec& spec = dataset.spec(c);
    if (spec.kind == ColumnKind::Id) continue;
    const std::int64_t missing = dataset.missing_count(c);
    if (missing == 0) continue;
    UnivariateTask task;
    task.col = c;
    task.model = spec.model;
    if (task.model == ImputeModel::Default) {
      task.model = spec.kind == ColumnKind::Binary ? ImputeModel::LogisticDraw
                                                   : ImputeModel::Pmm;
    }
    for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
      (dataset.observed(c, r) ? task.observed_rows : task.missing_rows).push_back(r);
    }
    if (task.observed_rows.empty()) {
      fail_estimation("impute/AllMissingColumn",
                      "column '" + spec.name + "' has no observed values");
    }
    tasks.push_back(std::move(task));
  }
  if (tasks.empty()) return dataset;

  // fixed visit order: ascending missing fraction, ties by column order
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const UnivariateTask& a, const UnivariateTask& b) {
                     return a.missing_rows.size() < b.missing_rows.size();
                   });

  Rng rng(seed);
  Dataset state = marginal_fill(dataset, rng.derived_seed("init"));
  Rng sweep_rng = rng.split("sweeps");

  for (int sweep = 0; sweep < iterations; ++sweep) {
    for (const auto& task : tasks) {
      if (task.model == ImputeModel::LogisticDraw) {
        impute_binary_logistic(state, task, sweep_rng, diagnostics);
      } else {
        impute_continuous_pmm(state, task, sweep_rng, options.pmm_donors,
                              diagnostics);
      }
    }
  }

  if (diagnostics) {
    diagnostics->iterations = iterations;
    for (const auto& task : tasks) {
      diagnostics->imputed_counts[dataset.spec(task.col).name] =
          static_cast<std::int64_t>(task.missing_rows.size());
    }
  }
  return state;
}

ImputationSet multiple_impute(const Dataset& dataset, int m, std::uint64_t seed,
                              const ImputeOptions& options) {
  if (m < 2) {
    fail_validation("impute/TooFewImputations",
                    "need at least 2 imputations, got " + std::to_string(m));
  }

  const bool has_interviewers =
      dataset.role_column(ColumnRole::InterviewerId) >= 0;
  std::vector<int> iw_level_cols;
  for (int c = 0; c < dataset.ncol(); ++c) {
    if (interviewer_level(dataset.spec(c))) iw_level_cols.push_back(c);
  }
  const bool run_hot_deck = has_interviewers && !iw_level_cols.empty();

  Dataset iw_table;
  int iw_col = -1;
  std::unordered_map<std::string, std::int64_t> iw_row;
  if (run_hot_deck) {
    iw_table = collapse_interviewers(dataset);
    iw_col = dataset.require_role(ColumnRole::InterviewerId);
    const int tcol = iw_table.require_role(ColumnRole::InterviewerId);
    for (std::int64_t r = 0; r < iw_table.nrow(); ++r) {
      iw_row[iw_table.token(tcol, r)] = r;
    }
  }

  const Rng base(seed);
  ImputationSet set;
  set.m = m;
  set.seed = seed;
  set.completed.reserve(m);

  for (int i = 0; i < m; ++i) {
    const std::uint64_t sub_seed = base.derived_seed("imputation", i);
    set.sub_seeds.push_back(sub_seed);
    const Rng imp_rng(sub_seed);

    Dataset data = dataset;
    if (run_hot_deck) {
      const Dataset completed_iw = hot_deck_interviewers(
          iw_table, imp_rng.derived_seed("hotdeck"), options);
      // broadcast interviewer values back to respondent rows
      std::unordered_map<int, int> table_col;
      for (std::size_t j = 0; j < iw_level_cols.size(); ++j) {
        table_col[iw_level_cols[j]] =
            completed_iw.require_column(dataset.spec(iw_level_cols[j]).name);
      }
      for (std::int64_t r = 0; r < data.nrow(); ++r) {
        const auto trow = iw_row.at(data.token(iw_col, r));
        for (int c : iw_level_cols) {
          if (data.observed(c, r)) continue;
          const int tc = table_col[c];
          if (token_kind(data.spec(c))) {
            data.set_token(c, r, completed_iw.token(tc, trow));
          } else {
            data.set_value(c, r, completed_iw.value(tc, trow));
          }
        }
      }
    }

    ChainDiagnostics diag;
    data = fcs_chain(data, options.burn_in, imp_rng.derived_seed("fcs"), options,
                     &diag);
    set.chains.push_back(std::move(diag));
    set.completed.push_back(std::move(data));
  }
  return set;
}

void save_imputation_set(const ImputationSet& set, const std::string& directory) {
  for (int i = 0; i < set.m; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "imp_%03d.csv", i + 1);
    set.completed[i].save_csv(directory + "/" + name);
  }
  nlohmann::json j;
  j["m"] = set.m;
  j["seed"] = set.seed;
  j["sub_seeds"] = set.sub_seeds;
  j["schema_hash"] = fnv1a(set.completed.empty()
                               ? std::string()
                               : set.completed.front().schema().to_json_text());
  nlohmann::json chains = nlohmann::json::array();
  for (const auto& chain : set.chains) {
    nlohmann::json jc;
    jc["iterations"] = chain.iterations;
    jc["imputed_counts"] = chain.imputed_counts;
    jc["warnings"] = chain.warnings;
    chains.push_back(jc);
  }
  j["chains"] = chains;
  std::ofstream out(directory + "/imputations.json");
  if (!out) {
    fail_validation("tabular/WriteError", "cannot write " + directory +
                                              "/imputations.json");
  }
  out << j.dump(2) << '\n';
}

PooledEstimate rubin_pool(const std::vector<double>& estimates,
                          const std::vector<double>& variances) {
  if (estimates.size() != variances.size()) {
    fail_validation("impute/LengthMismatch",
                    "estimates and variances differ in length");
  }
  const int m = static_cast<int>(estimates.size());
  if (m < 2) {
    fail_validation("impute/TooFewImputations",
                    "Rubin pooling needs M >= 2, got " + std::to_string(m));
  }
  for (double v : variances) {
    if (v < 0.0) {
      fail_validation("impute/LengthMismatch", "negative within variance");
    }
  }

  PooledEstimate out;
  out.m = m;
  out.qbar = std::accumulate(estimates.begin(), estimates.end(), 0.0) / m;
  out.ubar = std::accumulate(variances.begin(), variances.end(), 0.0) / m;
  double ss = 0.0;
  for (double e : estimates) ss += (e - out.qbar) * (e - out.qbar);
  out.b = ss / (m - 1);
  const double inflation = 1.0 + 1.0 / m;
  out.t = out.ubar + inflation * out.b;

  if (out.b == 0.0) {
    out.fmi = 0.0;
    out.fmi_df_adjusted = 0.0;
    out.df = std::numeric_limits<double>::infinity();
    return out;
  }
  out.fmi = out.t > 0.0 ? inflation * out.b / out.t : 0.0;
  const double ratio = out.ubar / (inflation * out.b);
  out.df = (m - 1) * (1.0 + ratio) * (1.0 + ratio);
  const double r = inflation * out.b / out.ubar;
  out.fmi_df_adjusted = std::isfinite(r)
                            ? (r + 2.0 / (out.df + 3.0)) / (r + 1.0)
                            : 1.0;
  return out;
}

int choose_m(double fmi) {
  if (fmi < 0.0 || fmi > 1.0) {
    fail_validation("impute/InvalidFmi",
                    "fmi must lie in [0,1], got " + std::to_string(fmi));
  }
  const int needed = static_cast<int>(std::ceil(fmi * 100.0 - 1e-9));
  return std::max(2, needed);
}

}  // namespace blocklogit
