#include "blocklogit/patterns.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "blocklogit/errors.hpp"

namespace blocklogit {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string PatternSet::mask_string(std::uint32_t mask) const {
  std::string out;
  for (std::size_t g = 0; g < group_names.size(); ++g) {
    if (mask & (1u << g)) {
      if (!out.empty()) out += '+';
      out += group_names[g];
    }
  }
  return out.empty() ? "complete" : out;
}

std::vector<std::optional<double>> build_focus_indicator(
    const std::vector<std::optional<double>>& values,
    const std::vector<std::int64_t>& country) {
  if (values.size() != country.size()) {
    fail_validation("patterns/LengthMismatch",
                    "values and country vectors differ in length");
  }
  std::unordered_map<std::int64_t, std::vector<double>> by_country;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i]) {
      if (*values[i] < 0.0 || *values[i] > 100.0) {
        fail_validation("patterns/TypeViolation",
                        "expectation value outside [0,100]");
      }
      by_country[country[i]].push_back(*values[i]);
    }
  }
  std::unordered_map<std::int64_t, double> medians;
  for (auto& [c, vals] : by_country) {
    medians[c] = median_of(vals);
  }
  std::vector<std::optional<double>> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    auto it = medians.find(country[i]);
    if (it == medians.end()) {
      fail_estimation("patterns/EmptyCountry",
                      "no reporting interviewers in country " +
                          std::to_string(country[i]));
    }
    out[i] = *values[i] > it->second ? 1.0 : 0.0;
  }
  return out;
}

std::map<std::string, double> expectation_medians_by_country(const Dataset& dataset) {
  const int exp_col = dataset.require_role(ColumnRole::Expectation);
  const int iw_col = dataset.require_role(ColumnRole::InterviewerId);
  const int cc_col = dataset.require_role(ColumnRole::CountryId);

  // one value per reporting interviewer
  std::unordered_map<std::string, double> by_interviewer;
  std::unordered_map<std::string, std::string> interviewer_country;
  std::vector<std::string> order;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (!dataset.observed(exp_col, r)) continue;
    const std::string iw = dataset.token(iw_col, r);
    const double v = dataset.value(exp_col, r);
    auto it = by_interviewer.find(iw);
    if (it == by_interviewer.end()) {
      by_interviewer[iw] = v;
      interviewer_country[iw] = dataset.token(cc_col, r);
      order.push_back(iw);
    } else if (it->second != v) {
      fail_validation("patterns/TypeViolation",
                      "expectation varies within interviewer '" + iw + "'");
    }
  }

  std::map<std::string, std::vector<double>> values;
  for (const auto& iw : order) {
    values[interviewer_country[iw]].push_back(by_interviewer[iw]);
  }
  std::map<std::string, double> medians;
  for (auto& [c, vals] : values) {
    medians[c] = median_of(std::move(vals));
  }
  return medians;
}

FocusThresholds focus_thresholds(const Dataset& dataset) {
  return FocusThresholds{expectation_medians_by_country(dataset)};
}

std::vector<std::optional<double>> focus_for_rows(const Dataset& dataset,
                                                  const FocusThresholds& thresholds) {
  const int exp_col = dataset.require_role(ColumnRole::Expectation);
  const int cc_col = dataset.require_role(ColumnRole::CountryId);
  std::vector<std::optional<double>> out(dataset.nrow());
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (!dataset.observed(exp_col, r)) continue;
    const std::string country = dataset.token(cc_col, r);
    auto it = thresholds.median_by_country.find(country);
    if (it == thresholds.median_by_country.end()) {
      fail_estimation("patterns/EmptyCountry",
                      "no focus threshold for country '" + country +
                          "' (no reporting interviewers)");
    }
    out[r] = dataset.value(exp_col, r) > it->second ? 1.0 : 0.0;
  }
  return out;
}

PatternSet detect_patterns(const Dataset& dataset,
                           const std::vector<std::vector<std::string>>& groups,
                           const std::vector<std::string>& group_names) {
  if (groups.size() > 20) {
    fail_validation("patterns/TooManyGroups", "more than 20 covariate groups");
  }
  std::vector<std::vector<int>> group_cols;
  for (const auto& g : groups) {
    std::vector<int> cols;
    for (const auto& name : g) {
      cols.push_back(dataset.require_column(name));
    }
    group_cols.push_back(std::move(cols));
  }

  PatternSet out;
  out.group_names = group_names;
  if (out.group_names.empty()) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      out.group_names.push_back("g" + std::to_string(g + 1));
    }
  }
  out.assignment.resize(dataset.nrow());
  out.counts.assign(1, 0);

  std::unordered_map<std::uint32_t, int> pattern_of_mask;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    std::uint32_t mask = 0;
    for (std::size_t g = 0; g < group_cols.size(); ++g) {
      for (int col : group_cols[g]) {
        if (!dataset.observed(col, r)) {
          mask |= 1u << g;
          break;
        }
      }
    }
    int id = 0;
    if (mask != 0) {
      auto it = pattern_of_mask.find(mask);
      if (it == pattern_of_mask.end()) {
        out.incomplete_masks.push_back(mask);
        out.counts.push_back(0);
        id = static_cast<int>(out.incomplete_masks.size());
        pattern_of_mask.emplace(mask, id);
      } else {
        id = it->second;
      }
    }
    out.assignment[r] = id;
    ++out.counts[id];
  }
  return out;
}

PatternSet detect_patterns(const Dataset& dataset) {
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> names;
  for (VarGroup g : {VarGroup::Iws, VarGroup::Capi}) {
    auto cols = dataset.schema().group_columns(g);
    if (!cols.empty()) {
      groups.push_back(std::move(cols));
      names.push_back(to_string(g));
    }
  }
  return detect_patterns(dataset, groups, names);
}

Dataset complete_case_subset(const Dataset& dataset, const PatternSet& patterns) {
  if (patterns.assignment.size() != static_cast<std::size_t>(dataset.nrow())) {
    fail_validation("patterns/PatternMismatch",
                    "pattern assignment length does not match dataset rows");
  }
  std::vector<std::int64_t> keep;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (patterns.assignment[r] == 0) keep.push_back(r);
  }
  if (keep.empty()) {
    fail_estimation("patterns/EmptyCompleteCases",
                    "no rows with all covariate groups observed");
  }
  return dataset.subset(keep);
}

PatternSet merge_small_patterns(const PatternSet& patterns, int k_design,
                                std::vector<std::string>* warnings) {
  const int h = patterns.pattern_count();
  const std::int64_t min_rows = k_design + 1;

  std::vector<int> target(h + 1);
  for (int p = 0; p <= h; ++p) target[p] = p;

  bool any_small = false;
  for (int p = 1; p <= h; ++p) {
    if (patterns.counts[p] < min_rows) any_small = true;
  }
  if (!any_small) return patterns;

  std::vector<int> eligible;
  for (int q = 1; q <= h; ++q) {
    if (patterns.counts[q] >= min_rows) eligible.push_back(q);
  }
  int fallback_root = 1;
  for (int q = 2; q <= h; ++q) {
    if (patterns.counts[q] > patterns.counts[fallback_root]) fallback_root = q;
  }

  for (int p = 1; p <= h; ++p) {
    if (patterns.counts[p] >= min_rows) continue;
    int best = -1;
    if (!eligible.empty()) {
      int best_dist = 1 << 30;
      for (int q : eligible) {
        const int dist = std::popcount(patterns.incomplete_masks[p - 1] ^
                                       patterns.incomplete_masks[q - 1]);
        if (dist < best_dist) {
          best_dist = dist;
          best = q;
        }
      }
    } else if (p != fallback_root) {
      // no identifiable sibling anywhere; pool everything into one block
      best = fallback_root;
    }
    if (best < 0) {
      if (warnings) {
        warnings->push_back("pattern " + std::to_string(p) + " (" +
                            patterns.mask_string(patterns.incomplete_masks[p - 1]) +
                            ") has only " + std::to_string(patterns.counts[p]) +
                            " rows and no sibling to merge into");
      }
      continue;
    }
    target[p] = best;
    if (warnings) {
      warnings->push_back(
          "pattern " + std::to_string(p) + " (" +
          patterns.mask_string(patterns.incomplete_masks[p - 1]) + ", " +
          std::to_string(patterns.counts[p]) + " rows) merged into pattern " +
          std::to_string(best) + " (" +
          patterns.mask_string(patterns.incomplete_masks[best - 1]) + ")");
    }
  }
  std::vector<int> new_id(h + 1, 0);
  PatternSet out;
  out.group_names = patterns.group_names;
  for (int p = 1; p <= h; ++p) {
    if (target[p] == p) {
      out.incomplete_masks.push_back(patterns.incomplete_masks[p - 1]);
      new_id[p] = static_cast<int>(out.incomplete_masks.size());
    }
  }
  out.counts.assign(out.incomplete_masks.size() + 1, 0);
  out.assignment.resize(patterns.assignment.size());
  for (std::size_t r = 0; r < patterns.assignment.size(); ++r) {
    const int p = patterns.assignment[r];
    const int t = p == 0 ? 0 : new_id[target[p]];
    out.assignment[r] = t;
    ++out.counts[t];
  }
  return out;
}

ModelSpec ModelSpec::from_schema(const Schema& schema, const std::string& outcome_item) {
  ModelSpec spec;
  const ColumnSpec* outcome = schema.find(outcome_item);
  if (outcome == nullptr || outcome->role != ColumnRole::Outcome) {
    fail_validation("patterns/MissingColumn",
                    "'" + outcome_item + "' is not an outcome column");
  }
  spec.outcome = outcome_item;
  for (const auto& c : schema.columns) {
    if (c.role == ColumnRole::Focus) spec.focus = c.name;
    if (c.role == ColumnRole::Expectation) spec.expectation = c.name;
    if (c.role == ColumnRole::Control) spec.controls.push_back(c.name);
  }
  if (spec.focus.empty() && spec.expectation.empty()) {
    fail_validation("patterns/MissingColumn",
                    "schema binds neither a focus nor an expectation column");
  }
  return spec;
}

namespace {

struct RegressorPlan {
  // column index, plus one-hot label codes (empty = plain numeric column)
  int col = -1;
  std::vector<double> onehot_codes;
  std::vector<std::string> names;
};

std::vector<RegressorPlan> plan_controls(const Dataset& dataset,
                                         const ModelSpec& model) {
  std::vector<RegressorPlan> plans;
  for (const auto& name : model.controls) {
    RegressorPlan plan;
    plan.col = dataset.require_column(name);
    const ColumnSpec& spec = dataset.spec(plan.col);
    if (spec.kind == ColumnKind::Categorical) {
      // one-hot against the first interned label
      std::vector<double> codes;
      for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
        if (!dataset.observed(plan.col, r)) continue;
        const double code = dataset.value(plan.col, r);
        if (std::find(codes.begin(), codes.end(), code) == codes.end()) {
          codes.push_back(code);
        }
      }
      std::sort(codes.begin(), codes.end());
      for (std::size_t i = 1; i < codes.size(); ++i) {
        plan.onehot_codes.push_back(codes[i]);
        plan.names.push_back(name + "=" + dataset.label(plan.col, codes[i]));
      }
    } else if (spec.kind == ColumnKind::Id) {
      fail_validation("patterns/TypeViolation",
                      "id column '" + name + "' cannot be a regressor");
    } else {
      plan.names.push_back(name);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

}  // namespace

Design build_design(const Dataset& dataset, const ModelSpec& model,
                    const FocusThresholds* thresholds) {
  const int outcome_col = dataset.require_column(model.outcome);

  std::vector<std::optional<double>> focus_values;
  std::string focus_name;
  if (!model.focus.empty()) {
    const int f = dataset.require_column(model.focus);
    focus_values.resize(dataset.nrow());
    for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
      focus_values[r] = dataset.cell(f, r);
    }
    focus_name = model.focus;
  } else {
    FocusThresholds local;
    if (thresholds == nullptr) {
      local = focus_thresholds(dataset);
      thresholds = &local;
    }
    focus_values = focus_for_rows(dataset, *thresholds);
    focus_name = model.expectation + ":high";
  }

  const auto plans = plan_controls(dataset, model);

  std::vector<std::int64_t> rows;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (!dataset.observed(outcome_col, r)) continue;
    if (!focus_values[r]) {
      fail_validation("patterns/PatternMismatch",
                      "missing focus value on row " + std::to_string(r) +
                          "; build the design on complete or filled data");
    }
    for (const auto& plan : plans) {
      if (!dataset.observed(plan.col, r)) {
        fail_validation("patterns/PatternMismatch",
                        "missing regressor cell on row " + std::to_string(r) +
                            "; build the design on complete or filled data");
      }
    }
    rows.push_back(r);
  }
  if (rows.empty()) {
    fail_estimation("patterns/EmptyCompleteCases", "no usable rows for design");
  }

  int k = 2;  // intercept + focus
  for (const auto& plan : plans) {
    k += plan.onehot_codes.empty() ? 1 : static_cast<int>(plan.onehot_codes.size());
  }

  Design design;
  design.rows = rows;
  design.names.push_back("(intercept)");
  design.names.push_back(focus_name);
  design.focus_col = 1;
  for (const auto& plan : plans) {
    design.names.insert(design.names.end(), plan.names.begin(), plan.names.end());
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  design.y.resize(n);
  design.X.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::int64_t r = rows[i];
    design.y[i] = dataset.value(outcome_col, r);
    design.X(i, 0) = 1.0;
    design.X(i, 1) = *focus_values[r];
    int j = 2;
    for (const auto& plan : plans) {
      if (plan.onehot_codes.empty()) {
        design.X(i, j++) = dataset.value(plan.col, r);
      } else {
        for (double code : plan.onehot_codes) {
          design.X(i, j++) = dataset.value(plan.col, r) == code ? 1.0 : 0.0;
        }
      }
    }
  }

  const int iw = dataset.role_column(ColumnRole::InterviewerId);
  if (iw >= 0) {
    design.cluster.reserve(rows.size());
    for (std::int64_t r : rows) {
      design.cluster.push_back(static_cast<std::int64_t>(dataset.value(iw, r)));
    }
  }
  return design;
}

Eigen::MatrixXd GrandDesign::matrix_for(std::uint32_t block_mask) const {
  const int kk = k_fill();
  int blocks = 0;
  for (int h = 0; h < block_count(); ++h) {
    if (block_mask & (1u << h)) ++blocks;
  }
  Eigen::MatrixXd X(W.rows(), kk * (1 + blocks));
  X.leftCols(kk) = W;
  int at = kk;
  for (int h = 0; h < block_count(); ++h) {
    if (block_mask & (1u << h)) {
      X.middleCols(at, kk) = zblocks[h];
      at += kk;
    }
  }
  return X;
}

std::vector<std::string> GrandDesign::names_for(std::uint32_t block_mask) const {
  std::vector<std::string> out = names;
  for (int h = 0; h < block_count(); ++h) {
    if (block_mask & (1u << h)) {
      for (const auto& n : names) {
        out.push_back("z" + std::to_string(h + 1) + ":" + n);
      }
    }
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> GrandDesign::focus_contrast_for(
    std::uint32_t block_mask) const {
  Eigen::MatrixXd w_off = W;
  Eigen::MatrixXd w_on = W;
  w_off.col(focus_col).setZero();
  w_on.col(focus_col).setOnes();

  const int kk = k_fill();
  int blocks = 0;
  for (int h = 0; h < block_count(); ++h) {
    if (block_mask & (1u << h)) ++blocks;
  }
  Eigen::MatrixXd x_off(W.rows(), kk * (1 + blocks));
  Eigen::MatrixXd x_on(W.rows(), kk * (1 + blocks));
  x_off.leftCols(kk) = w_off;
  x_on.leftCols(kk) = w_on;
  int at = kk;
  for (int h = 0; h < block_count(); ++h) {
    if (!(block_mask & (1u << h))) continue;
    Eigen::MatrixXd z_off = Eigen::MatrixXd::Zero(W.rows(), kk);
    Eigen::MatrixXd z_on = Eigen::MatrixXd::Zero(W.rows(), kk);
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      if (patterns.assignment[i] == h + 1) {
        z_off.row(i) = w_off.row(i);
        z_on.row(i) = w_on.row(i);
      }
    }
    x_off.middleCols(at, kk) = z_off;
    x_on.middleCols(at, kk) = z_on;
    at += kk;
  }
  return {std::move(x_off), std::move(x_on)};
}

GrandDesign assemble_grand_design(const Dataset& filled, const PatternSet& patterns,
                                  const ModelSpec& model,
                                  const FocusThresholds* thresholds) {
  if (patterns.assignment.size() != static_cast<std::size_t>(filled.nrow())) {
    fail_validation("patterns/PatternMismatch",
                    "pattern assignment covers " +
                        std::to_string(patterns.assignment.size()) +
                        " rows, dataset has " + std::to_string(filled.nrow()));
  }

  Design base = build_design(filled, model, thresholds);
  if (static_cast<std::int64_t>(base.rows.size()) != filled.nrow()) {
    fail_validation("patterns/PatternMismatch",
                    "grand design needs every row usable; found rows with "
                    "masked outcome or regressors");
  }

  GrandDesign grand;
  grand.y = std::move(base.y);
  grand.W = std::move(base.X);
  grand.names = std::move(base.names);
  grand.focus_col = base.focus_col;
  grand.cluster = std::move(base.cluster);
  grand.patterns =
      merge_small_patterns(patterns, grand.k_fill(), &grand.warnings);

  const int h = grand.patterns.pattern_count();
  grand.zblocks.reserve(h);
  for (int p = 1; p <= h; ++p) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(grand.W.rows(), grand.W.cols());
    for (Eigen::Index i = 0; i < grand.W.rows(); ++i) {
      if (grand.patterns.assignment[i] == p) {
        z.row(i) = grand.W.row(i);
      }
    }
    grand.zblocks.push_back(std::move(z));
  }
  return grand;
}

void write_pattern_summary_csv(const PatternSet& patterns, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    fail_validation("tabular/WriteError", "cannot write " + path);
  }
  out << "pattern,group_mask,count\n";
  out << "0,complete," << patterns.counts[0] << '\n';
  for (int p = 1; p <= patterns.pattern_count(); ++p) {
    out << p << ',' << patterns.mask_string(patterns.incomplete_masks[p - 1])
        << ',' << patterns.counts[p] << '\n';
  }
}

}  // namespace blocklogit
