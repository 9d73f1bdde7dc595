#include "blocklogit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "blocklogit/averaging.hpp"
#include "blocklogit/dataset.hpp"
#include "blocklogit/errors.hpp"
#include "blocklogit/impute.hpp"
#include "blocklogit/methods.hpp"
#include "blocklogit/patterns.hpp"
#include "blocklogit/report.hpp"
#include "blocklogit/rng.hpp"
#include "blocklogit/simulate.hpp"

namespace blocklogit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json config_json(const RunConfig& config) {
  json j;
  j["subcommand"] = config.subcommand;
  j["data"] = config.data_path;
  j["schema"] = config.schema_path;
  j["config"] = config.config_path;
  j["method"] = config.method;
  j["item"] = config.item;
  j["m"] = config.m;
  if (config.seed) j["seed"] = *config.seed;
  j["by_country"] = config.by_country;
  j["cluster_se"] = config.cluster_se;
  j["ma_order"] = config.ma_order;
  j["burn_in"] = config.burn_in;
  j["replications"] = config.replications;
  j["bin_width"] = config.bin_width;
  return j;
}

// Every defaulted decision lands in the manifest so runs are auditable.
void write_manifest(const RunConfig& config, const std::string& out_dir) {
  json j;
  j["tool"] = "blocklogit";
  j["version"] = kToolVersion;
  j["subcommand"] = config.subcommand;
  const json cfg = config_json(config);
  j["config"] = cfg;
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.dump())));
  j["config_hash"] = hash;
  j["defaults"] = {
      {"star_thresholds", {kStarThreshold1, kStarThreshold2}},
      {"burn_in", config.burn_in},
      {"pmm_donors", ImputeOptions{}.pmm_donors},
      {"hot_deck_age_window", ImputeOptions{}.age_window},
      {"ma_order", config.ma_order},
      {"ma_variance", "buckland-1997"},
      {"separation_threshold", LogitOptions{}.separation_threshold},
      {"max_iterations", LogitOptions{}.max_iterations},
      {"score_tol", LogitOptions{}.score_tol},
      {"loglik_rel_tol", LogitOptions{}.loglik_rel_tol},
      {"ci_level", 0.95},
  };
  std::ofstream out(out_dir + "/manifest.json");
  if (!out) fail_validation("cli/WriteError", "cannot write manifest");
  out << j.dump(2) << '\n';
}

MaOrder parse_ma_order(const std::string& text) {
  if (text == "pool-first") return MaOrder::PoolFirst;
  if (text == "average-first") return MaOrder::AverageFirst;
  fail_validation("cli/BadConfig", "unknown --ma-order '" + text + "'");
}

std::uint64_t require_seed(const RunConfig& config) {
  if (!config.seed) {
    fail_validation("cli/MissingSeed",
                    "subcommand '" + config.subcommand + "' with method '" +
                        config.method + "' is stochastic; pass --seed");
  }
  return *config.seed;
}

std::string require_path(const std::string& path, const char* what) {
  if (path.empty()) {
    fail_validation("cli/BadConfig", std::string("missing required ") + what);
  }
  if (!fs::exists(path)) {
    fail_validation("cli/FileNotFound", std::string(what) + " '" + path + "' not found");
  }
  return path;
}

struct LoadedData {
  Schema schema;
  Dataset data;
};

LoadedData load_inputs(const RunConfig& config) {
  LoadedData loaded;
  loaded.schema = Schema::from_json_file(require_path(config.schema_path, "--schema"));
  loaded.data = Dataset::load_csv(require_path(config.data_path, "--data"), loaded.schema);
  return loaded;
}

std::vector<std::string> select_items(const Schema& schema, const RunConfig& config) {
  std::vector<std::string> items = schema.role_columns(ColumnRole::Outcome);
  if (items.empty()) {
    fail_validation("cli/BadConfig", "schema declares no outcome columns");
  }
  if (!config.item.empty()) {
    if (std::find(items.begin(), items.end(), config.item) == items.end()) {
      fail_validation("cli/BadConfig",
                      "--item '" + config.item + "' is not an outcome column");
    }
    return {config.item};
  }
  return items;
}

EstimateOptions estimate_options(const RunConfig& config, std::uint64_t seed) {
  EstimateOptions options;
  options.m = config.m;
  options.seed = seed;
  options.impute.burn_in = config.burn_in;
  options.cluster_se = config.cluster_se;
  options.ma_order = parse_ma_order(config.ma_order);
  return options;
}

int run_simulate(const RunConfig& config) {
  SimConfig sim = SimConfig::from_json_file(require_path(config.config_path, "--config"));
  if (config.seed) {
    sim.seed = *config.seed;
    sim.seed_set = true;
  }
  if (!sim.seed_set) {
    fail_validation("cli/MissingSeed",
                    "simulate is stochastic; set a seed in the config or pass --seed");
  }

  auto [population, truth] = gen_population(sim);
  const Dataset masked = apply_missingness(population, sim);

  fs::create_directories(config.out_dir);
  population.save_csv(config.out_dir + "/population.csv");
  masked.save_csv(config.out_dir + "/data.csv");
  sim.schema().to_json_file(config.out_dir + "/schema.json");
  {
    json j;
    j["beta_names"] = truth.beta_names;
    std::vector<double> beta(truth.beta_true.data(),
                             truth.beta_true.data() + truth.beta_true.size());
    j["beta_true"] = beta;
    j["true_ame"] = truth.true_ame;
    j["country_medians"] = truth.country_medians;
    std::ofstream out(config.out_dir + "/truth.json");
    out << j.dump(2) << '\n';
  }
  {
    std::ofstream out(config.out_dir + "/sim_config.json");
    out << sim.to_json_text();
  }
  write_manifest(config, config.out_dir);
  return 0;
}

int run_impute(const RunConfig& config) {
  const std::uint64_t seed = require_seed(config);
  LoadedData loaded = load_inputs(config);
  const auto items = select_items(loaded.schema, config);

  // eligible rows for the (single) item under imputation
  if (items.size() > 1) {
    fail_validation("cli/BadConfig",
                    "impute works per item; pass --item to pick one of the " +
                        std::to_string(items.size()) + " outcome columns");
  }
  EstimateOptions options = estimate_options(config, seed);
  ModelSpec model = ModelSpec::from_schema(loaded.schema, items.front());
  MethodSetup setup = prepare_analysis(loaded.data, model, options);
  const ImputationSet set =
      multiple_impute(setup.eligible, config.m, seed, options.impute);

  fs::create_directories(config.out_dir);
  save_imputation_set(set, config.out_dir);
  write_manifest(config, config.out_dir);
  return 0;
}

struct ScopedResult {
  std::string scope;
  std::string item;
  MethodEstimate estimate;
};

std::vector<ScopedResult> run_estimates(const RunConfig& config,
                                        const LoadedData& loaded,
                                        MethodKind kind, std::uint64_t seed,
                                        bool want_coefficient) {
  std::vector<ScopedResult> results;
  const auto items = select_items(loaded.schema, config);

  std::vector<std::pair<std::string, Dataset>> scopes;
  scopes.emplace_back("ALL", loaded.data);
  if (config.by_country) {
    for (auto& [country, part] : country_split(loaded.data)) {
      scopes.emplace_back(country, std::move(part));
    }
  }

  for (const auto& [scope, data] : scopes) {
    if (config.by_country && scope == "ALL") continue;
    for (const auto& item : items) {
      EstimateOptions options = estimate_options(
          config, Rng(seed).derived_seed(scope + "/" + item));
      options.want_coefficient = want_coefficient;
      ModelSpec model = ModelSpec::from_schema(loaded.schema, item);
      MethodSetup setup = prepare_analysis(data, model, options);
      ScopedResult result;
      result.scope = scope;
      result.item = item;
      result.estimate = run_method(setup, kind);
      results.push_back(std::move(result));
    }
  }
  return results;
}

int run_fit(const RunConfig& config) {
  const MethodKind kind = parse_method(config.method);
  const std::uint64_t seed =
      kind == MethodKind::Cca ? (config.seed ? *config.seed : 0) : require_seed(config);
  LoadedData loaded = load_inputs(config);

  const auto results = run_estimates(config, loaded, kind, seed, true);

  fs::create_directories(config.out_dir);
  std::ofstream out(config.out_dir + "/fit.csv");
  if (!out) fail_validation("cli/WriteError", "cannot write fit.csv");
  out << "scope,item,method,term,estimate,se,n,m,df\n";
  for (const auto& r : results) {
    out << r.scope << ',' << r.item << ',' << to_string(kind) << ",focus,"
        << format_full(r.estimate.coef.value_or(0.0)) << ','
        << format_full(r.estimate.coef_se.value_or(0.0)) << ','
        << r.estimate.n_used << ',' << r.estimate.m_used << ','
        << format_full(r.estimate.df) << '\n';
  }
  out.close();
  write_manifest(config, config.out_dir);
  return 0;
}

int run_ame(const RunConfig& config) {
  const MethodKind kind = parse_method(config.method);
  const std::uint64_t seed =
      kind == MethodKind::Cca ? (config.seed ? *config.seed : 0) : require_seed(config);
  LoadedData loaded = load_inputs(config);

  const auto results = run_estimates(config, loaded, kind, seed, false);

  std::vector<AmeEntry> entries;
  for (const auto& r : results) {
    AmeEntry e;
    e.country = r.scope;
    e.item = r.item;
    e.estimate = r.estimate.ame.ame;
    e.se = r.estimate.ame.se;
    e.stars = r.estimate.ame.stars;
    e.z = r.estimate.ame.z;
    e.p = r.estimate.ame.p;
    entries.push_back(std::move(e));
  }

  fs::create_directories(config.out_dir);
  write_ame_csv(entries, config.out_dir + "/ame.csv");
  {
    std::ofstream out(config.out_dir + "/ame_table.txt");
    if (!out) fail_validation("cli/WriteError", "cannot write ame_table.txt");
    out << format_ame_table(entries, to_string(kind));
  }
  write_manifest(config, config.out_dir);
  return 0;
}

int run_average(const RunConfig& config) {
  const std::uint64_t seed = require_seed(config);
  LoadedData loaded = load_inputs(config);
  const auto items = select_items(loaded.schema, config);

  struct AveragedRow {
    std::string item;
    Criterion criterion;
    AveragedEstimate averaged;
  };
  std::vector<AveragedRow> rows;
  std::vector<std::pair<std::string, AveragedEstimate>> submodel_files;

  for (const auto& item : items) {
    EstimateOptions options =
        estimate_options(config, Rng(seed).derived_seed("ALL/" + item));
    ModelSpec model = ModelSpec::from_schema(loaded.schema, item);
    MethodSetup setup = prepare_analysis(loaded.data, model, options);
    const ImputationSet set =
        multiple_impute(setup.eligible, config.m, options.seed, options.impute);

    for (Criterion criterion : {Criterion::Bic, Criterion::Aic}) {
      MiAverageOptions mi;
      mi.criterion = criterion;
      mi.order = options.ma_order;
      mi.statistic = AveragedStatistic::FocusCoefficient;
      mi.cluster_se = config.cluster_se;
      const AveragedEstimate averaged = mi_model_average(
          set, setup.patterns, model, mi, setup.thresholds_ptr());
      rows.push_back({item, criterion, averaged});
      if (criterion == Criterion::Bic) {
        submodel_files.emplace_back(item, averaged);
      }
    }
  }

  fs::create_directories(config.out_dir);
  for (const auto& [item, averaged] : submodel_files) {
    write_submodel_csv(averaged, config.out_dir + "/submodels_" + item + ".csv");
  }
  std::ofstream out(config.out_dir + "/averaged.csv");
  if (!out) fail_validation("cli/WriteError", "cannot write averaged.csv");
  out << "item,criterion,beta_ma,se_ma\n";
  for (const auto& row : rows) {
    out << row.item << ',' << to_string(row.criterion) << ','
        << format_full(row.averaged.beta_ma) << ','
        << format_full(std::sqrt(std::max(0.0, row.averaged.var_ma))) << '\n';
  }
  out.close();
  write_manifest(config, config.out_dir);
  return 0;
}

int run_montecarlo(const RunConfig& config) {
  SimConfig sim = SimConfig::from_json_file(require_path(config.config_path, "--config"));
  if (config.seed) {
    sim.seed = *config.seed;
    sim.seed_set = true;
  }
  if (!sim.seed_set) {
    fail_validation("cli/MissingSeed",
                    "montecarlo is stochastic; set a seed in the config or pass --seed");
  }

  MonteCarloOptions options;
  options.m = config.m;
  options.threads = config.threads;
  options.impute.burn_in = config.burn_in;
  options.cluster_se = config.cluster_se;
  options.ma_order = parse_ma_order(config.ma_order);

  const MonteCarloReport report = monte_carlo(sim, config.replications, options);

  fs::create_directories(config.out_dir);
  report.write_methods_csv(config.out_dir + "/mc_methods.csv");
  report.write_reps_csv(config.out_dir + "/mc_reps.csv");
  {
    std::ofstream out(config.out_dir + "/mc_summary.txt");
    if (!out) fail_validation("cli/WriteError", "cannot write mc_summary.txt");
    out << report.summary_text();
  }
  write_manifest(config, config.out_dir);
  return 0;
}

int run_report(const RunConfig& config) {
  LoadedData loaded = load_inputs(config);
  const auto items = select_items(loaded.schema, config);

  const auto rates = response_rate_rows(loaded.data, items, true);
  std::vector<std::string> warnings;
  std::vector<HistogramRow> histogram;
  const bool has_expectation =
      loaded.data.role_column(ColumnRole::Expectation) >= 0;
  if (has_expectation) {
    histogram = emit_histogram(loaded.data, config.bin_width, &warnings);
  }
  const bool has_participation =
      loaded.data.role_column(ColumnRole::InterviewerId) >= 0 &&
      !loaded.schema.group_columns(VarGroup::Iws).empty();
  std::vector<ParticipationRow> participation;
  if (has_participation) {
    participation = interviewer_participation(loaded.data);
  }
  const PatternSet patterns = detect_patterns(loaded.data);

  fs::create_directories(config.out_dir);
  write_response_rates_csv(rates, config.out_dir + "/response_rates.csv");
  if (has_expectation) {
    write_histogram_csv(histogram, config.out_dir + "/expectation_histogram.csv");
  }
  if (has_participation) {
    write_participation_csv(participation,
                            config.out_dir + "/interviewer_participation.csv");
  }
  write_pattern_summary_csv(patterns, config.out_dir + "/patterns.csv");
  {
    std::ofstream out(config.out_dir + "/report.txt");
    if (!out) fail_validation("cli/WriteError", "cannot write report.txt");
    out << "Response rates\n\n" << format_response_rate_table(rates) << '\n';
    if (has_participation) {
      out << "Interviewer-survey participation\n\n"
          << format_participation_table(participation) << '\n';
    }
    out << "Missingness patterns (complete cases: " << patterns.counts[0]
        << " of " << loaded.data.nrow() << ")\n";
    for (int p = 1; p <= patterns.pattern_count(); ++p) {
      out << "  pattern " << p << " ("
          << patterns.mask_string(patterns.incomplete_masks[p - 1])
          << "): " << patterns.counts[p] << " rows\n";
    }
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    out << "\nSignificance: ** p<0.01, * p<0.05 (two-sided)\n";
  }
  write_manifest(config, config.out_dir);
  return 0;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    if (config.out_dir.empty()) {
      fail_validation("cli/BadConfig", "missing required --out directory");
    }
    if (config.subcommand == "simulate") return run_simulate(config);
    if (config.subcommand == "impute") return run_impute(config);
    if (config.subcommand == "fit") return run_fit(config);
    if (config.subcommand == "average") return run_average(config);
    if (config.subcommand == "ame") return run_ame(config);
    if (config.subcommand == "montecarlo") return run_montecarlo(config);
    if (config.subcommand == "report") return run_report(config);
    fail_validation("cli/BadConfig", "unknown subcommand '" + config.subcommand + "'");
  } catch (const Error& e) {
    std::cerr << "blocklogit: " << e.what() << '\n';
    return e.kind() == ErrorKind::Validation ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "blocklogit: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace blocklogit
