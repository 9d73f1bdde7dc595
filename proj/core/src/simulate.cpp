#include "blocklogit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "blocklogit/errors.hpp"
#include "blocklogit/rng.hpp"

namespace blocklogit {

using nlohmann::json;

namespace {

const char* kPaperCountryOrder[] = {"ES", "IT", "GR", "PT", "PL", "SI",
                                    "AT", "DE", "BE", "LU", "SE", "EE"};

constexpr MethodKind kMcMethods[] = {MethodKind::Cca, MethodKind::FiMi,
                                     MethodKind::BbmaBic, MethodKind::BbmaAic};

std::map<std::string, double> read_coef_map(const json& j, const std::string& key) {
  std::map<std::string, double> out;
  if (!j.contains(key)) return out;
  for (const auto& [name, value] : j[key].items()) {
    out[name] = value.get<double>();
  }
  return out;
}

double heaped_expectation(Rng& rng, const SimConfig& config) {
  const double u = rng.uniform01();
  if (u < config.heap_mult10) {
    return 10.0 * static_cast<double>(rng.uniform_int(11));  // 0,10,...,100
  }
  if (u < config.heap_mult10 + config.heap_mult5) {
    return 5.0 * static_cast<double>(rng.uniform_int(21));  // 0,5,...,100
  }
  return static_cast<double>(rng.uniform_int(101));  // integer percent
}

double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal(mean, sd);
    if (v >= lo && v <= hi) return v;
  }
  return std::clamp(mean, lo, hi);
}

}  // namespace

std::string country_code(int index) {
  if (index >= 1 && index <= 12) return kPaperCountryOrder[index - 1];
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%02d", index);
  return buf;
}

SimConfig SimConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_validation("simulate/BadConfig", std::string("bad config JSON: ") + e.what());
  }
  SimConfig c;
  if (j.contains("seed")) {
    c.seed = j["seed"].get<std::uint64_t>();
    c.seed_set = true;
  }
  c.countries = j.value("countries", c.countries);
  c.interviewers_per_country =
      j.value("interviewers_per_country", c.interviewers_per_country);
  c.respondents_per_interviewer_mean = j.value(
      "respondents_per_interviewer_mean", c.respondents_per_interviewer_mean);
  c.respondents_fixed = j.value("respondents_fixed", c.respondents_fixed);
  c.beta_intercept = j.value("beta_intercept", c.beta_intercept);
  c.beta_focus = j.value("beta_focus", c.beta_focus);
  if (j.contains("beta_controls")) c.beta_controls = read_coef_map(j, "beta_controls");
  if (j.contains("heaping")) {
    const auto& h = j["heaping"];
    c.heap_mult10 = h.value("mult10", c.heap_mult10);
    c.heap_mult5 = h.value("mult5", c.heap_mult5);
    c.heap_uniform = h.value("uniform", c.heap_uniform);
  }
  c.iw_female_p = j.value("iw_female_p", c.iw_female_p);
  c.iw_age_mean = j.value("iw_age_mean", c.iw_age_mean);
  c.iw_age_sd = j.value("iw_age_sd", c.iw_age_sd);
  c.iw_health_p = j.value("iw_health_p", c.iw_health_p);
  c.r_female_p = j.value("r_female_p", c.r_female_p);
  c.r_age_mean = j.value("r_age_mean", c.r_age_mean);
  c.r_age_sd = j.value("r_age_sd", c.r_age_sd);
  c.r_numeracy_p = j.value("r_numeracy_p", c.r_numeracy_p);
  if (j.contains("iws_propensity")) c.iws_propensity = read_coef_map(j, "iws_propensity");
  if (j.contains("capi_propensity")) c.capi_propensity = read_coef_map(j, "capi_propensity");
  if (j.contains("iws_maskable")) {
    c.iws_maskable = j["iws_maskable"].get<std::vector<std::string>>();
  }
  if (j.contains("capi_maskable")) {
    c.capi_maskable = j["capi_maskable"].get<std::vector<std::string>>();
  }
  c.validate();
  return c;
}

SimConfig SimConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail_validation("simulate/BadConfig", "cannot open config file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string SimConfig::to_json_text() const {
  json j;
  j["seed"] = seed;
  j["countries"] = countries;
  j["interviewers_per_country"] = interviewers_per_country;
  j["respondents_per_interviewer_mean"] = respondents_per_interviewer_mean;
  j["respondents_fixed"] = respondents_fixed;
  j["beta_intercept"] = beta_intercept;
  j["beta_focus"] = beta_focus;
  j["beta_controls"] = beta_controls;
  j["heaping"] = {{"mult10", heap_mult10}, {"mult5", heap_mult5}, {"uniform", heap_uniform}};
  j["iw_female_p"] = iw_female_p;
  j["iw_age_mean"] = iw_age_mean;
  j["iw_age_sd"] = iw_age_sd;
  j["iw_health_p"] = iw_health_p;
  j["r_female_p"] = r_female_p;
  j["r_age_mean"] = r_age_mean;
  j["r_age_sd"] = r_age_sd;
  j["r_numeracy_p"] = r_numeracy_p;
  j["iws_propensity"] = iws_propensity;
  j["capi_propensity"] = capi_propensity;
  j["iws_maskable"] = iws_maskable;
  j["capi_maskable"] = capi_maskable;
  return j.dump(2) + "\n";
}

Schema SimConfig::schema() const {
  Schema schema;
  auto add = [&schema](const char* name, ColumnKind kind, ColumnRole role,
                       VarGroup group) {
    schema.columns.push_back(ColumnSpec{name, kind, role, group, ImputeModel::Default});
  };
  add("resp_id", ColumnKind::Id, ColumnRole::RowId, VarGroup::None);
  add("country", ColumnKind::Id, ColumnRole::CountryId, VarGroup::None);
  add("iw_id", ColumnKind::Id, ColumnRole::InterviewerId, VarGroup::None);
  add("iw_expect", ColumnKind::Continuous, ColumnRole::Expectation, VarGroup::Iws);
  add("iw_health", ColumnKind::Binary, ColumnRole::None, VarGroup::Iws);
  add("iw_female", ColumnKind::Binary, ColumnRole::None, VarGroup::Roster);
  add("iw_age", ColumnKind::Continuous, ColumnRole::None, VarGroup::Roster);
  add("r_numeracy", ColumnKind::Binary, ColumnRole::Control, VarGroup::Capi);
  add("r_female", ColumnKind::Binary, ColumnRole::Control, VarGroup::Capi);
  add("r_age", ColumnKind::Continuous, ColumnRole::None, VarGroup::None);
  add("y_item", ColumnKind::Binary, ColumnRole::Outcome, VarGroup::None);
  schema.validate();
  return schema;
}

std::vector<std::string> SimConfig::beta_names() const {
  // control order matches the generated schema, hence the design matrix
  std::vector<std::string> names = {"(intercept)", "iw_expect:high"};
  for (const char* name : {"r_numeracy", "r_female"}) {
    if (beta_controls.count(name)) names.push_back(name);
  }
  return names;
}

Eigen::VectorXd SimConfig::beta_vector() const {
  Eigen::VectorXd beta(2 + beta_controls.size());
  beta[0] = beta_intercept;
  beta[1] = beta_focus;
  int i = 2;
  for (const char* name : {"r_numeracy", "r_female"}) {
    auto it = beta_controls.find(name);
    if (it != beta_controls.end()) beta[i++] = it->second;
  }
  return beta;
}

void SimConfig::validate() const {
  if (countries < 1 || interviewers_per_country < 1 ||
      respondents_per_interviewer_mean < 1.0) {
    fail_validation("simulate/BadConfig", "counts must be positive");
  }
  const double heap_total = heap_mult10 + heap_mult5 + heap_uniform;
  if (heap_mult10 < 0 || heap_mult5 < 0 || heap_uniform < 0 ||
      std::abs(heap_total - 1.0) > 1e-9) {
    fail_validation("simulate/BadConfig", "heaping masses must be a probability mixture");
  }
  for (const auto& [name, coef] : beta_controls) {
    if (name != "r_numeracy" && name != "r_female") {
      fail_validation("simulate/BadConfig",
                      "unknown control '" + name + "' in beta_controls");
    }
  }

  // MAR guarantee: propensities may only read always-observed columns.
  std::set<std::string> maskable(iws_maskable.begin(), iws_maskable.end());
  maskable.insert(capi_maskable.begin(), capi_maskable.end());
  const Schema s = schema();
  for (const auto& name : iws_maskable) {
    const ColumnSpec* spec = s.find(name);
    if (spec == nullptr || spec->group != VarGroup::Iws) {
      fail_validation("simulate/BadConfig",
                      "iws_maskable column '" + name + "' is not an iws column");
    }
  }
  for (const auto& name : capi_maskable) {
    const ColumnSpec* spec = s.find(name);
    if (spec == nullptr || spec->group != VarGroup::Capi) {
      fail_validation("simulate/BadConfig",
                      "capi_maskable column '" + name + "' is not a capi column");
    }
  }
  auto check_propensity = [&](const std::map<std::string, double>& prop,
                              const char* label, bool allow_iws_flag,
                              bool interviewer_level) {
    for (const auto& [name, coef] : prop) {
      if (name == "intercept") continue;
      if (name == "@iws_missing") {
        if (allow_iws_flag) continue;
        fail_validation("simulate/MarViolation",
                        std::string(label) + " cannot use @iws_missing");
      }
      if (maskable.count(name)) {
        fail_validation("simulate/MarViolation",
                        std::string(label) + " reads maskable column '" + name + "'");
      }
      const ColumnSpec* spec = s.find(name);
      if (spec == nullptr || spec->kind == ColumnKind::Id) {
        fail_validation("simulate/MarViolation",
                        std::string(label) + " references unknown column '" + name + "'");
      }
      if (interviewer_level && spec->group != VarGroup::Roster &&
          spec->group != VarGroup::Iws) {
        fail_validation("simulate/MarViolation",
                        std::string(label) + " must use interviewer-level columns, got '" +
                            name + "'");
      }
    }
  };
  check_propensity(iws_propensity, "iws_propensity", false, true);
  check_propensity(capi_propensity, "capi_propensity", true, false);
}

std::pair<Dataset, TruthRecord> gen_population(const SimConfig& config) {
  config.validate();
  const Schema schema = config.schema();
  Rng rng = Rng(config.seed).split("gen");

  struct Interviewer {
    std::string id;
    std::string country;
    double expect = 0.0;
    double health = 0.0;
    double female = 0.0;
    double age = 0.0;
    int respondents = 0;
  };

  std::vector<Interviewer> interviewers;
  std::map<std::string, std::vector<double>> expect_by_country;
  for (int c = 1; c <= config.countries; ++c) {
    const std::string country = country_code(c);
    for (int i = 1; i <= config.interviewers_per_country; ++i) {
      Interviewer iw;
      char id[32];
      std::snprintf(id, sizeof(id), "%s-IW%03d", country.c_str(), i);
      iw.id = id;
      iw.country = country;
      iw.expect = heaped_expectation(rng, config);
      iw.health = rng.bernoulli(config.iw_health_p) ? 1.0 : 0.0;
      iw.female = rng.bernoulli(config.iw_female_p) ? 1.0 : 0.0;
      iw.age = truncated_normal(rng, config.iw_age_mean, config.iw_age_sd, 21.0, 80.0);
      if (config.respondents_fixed) {
        iw.respondents = static_cast<int>(config.respondents_per_interviewer_mean);
      } else {
        iw.respondents =
            1 + static_cast<int>(rng.poisson(config.respondents_per_interviewer_mean - 1.0));
      }
      expect_by_country[country].push_back(iw.expect);
      interviewers.push_back(std::move(iw));
    }
  }

  TruthRecord truth;
  truth.beta_names = config.beta_names();
  truth.beta_true = config.beta_vector();
  for (auto& [country, values] : expect_by_country) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    truth.country_medians[country] =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  }

  Dataset data(schema);
  const int col_resp = data.require_column("resp_id");
  const int col_country = data.require_column("country");
  const int col_iw = data.require_column("iw_id");
  const int col_expect = data.require_column("iw_expect");
  const int col_health = data.require_column("iw_health");
  const int col_iwf = data.require_column("iw_female");
  const int col_iwage = data.require_column("iw_age");
  const int col_num = data.require_column("r_numeracy");
  const int col_rf = data.require_column("r_female");
  const int col_rage = data.require_column("r_age");
  const int col_y = data.require_column("y_item");

  double ame_total = 0.0;
  std::int64_t resp_counter = 0;
  for (const Interviewer& iw : interviewers) {
    const double focus =
        iw.expect > truth.country_medians[iw.country] ? 1.0 : 0.0;
    for (int j = 0; j < iw.respondents; ++j) {
      data.append_row();
      const std::int64_t r = data.nrow() - 1;
      char rid[32];
      std::snprintf(rid, sizeof(rid), "R%07lld",
                    static_cast<long long>(++resp_counter));
      data.set_token(col_resp, r, rid);
      data.set_token(col_country, r, iw.country);
      data.set_token(col_iw, r, iw.id);
      data.set_value(col_expect, r, iw.expect);
      data.set_value(col_health, r, iw.health);
      data.set_value(col_iwf, r, iw.female);
      data.set_value(col_iwage, r, iw.age);

      const double numeracy = rng.bernoulli(config.r_numeracy_p) ? 1.0 : 0.0;
      const double female = rng.bernoulli(config.r_female_p) ? 1.0 : 0.0;
      const double age =
          truncated_normal(rng, config.r_age_mean, config.r_age_sd, 51.0, 81.0);
      data.set_value(col_num, r, numeracy);
      data.set_value(col_rf, r, female);
      data.set_value(col_rage, r, age);

      double eta_base = config.beta_intercept;
      for (const auto& [name, coef] : config.beta_controls) {
        eta_base += coef * (name == "r_numeracy" ? numeracy : female);
      }
      const double eta = eta_base + config.beta_focus * focus;
      data.set_value(col_y, r, rng.bernoulli(logistic_cdf(eta)) ? 1.0 : 0.0);

      ame_total += logistic_cdf(eta_base + config.beta_focus) - logistic_cdf(eta_base);
    }
  }
  truth.true_ame = ame_total / static_cast<double>(data.nrow());
  return {std::move(data), std::move(truth)};
}

Dataset apply_missingness(const Dataset& complete, const SimConfig& config) {
  config.validate();
  for (int c = 0; c < complete.ncol(); ++c) {
    if (complete.missing_count(c) > 0) {
      fail_validation("simulate/BadConfig",
                      "apply_missingness expects a fully observed dataset");
    }
  }

  Rng rng = Rng(config.seed).split("mask");
  Dataset out = complete;
  const int col_iw = complete.require_role(ColumnRole::InterviewerId);

  auto feature_value = [&](const std::string& name, std::int64_t row,
                           bool iws_missing) -> double {
    if (name == "@iws_missing") return iws_missing ? 1.0 : 0.0;
    return complete.value(complete.require_column(name), row);
  };

  // interviewer-level draw, masks the whole iws block of that interviewer
  std::vector<std::string> iw_order;
  std::unordered_map<std::string, std::vector<std::int64_t>> iw_rows;
  for (std::int64_t r = 0; r < complete.nrow(); ++r) {
    const std::string id = complete.token(col_iw, r);
    auto it = iw_rows.find(id);
    if (it == iw_rows.end()) {
      iw_order.push_back(id);
      iw_rows[id] = {r};
    } else {
      it->second.push_back(r);
    }
  }

  std::vector<int> iws_cols;
  for (const auto& name : config.iws_maskable) {
    iws_cols.push_back(complete.require_column(name));
  }
  std::vector<int> capi_cols;
  for (const auto& name : config.capi_maskable) {
    capi_cols.push_back(complete.require_column(name));
  }

  std::unordered_map<std::string, bool> iws_missing;
  for (const auto& id : iw_order) {
    const std::int64_t row0 = iw_rows[id].front();
    double eta = 0.0;
    for (const auto& [name, coef] : config.iws_propensity) {
      eta += coef * (name == "intercept" ? 1.0 : feature_value(name, row0, false));
    }
    const bool miss = rng.bernoulli(logistic_cdf(eta));
    iws_missing[id] = miss;
    if (miss) {
      for (std::int64_t r : iw_rows[id]) {
        for (int c : iws_cols) out.set_missing(c, r);
      }
    }
  }

  for (std::int64_t r = 0; r < complete.nrow(); ++r) {
    const bool iw_miss = iws_missing[complete.token(col_iw, r)];
    double eta = 0.0;
    for (const auto& [name, coef] : config.capi_propensity) {
      eta += coef * (name == "intercept" ? 1.0 : feature_value(name, r, iw_miss));
    }
    if (rng.bernoulli(logistic_cdf(eta))) {
      for (int c : capi_cols) out.set_missing(c, r);
    }
  }

  // complete cases must still identify the fill-in coefficients
  const int k_design = 2 + static_cast<int>(config.beta_controls.size());
  std::int64_t cc = 0;
  for (std::int64_t r = 0; r < out.nrow(); ++r) {
    bool complete_row = true;
    for (int c : iws_cols) complete_row = complete_row && out.observed(c, r);
    for (int c : capi_cols) complete_row = complete_row && out.observed(c, r);
    if (complete_row) ++cc;
  }
  if (cc < k_design + 1) {
    fail_estimation("simulate/DegenerateDesign",
                    "propensities left only " + std::to_string(cc) +
                        " complete cases for " + std::to_string(k_design) +
                        " design columns");
  }
  return out;
}

namespace {

McReplication run_replication(const SimConfig& config, int rep,
                              const MonteCarloOptions& options) {
  McReplication record;
  record.rep = rep;

  SimConfig rep_config = config;
  rep_config.seed = Rng(config.seed).derived_seed("replication", rep);

  auto [complete, truth] = gen_population(rep_config);
  record.truth = truth.true_ame;

  Dataset masked;
  try {
    masked = apply_missingness(complete, rep_config);
  } catch (const Error& e) {
    for (std::size_t i = 0; i < std::size(kMcMethods); ++i) {
      McMethodOutcome fail;
      fail.error = e.code();
      record.methods.push_back(fail);
    }
    return record;
  }

  EstimateOptions est;
  est.m = options.m;
  est.seed = Rng(rep_config.seed).derived_seed("estimation");
  est.impute = options.impute;
  est.cluster_se = options.cluster_se;
  est.ma_order = options.ma_order;
  est.want_coefficient = false;

  ModelSpec model = ModelSpec::from_schema(masked.schema(), "y_item");
  MethodSetup setup = prepare_analysis(masked, model, est);

  for (MethodKind kind : kMcMethods) {
    McMethodOutcome outcome;
    try {
      const MethodEstimate estimate = run_method(setup, kind);
      outcome.ok = true;
      outcome.estimate = estimate.ame.ame;
      outcome.se = estimate.ame.se;
      outcome.ci_lo = estimate.ci_lo;
      outcome.ci_hi = estimate.ci_hi;
      outcome.covers =
          truth.true_ame >= estimate.ci_lo && truth.true_ame <= estimate.ci_hi;
    } catch (const Error& e) {
      outcome.error = e.code();
    }
    record.methods.push_back(outcome);
  }
  return record;
}

}  // namespace

MonteCarloReport monte_carlo(const SimConfig& config, int replications,
                             const MonteCarloOptions& options) {
  if (replications < 50) {
    fail_validation("simulate/BadConfig",
                    "monte_carlo needs at least 50 replications, got " +
                        std::to_string(replications));
  }
  config.validate();

  MonteCarloReport report;
  report.replications = replications;
  report.seed = config.seed;
  report.m = options.m;
  report.reps.resize(replications);

  unsigned threads = options.threads > 0
                         ? static_cast<unsigned>(options.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(replications));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= replications) return;
      report.reps[rep] = run_replication(config, rep, options);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // order-insensitive reduction over the rep-indexed records
  for (std::size_t mi = 0; mi < std::size(kMcMethods); ++mi) {
    McMethodAggregate agg;
    agg.method = kMcMethods[mi];
    std::vector<double> estimates;
    std::vector<double> biases;
    double se_sum = 0.0;
    int covered = 0;
    for (const auto& rep : report.reps) {
      const McMethodOutcome& o = rep.methods[mi];
      if (!o.ok) {
        ++agg.failed;
        continue;
      }
      ++agg.ok;
      estimates.push_back(o.estimate);
      biases.push_back(o.estimate - rep.truth);
      se_sum += o.se;
      if (o.covers) ++covered;
    }
    if (agg.ok > 0) {
      double mean_est = 0.0;
      double mean_bias = 0.0;
      for (std::size_t i = 0; i < estimates.size(); ++i) {
        mean_est += estimates[i];
        mean_bias += biases[i];
      }
      mean_est /= agg.ok;
      mean_bias /= agg.ok;
      double ss = 0.0;
      double ss_bias = 0.0;
      for (std::size_t i = 0; i < estimates.size(); ++i) {
        ss += (estimates[i] - mean_est) * (estimates[i] - mean_est);
        ss_bias += biases[i] * biases[i];
      }
      agg.mean_estimate = mean_est;
      agg.mean_bias = mean_bias;
      agg.empirical_sd = agg.ok > 1 ? std::sqrt(ss / (agg.ok - 1)) : 0.0;
      agg.mc_se_bias = agg.ok > 1 ? agg.empirical_sd / std::sqrt(agg.ok) : 0.0;
      agg.mean_se = se_sum / agg.ok;
      agg.rmse = std::sqrt(ss_bias / agg.ok);
      agg.coverage = static_cast<double>(covered) / agg.ok;
    }
    report.methods.push_back(agg);
  }
  return report;
}

void MonteCarloReport::write_methods_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail_validation("tabular/WriteError", "cannot write " + path);
  out << "method,ok,failed,mean_estimate,mean_bias,mc_se_bias,empirical_sd,"
         "mean_se,rmse,coverage\n";
  char buf[320];
  for (const auto& m : methods) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  to_string(m.method), m.ok, m.failed, m.mean_estimate,
                  m.mean_bias, m.mc_se_bias, m.empirical_sd, m.mean_se, m.rmse,
                  m.coverage);
    out << buf;
  }
}

void MonteCarloReport::write_reps_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail_validation("tabular/WriteError", "cannot write " + path);
  out << "rep,method,status,estimate,se,ci_lo,ci_hi,truth,covers\n";
  char buf[320];
  for (const auto& rep : reps) {
    for (std::size_t mi = 0; mi < rep.methods.size(); ++mi) {
      const McMethodOutcome& o = rep.methods[mi];
      if (o.ok) {
        std::snprintf(buf, sizeof(buf), "%d,%s,ok,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      rep.rep, to_string(kMcMethods[mi]), o.estimate, o.se,
                      o.ci_lo, o.ci_hi, rep.truth, o.covers ? 1 : 0);
      } else {
        std::snprintf(buf, sizeof(buf), "%d,%s,%s,,,,,%.17g,\n", rep.rep,
                      to_string(kMcMethods[mi]), o.error.c_str(), rep.truth);
      }
      out << buf;
    }
  }
}

std::string MonteCarloReport::summary_text() const {
  std::ostringstream out;
  out << "Monte Carlo summary: " << replications << " replications, M = " << m
      << ", seed = " << seed << "\n\n";
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%-10s %6s %6s %12s %12s %12s %12s %10s\n",
                "method", "ok", "fail", "mean bias", "emp. sd", "mean se",
                "rmse", "coverage");
  out << buf;
  for (const auto& mrow : methods) {
    std::snprintf(buf, sizeof(buf),
                  "%-10s %6d %6d %12.5f %12.5f %12.5f %12.5f %10.3f\n",
                  to_string(mrow.method), mrow.ok, mrow.failed, mrow.mean_bias,
                  mrow.empirical_sd, mrow.mean_se, mrow.rmse, mrow.coverage);
    out << buf;
  }
  out << "\nCI level 0.95; significance stars ** p<0.01, * p<0.05 "
         "(two-sided)\n";
  return out.str();
}

}  // namespace blocklogit
