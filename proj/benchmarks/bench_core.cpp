#include <benchmark/benchmark.h>

#include "blocklogit/averaging.hpp"
#include "blocklogit/impute.hpp"
#include "blocklogit/logit.hpp"
#include "blocklogit/patterns.hpp"
#include "blocklogit/rng.hpp"
#include "blocklogit/simulate.hpp"

using namespace blocklogit;

namespace {

void make_problem(int n, int k, Eigen::VectorXd& y, Eigen::MatrixXd& X) {
  Rng rng(99);
  X.resize(n, k);
  y.resize(n);
  Eigen::VectorXd beta(k);
  for (int j = 0; j < k; ++j) beta[j] = rng.normal(0.0, 0.4);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (int j = 2; j < k; ++j) X(i, j) = rng.normal();
    y[i] = rng.bernoulli(logistic_cdf(X.row(i).dot(beta))) ? 1.0 : 0.0;
  }
}

SimConfig bench_config() {
  SimConfig config;
  config.seed = 1;
  config.seed_set = true;
  config.countries = 4;
  config.interviewers_per_country = 12;
  config.respondents_per_interviewer_mean = 10;
  config.iws_propensity = {{"intercept", -1.2}, {"iw_female", 0.4}};
  config.capi_propensity = {{"intercept", -1.8}, {"r_female", 0.3}};
  return config;
}

}  // namespace

static void BM_FitLogit(benchmark::State& state) {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  make_problem(static_cast<int>(state.range(0)), 8, y, X);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_logit(y, X));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitLogit)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_IcWeights(benchmark::State& state) {
  Rng rng(5);
  std::vector<double> ics(state.range(0));
  for (double& ic : ics) ic = rng.normal(1000.0, 50.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ic_weights(ics));
  }
}
BENCHMARK(BM_IcWeights)->Arg(8)->Arg(64)->Arg(1024);

static void BM_FcsSweep(benchmark::State& state) {
  const SimConfig config = bench_config();
  auto [population, truth] = gen_population(config);
  const Dataset masked = apply_missingness(population, config);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fcs_chain(masked, 1, ++seed));
  }
}
BENCHMARK(BM_FcsSweep);

static void BM_GrandDesignAssembly(benchmark::State& state) {
  const SimConfig config = bench_config();
  auto [population, truth] = gen_population(config);
  const Dataset masked = apply_missingness(population, config);
  const PatternSet patterns = detect_patterns(masked);
  const FocusThresholds thresholds = focus_thresholds(masked);
  const Dataset filled = marginal_fill(masked, 3);
  const ModelSpec model = ModelSpec::from_schema(masked.schema(), "y_item");
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        assemble_grand_design(filled, patterns, model, &thresholds));
  }
}
BENCHMARK(BM_GrandDesignAssembly);

BENCHMARK_MAIN();
