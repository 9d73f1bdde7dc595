#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace blocklogit {

inline constexpr const char* kToolVersion = "0.1.0";

// Parsed command line for one run; every stochastic subcommand requires a
// seed (from --seed or, for simulate/montecarlo, the config file).
struct RunConfig {
  std::string subcommand;  // simulate|impute|fit|average|ame|montecarlo|report
  std::string data_path;
  std::string schema_path;
  std::string config_path;
  std::string out_dir;
  std::string method = "cca";
  std::string item;  // restrict to one outcome item
  int m = 20;
  std::optional<std::uint64_t> seed;
  bool by_country = false;
  bool cluster_se = false;
  std::string ma_order = "pool-first";
  int burn_in = 10;
  int replications = 200;
  int threads = 0;
  double bin_width = 5.0;
};

// Runs one subcommand; writes artifacts under config.out_dir only.
// Returns 0 on success, 1 on validation errors, 2 on estimation failures.
int run(const RunConfig& config);

}  // namespace blocklogit
