#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "blocklogit/cli.hpp"
#include "blocklogit/errors.hpp"
#include "blocklogit/report.hpp"
#include "blocklogit/rng.hpp"
#include "blocklogit/simulate.hpp"
#include "test_support.hpp"

using namespace blocklogit;
using testsup::TempDir;

namespace {

// writes a small masked synthetic survey plus schema/config into dir
void write_fixture(const TempDir& dir, std::uint64_t seed) {
  SimConfig config;
  config.seed = seed;
  config.seed_set = true;
  config.countries = 3;
  config.interviewers_per_country = 10;
  config.respondents_per_interviewer_mean = 12;
  config.iws_propensity = {{"intercept", -1.2}, {"iw_female", 0.4}};
  config.capi_propensity = {
      {"intercept", -1.8}, {"r_female", 0.3}, {"@iws_missing", -50.0}};
  auto [population, truth] = gen_population(config);
  const Dataset masked = apply_missingness(population, config);
  masked.save_csv(dir.file("data.csv"));
  config.schema().to_json_file(dir.file("schema.json"));
  testsup::write_file(dir.file("sim.json"), config.to_json_text());
}

}  // namespace

TEST_CASE("table cells render byte-for-byte") {
  CHECK(format_estimate_cell(0.042, 0) == "0.042");
  CHECK(format_se_cell(0.030) == "(0.030)");
  CHECK(format_estimate_cell(0.101, 2) == "0.101**");
  CHECK(format_se_cell(0.017) == "(0.017)");
  CHECK(format_estimate_cell(-0.085, 0) == "-0.085");
  CHECK(format_se_cell(0.049) == "(0.049)");
  CHECK(format_estimate_cell(0.069, 1) == "0.069*");
}

TEST_CASE("country and item ordering match the published layout") {
  std::vector<AmeEntry> entries;
  for (const char* c : {"EE", "XX", "ES", "AT"}) {
    for (const char* i : {"home", "extra_item", "thinc2"}) {
      AmeEntry e;
      e.country = c;
      e.item = i;
      entries.push_back(e);
    }
  }
  CHECK(ordered_countries(entries) ==
        std::vector<std::string>{"ES", "AT", "EE", "XX"});
  CHECK(ordered_items(entries) ==
        std::vector<std::string>{"thinc2", "home", "extra_item"});
}

TEST_CASE("ame table renders the cells and the star footnote") {
  std::vector<AmeEntry> entries;
  AmeEntry a;
  a.country = "ES";
  a.item = "thinc2";
  a.estimate = 0.042;
  a.se = 0.030;
  a.stars = 0;
  AmeEntry b;
  b.country = "IT";
  b.item = "thinc2";
  b.estimate = 0.101;
  b.se = 0.017;
  b.stars = 2;
  entries = {a, b};
  const std::string table = format_ame_table(entries, "cca");
  CHECK(table.find("0.042") != std::string::npos);
  CHECK(table.find("(0.030)") != std::string::npos);
  CHECK(table.find("0.101**") != std::string::npos);
  CHECK(table.find("(0.017)") != std::string::npos);
  CHECK(table.find("** p<0.01, * p<0.05") != std::string::npos);
}

TEST_CASE("ame csv round trip reproduces the numerics exactly") {
  Rng rng(808);
  std::vector<AmeEntry> entries;
  for (int i = 0; i < 24; ++i) {
    AmeEntry e;
    e.country = country_code(1 + static_cast<int>(rng.uniform_int(13)));
    e.item = "item" + std::to_string(i % 4);
    e.estimate = rng.normal(0.0, 0.2);
    e.se = std::abs(rng.normal(0.0, 0.05));
    e.z = e.se > 0 ? e.estimate / e.se : 0.0;
    e.p = rng.uniform01();
    e.stars = static_cast<int>(rng.uniform_int(3));
    entries.push_back(e);
  }
  TempDir dir;
  write_ame_csv(entries, dir.file("ame.csv"));
  const auto back = read_ame_csv(dir.file("ame.csv"));
  REQUIRE(back.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(back[i].country == entries[i].country);
    CHECK(back[i].item == entries[i].item);
    CHECK(back[i].estimate == entries[i].estimate);
    CHECK(back[i].se == entries[i].se);
    CHECK(back[i].stars == entries[i].stars);
    CHECK(back[i].z == entries[i].z);
    CHECK(back[i].p == entries[i].p);
  }
}

TEST_CASE("histogram binning") {
  std::vector<std::optional<double>> values = {10.0, 10.0, 20.0};
  std::vector<std::string> country = {"AT", "AT", "AT"};

  SUBCASE("left-closed bins") {
    const auto rows = emit_histogram(values, country, 10.0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].bin_lo == 10.0);
    CHECK(rows[0].bin_hi == 20.0);
    CHECK(rows[0].count == 2);
    CHECK(rows[1].bin_lo == 20.0);
    CHECK(rows[1].count == 1);
  }

  SUBCASE("empty country omitted with warning") {
    values.push_back(std::nullopt);
    country.push_back("DE");
    std::vector<std::string> warnings;
    const auto rows = emit_histogram(values, country, 10.0, &warnings);
    for (const auto& r : rows) CHECK(r.country == "AT");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("DE") != std::string::npos);
  }

  SUBCASE("counts conserve the non-missing totals per country") {
    Rng rng(3434);
    std::vector<std::optional<double>> v;
    std::vector<std::string> c;
    std::map<std::string, std::int64_t> expected;
    for (int i = 0; i < 500; ++i) {
      const std::string cc = country_code(1 + static_cast<int>(rng.uniform_int(5)));
      c.push_back(cc);
      if (rng.bernoulli(0.2)) {
        v.emplace_back(std::nullopt);
      } else {
        v.emplace_back(static_cast<double>(rng.uniform_int(101)));
        ++expected[cc];
      }
    }
    const auto rows = emit_histogram(v, c, 7.5);
    std::map<std::string, std::int64_t> got;
    for (const auto& r : rows) got[r.country] += r.count;
    CHECK(got == expected);
  }

  SUBCASE("invalid bin width") {
    CHECK_THROWS_WITH_AS(emit_histogram(values, country, 0.0),
                         doctest::Contains("InvalidBinWidth"), Error);
    CHECK_THROWS_WITH_AS(emit_histogram(values, country, -3.0),
                         doctest::Contains("InvalidBinWidth"), Error);
  }

  SUBCASE("values outside the percent scale are rejected") {
    CHECK_THROWS_WITH_AS(
        emit_histogram({std::optional<double>(120.0)}, {"AT"}, 10.0),
        doctest::Contains("TypeViolation"), Error);
  }
}

TEST_CASE("response rate table text") {
  Schema schema = Schema::from_json_text(R"({
    "columns": [
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "part", "kind": "binary", "role": "outcome"}
    ]
  })");
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 70; ++i) rows.push_back({"AT", i < 51 ? "1" : "0"});
  const Dataset d = testsup::build_dataset(schema, rows);
  const auto rates = response_rate_rows(d, {"part"}, true);
  const std::string text = format_response_rate_table(rates);
  CHECK(text.find("0.729") != std::string::npos);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0].scope == "ALL");
  CHECK(rates[1].scope == "AT");
  CHECK(rates[1].eligible == 70);
  CHECK(rates[1].ones == 51);
}

TEST_CASE("interviewer participation table with a closing Total row") {
  Schema schema = Schema::from_json_text(R"({
    "columns": [
      {"name": "iw", "kind": "id", "role": "interviewer-id"},
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "e", "kind": "continuous", "role": "expectation", "group": "iws"},
      {"name": "y", "kind": "binary", "role": "outcome"}
    ]
  })");
  // AT: 70 interviewers, 51 complete; IT: 140 interviewers, 132 complete
  std::vector<std::vector<std::string>> rows;
  auto add_country = [&](const std::string& country, int total, int part) {
    for (int i = 0; i < total; ++i) {
      rows.push_back({country + std::to_string(i), country,
                      i < part ? "50" : "NA", "1"});
    }
  };
  add_country("AT", 70, 51);
  add_country("IT", 140, 132);
  const Dataset d = testsup::build_dataset(schema, rows);

  const auto table = interviewer_participation(d);
  REQUIRE(table.size() == 3);
  CHECK(table[0].country == "AT");
  CHECK(table[0].interviewers == 70);
  CHECK(table[0].participating == 51);
  CHECK(table[1].country == "IT");
  CHECK(table[1].rate == doctest::Approx(132.0 / 140.0));
  CHECK(table[2].country == "Total");
  CHECK(table[2].interviewers == 210);
  CHECK(table[2].participating == 183);

  const std::string text = format_participation_table(table);
  CHECK(text.find("0.729") != std::string::npos);
  CHECK(text.find("0.943") != std::string::npos);
  CHECK(text.find("Total") != std::string::npos);
}

TEST_CASE("cli: missing inputs exit 1 with no partial outputs") {
  TempDir dir;
  RunConfig config;
  config.subcommand = "fit";
  config.data_path = dir.file("missing.csv");
  config.schema_path = dir.file("missing.json");
  config.out_dir = dir.file("out");
  CHECK(run(config) == 1);
  CHECK_FALSE(std::filesystem::exists(dir.file("out")));
}

TEST_CASE("cli: unknown subcommand and missing seed are validation errors") {
  RunConfig config;
  config.subcommand = "nonsense";
  config.out_dir = "/tmp/never_used_blocklogit";
  CHECK(run(config) == 1);

  TempDir dir;
  write_fixture(dir, 4321);
  RunConfig fit;
  fit.subcommand = "fit";
  fit.data_path = dir.file("data.csv");
  fit.schema_path = dir.file("schema.json");
  fit.method = "fi-mi";  // stochastic, no seed passed
  fit.out_dir = dir.file("out");
  CHECK(run(fit) == 1);
  CHECK_FALSE(std::filesystem::exists(dir.file("out")));
}

TEST_CASE("cli: estimation failures exit 2") {
  TempDir dir;
  // two observations, binary focus perfectly separates the outcome
  testsup::write_file(dir.file("schema.json"), R"({
    "columns": [
      {"name": "f", "kind": "binary", "role": "focus", "group": "iws"},
      {"name": "y", "kind": "binary", "role": "outcome"}
    ]
  })");
  testsup::write_file(dir.file("data.csv"), "f,y\n0,0\n1,1\n");
  RunConfig config;
  config.subcommand = "fit";
  config.data_path = dir.file("data.csv");
  config.schema_path = dir.file("schema.json");
  config.method = "cca";
  config.out_dir = dir.file("out");
  CHECK(run(config) == 2);
}

TEST_CASE("cli: cca fit equals fi-mi point estimate on fully observed data") {
  TempDir dir;
  SimConfig config;
  config.seed = 11;
  config.seed_set = true;
  config.countries = 2;
  config.interviewers_per_country = 8;
  config.respondents_per_interviewer_mean = 10;
  auto [population, truth] = gen_population(config);
  population.save_csv(dir.file("data.csv"));
  config.schema().to_json_file(dir.file("schema.json"));

  RunConfig cca;
  cca.subcommand = "fit";
  cca.data_path = dir.file("data.csv");
  cca.schema_path = dir.file("schema.json");
  cca.method = "cca";
  cca.out_dir = dir.file("out_cca");
  REQUIRE(run(cca) == 0);

  RunConfig fi = cca;
  fi.method = "fi-mi";
  fi.m = 2;
  fi.seed = 99;
  fi.out_dir = dir.file("out_fi");
  REQUIRE(run(fi) == 0);

  auto extract_estimate = [](const std::string& path) {
    const std::string text = testsup::read_file(path);
    const auto header_end = text.find('\n');
    const std::string row = text.substr(header_end + 1);
    // scope,item,method,term,estimate,...
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) pos = row.find(',', pos) + 1;
    return std::strtod(row.c_str() + pos, nullptr);
  };
  const double est_cca = extract_estimate(dir.file("out_cca/fit.csv"));
  const double est_fi = extract_estimate(dir.file("out_fi/fit.csv"));
  CHECK(est_cca == doctest::Approx(est_fi).epsilon(1e-10));
}

TEST_CASE("cli: stochastic subcommands are byte-identical across reruns") {
  TempDir dir;
  write_fixture(dir, 20240601);

  SUBCASE("simulate") {
    RunConfig config;
    config.subcommand = "simulate";
    config.config_path = dir.file("sim.json");
    config.out_dir = dir.file("sim_a");
    REQUIRE(run(config) == 0);
    config.out_dir = dir.file("sim_b");
    REQUIRE(run(config) == 0);
    CHECK(testsup::dir_contents(dir.file("sim_a")) ==
          testsup::dir_contents(dir.file("sim_b")));
  }

  SUBCASE("impute") {
    RunConfig config;
    config.subcommand = "impute";
    config.data_path = dir.file("data.csv");
    config.schema_path = dir.file("schema.json");
    config.m = 3;
    config.seed = 17;
    config.out_dir = dir.file("imp_a");
    REQUIRE(run(config) == 0);
    config.out_dir = dir.file("imp_b");
    REQUIRE(run(config) == 0);
    const auto a = testsup::dir_contents(dir.file("imp_a"));
    CHECK(a == testsup::dir_contents(dir.file("imp_b")));
    CHECK(a.count("imp_001.csv") == 1);
    CHECK(a.count("imp_003.csv") == 1);
    CHECK(a.count("imputations.json") == 1);
  }

  SUBCASE("ame with bbma weights") {
    RunConfig config;
    config.subcommand = "ame";
    config.data_path = dir.file("data.csv");
    config.schema_path = dir.file("schema.json");
    config.method = "bbma-bic";
    config.m = 2;
    config.seed = 5;
    config.out_dir = dir.file("ame_a");
    REQUIRE(run(config) == 0);
    config.out_dir = dir.file("ame_b");
    REQUIRE(run(config) == 0);
    CHECK(testsup::dir_contents(dir.file("ame_a")) ==
          testsup::dir_contents(dir.file("ame_b")));
  }
}

TEST_CASE("cli: by-country ame table carries one row pair per country") {
  TempDir dir;
  write_fixture(dir, 606060);
  RunConfig config;
  config.subcommand = "ame";
  config.data_path = dir.file("data.csv");
  config.schema_path = dir.file("schema.json");
  config.method = "cca";
  config.by_country = true;
  config.out_dir = dir.file("out");
  REQUIRE(run(config) == 0);

  const auto entries = read_ame_csv(dir.file("out/ame.csv"));
  REQUIRE(entries.size() == 3);  // fixture generates countries ES, IT, GR
  CHECK(entries[0].country == "ES");
  const std::string table = testsup::read_file(dir.file("out/ame_table.txt"));
  CHECK(table.find("ES") != std::string::npos);
  CHECK(table.find("GR") != std::string::npos);
  CHECK(table.find("y_item") != std::string::npos);
}

TEST_CASE("cli: four financial items render in the published column order") {
  TempDir dir;
  testsup::write_file(dir.file("schema.json"), R"({
    "columns": [
      {"name": "rid", "kind": "id", "role": "row-id"},
      {"name": "iw", "kind": "id", "role": "interviewer-id"},
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "f", "kind": "binary", "role": "focus", "group": "iws"},
      {"name": "x", "kind": "binary", "role": "control", "group": "capi"},
      {"name": "home", "kind": "binary", "role": "outcome"},
      {"name": "thinc2", "kind": "binary", "role": "outcome"},
      {"name": "bacc", "kind": "binary", "role": "outcome"},
      {"name": "ypen1", "kind": "binary", "role": "outcome"}
    ]
  })");
  {
    Rng rng(2026);
    std::string csv = "rid,iw,country,f,x,home,thinc2,bacc,ypen1\n";
    for (int i = 0; i < 240; ++i) {
      const bool f = (i / 6) % 2;
      const bool x = rng.bernoulli(0.5);
      const double eta = 0.1 + 0.8 * f + 0.4 * x;
      auto draw = [&]() {
        return rng.bernoulli(blocklogit::logistic_cdf(eta)) ? "1" : "0";
      };
      csv += "r" + std::to_string(i) + ",i" + std::to_string(i / 6) + "," +
             (i % 2 ? "ES" : "IT") + "," + (f ? "1" : "0") + "," +
             (x ? "1" : "0") + "," + draw() + "," + draw() + "," + draw() +
             "," + draw() + "\n";
    }
    testsup::write_file(dir.file("data.csv"), csv);
  }

  RunConfig config;
  config.subcommand = "ame";
  config.data_path = dir.file("data.csv");
  config.schema_path = dir.file("schema.json");
  config.method = "cca";
  config.out_dir = dir.file("out");
  REQUIRE(run(config) == 0);

  const auto entries = read_ame_csv(dir.file("out/ame.csv"));
  CHECK(entries.size() == 4);
  const std::string table = testsup::read_file(dir.file("out/ame_table.txt"));
  const auto t = table.find("thinc2");
  const auto y = table.find("ypen1");
  const auto b = table.find("bacc");
  const auto h = table.find("home");
  REQUIRE(t != std::string::npos);
  CHECK(t < y);
  CHECK(y < b);
  CHECK(b < h);

  SUBCASE("--item restricts the run to one outcome") {
    config.item = "bacc";
    config.out_dir = dir.file("out_one");
    REQUIRE(run(config) == 0);
    const auto one = read_ame_csv(dir.file("out_one/ame.csv"));
    REQUIRE(one.size() == 1);
    CHECK(one[0].item == "bacc");
  }

  SUBCASE("--item must name an outcome column") {
    config.item = "x";
    config.out_dir = dir.file("out_bad");
    CHECK(run(config) == 1);
  }
}

TEST_CASE("cli: report emits rates, histogram, and pattern summaries") {
  TempDir dir;
  write_fixture(dir, 515151);
  RunConfig config;
  config.subcommand = "report";
  config.data_path = dir.file("data.csv");
  config.schema_path = dir.file("schema.json");
  config.bin_width = 10.0;
  config.out_dir = dir.file("out");
  REQUIRE(run(config) == 0);

  const auto files = testsup::dir_contents(dir.file("out"));
  CHECK(files.count("response_rates.csv") == 1);
  CHECK(files.count("expectation_histogram.csv") == 1);
  CHECK(files.count("interviewer_participation.csv") == 1);
  CHECK(files.count("patterns.csv") == 1);
  CHECK(files.count("report.txt") == 1);
  CHECK(files.count("manifest.json") == 1);
  CHECK(files.at("report.txt").find("** p<0.01") != std::string::npos);
  CHECK(files.at("manifest.json").find("config_hash") != std::string::npos);
}

TEST_CASE("cli: average emits the per-submodel diagnostics table") {
  TempDir dir;
  write_fixture(dir, 777);
  RunConfig config;
  config.subcommand = "average";
  config.data_path = dir.file("data.csv");
  config.schema_path = dir.file("schema.json");
  config.m = 2;
  config.seed = 31;
  config.out_dir = dir.file("out");
  REQUIRE(run(config) == 0);

  const auto files = testsup::dir_contents(dir.file("out"));
  CHECK(files.count("averaged.csv") == 1);
  CHECK(files.count("submodels_y_item.csv") == 1);
  const std::string& table = files.at("submodels_y_item.csv");
  CHECK(table.find("r,blocks,k,logL,aic,bic,lambda_aic,lambda_bic,beta_focus,se") !=
        std::string::npos);
}
