#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "blocklogit/errors.hpp"
#include "blocklogit/impute.hpp"
#include "blocklogit/rng.hpp"
#include "test_support.hpp"

using namespace blocklogit;
using testsup::build_dataset;

namespace {

Schema interviewer_schema() {
  return Schema::from_json_text(R"({
    "columns": [
      {"name": "iw", "kind": "id", "role": "interviewer-id"},
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "e", "kind": "continuous", "role": "expectation", "group": "iws"},
      {"name": "h", "kind": "binary", "group": "iws"},
      {"name": "female", "kind": "binary", "group": "roster"},
      {"name": "age", "kind": "continuous", "group": "roster"}
    ]
  })");
}

Schema respondent_schema() {
  return Schema::from_json_text(R"({
    "columns": [
      {"name": "rid", "kind": "id", "role": "row-id"},
      {"name": "iw", "kind": "id", "role": "interviewer-id"},
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "e", "kind": "continuous", "role": "expectation", "group": "iws"},
      {"name": "female", "kind": "binary", "group": "roster"},
      {"name": "x", "kind": "binary", "role": "control", "group": "capi"},
      {"name": "y", "kind": "binary", "role": "outcome"}
    ]
  })");
}

}  // namespace

TEST_CASE("hot-deck donor copying") {
  const Schema schema = interviewer_schema();

  SUBCASE("a single donor in the country is the forced choice") {
    const Dataset table = build_dataset(schema, {
        {"i1", "A", "70", "1", "1", "50"},
        {"i2", "A", "NA", "NA", "0", "40"},
    });
    const Dataset done = hot_deck_interviewers(table, 5);
    CHECK(done.value(done.require_column("e"), 1) == 70.0);
    CHECK(done.value(done.require_column("h"), 1) == 1.0);
  }

  SUBCASE("recipients without missing values are untouched") {
    const Dataset table = build_dataset(schema, {
        {"i1", "A", "70", "1", "1", "50"},
        {"i2", "A", "80", "0", "0", "40"},
    });
    CHECK(hot_deck_interviewers(table, 5) == table);
  }

  SUBCASE("same seed twice gives identical tables") {
    std::vector<std::vector<std::string>> rows;
    Rng rng(3);
    for (int i = 0; i < 40; ++i) {
      rows.push_back({"i" + std::to_string(i), i % 2 ? "A" : "B",
                      rng.bernoulli(0.4) ? "NA" : std::to_string(10 * (i % 10)),
                      rng.bernoulli(0.4) ? "NA" : "1",
                      rng.bernoulli(0.5) ? "1" : "0",
                      std::to_string(30 + (i % 30))});
    }
    const Dataset table = build_dataset(schema, rows);
    CHECK(hot_deck_interviewers(table, 99) == hot_deck_interviewers(table, 99));
  }

  SUBCASE("matched donors are preferred when any exist") {
    // recipient is female, age 50: i2 matches, i3 does not
    const Dataset table = build_dataset(schema, {
        {"r", "A", "NA", "NA", "1", "50"},
        {"i2", "A", "60", "0", "1", "55"},
        {"i3", "A", "90", "1", "0", "20"},
    });
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Dataset done = hot_deck_interviewers(table, seed);
      CHECK(done.value(done.require_column("e"), 0) == 60.0);
    }
  }

  SUBCASE("falls back to any same-country donor without a match") {
    const Dataset table = build_dataset(schema, {
        {"r", "A", "NA", "NA", "1", "50"},
        {"i3", "A", "90", "1", "0", "20"},
    });
    const Dataset done = hot_deck_interviewers(table, 1);
    CHECK(done.value(done.require_column("e"), 0) == 90.0);
  }

  SUBCASE("a country without donors fails") {
    const Dataset table = build_dataset(schema, {
        {"i1", "A", "NA", "1", "1", "50"},
        {"i2", "B", "80", "1", "0", "40"},
    });
    CHECK_THROWS_WITH_AS(hot_deck_interviewers(table, 5),
                         doctest::Contains("NoDonorsInCountry"), Error);
  }
}

TEST_CASE("collapse_interviewers checks broadcast consistency") {
  const Schema schema = respondent_schema();
  const Dataset good = build_dataset(schema, {
      {"r1", "i1", "A", "70", "1", "1", "0"},
      {"r2", "i1", "A", "70", "1", "0", "1"},
      {"r3", "i2", "A", "NA", "0", "1", "1"},
  });
  const Dataset table = collapse_interviewers(good);
  CHECK(table.nrow() == 2);
  CHECK(table.ncol() == 4);  // iw, country, e, female

  const Dataset bad = build_dataset(schema, {
      {"r1", "i1", "A", "70", "1", "1", "0"},
      {"r2", "i1", "A", "80", "1", "0", "1"},
  });
  CHECK_THROWS_WITH_AS(collapse_interviewers(bad),
                       doctest::Contains("InconsistentInterviewer"), Error);
}

TEST_CASE("fcs_chain basics") {
  const Schema schema = respondent_schema();

  SUBCASE("no missing cells returns the input unchanged") {
    const Dataset d = build_dataset(schema, {
        {"r1", "i1", "A", "70", "1", "1", "0"},
        {"r2", "i1", "A", "70", "0", "0", "1"},
    });
    CHECK(fcs_chain(d, 10, 123) == d);
  }

  SUBCASE("degenerate binary column imputes the constant") {
    std::vector<std::vector<std::string>> rows;
    Rng rng(8);
    for (int i = 0; i < 30; ++i) {
      rows.push_back({"r" + std::to_string(i), "i1", "A", "70",
                      rng.bernoulli(0.5) ? "1" : "0",
                      rng.bernoulli(0.3) ? "NA" : "1",
                      rng.bernoulli(0.5) ? "1" : "0"});
    }
    const Dataset d = build_dataset(schema, rows);
    const Dataset done = fcs_chain(d, 5, 11);
    const int x = done.require_column("x");
    for (std::int64_t r = 0; r < done.nrow(); ++r) {
      CHECK(done.observed(x, r));
      CHECK(done.value(x, r) == 1.0);
    }
  }

  SUBCASE("same seed gives a bit-identical completed dataset") {
    std::vector<std::vector<std::string>> rows;
    Rng rng(21);
    for (int i = 0; i < 60; ++i) {
      rows.push_back({"r" + std::to_string(i), "i1", "A", "70",
                      rng.bernoulli(0.5) ? "1" : "0",
                      rng.bernoulli(0.3) ? "NA" : (rng.bernoulli(0.6) ? "1" : "0"),
                      rng.bernoulli(0.5) ? "1" : "0"});
    }
    const Dataset d = build_dataset(schema, rows);
    CHECK(fcs_chain(d, 10, 77) == fcs_chain(d, 10, 77));
  }

  SUBCASE("separable univariate fit falls back to marginal draws") {
    // x is perfectly predicted by the expectation, so the univariate logit
    // separates and the chain must fall back with a warning
    std::vector<std::vector<std::string>> rows;
    Rng rng(63);
    for (int i = 0; i < 60; ++i) {
      const double e = static_cast<double>(10 * (i % 11));
      const bool x = e > 50.0;
      rows.push_back({"r" + std::to_string(i), "i" + std::to_string(i), "A",
                      std::to_string(e), rng.bernoulli(0.5) ? "1" : "0",
                      rng.bernoulli(0.3) ? "NA" : (x ? "1" : "0"),
                      rng.bernoulli(0.5) ? "1" : "0"});
    }
    const Dataset d = build_dataset(schema, rows);
    ChainDiagnostics diag;
    const Dataset done = fcs_chain(d, 3, 99, {}, &diag);
    const int x = done.require_column("x");
    CHECK(done.missing_count(x) == 0);
    REQUIRE_FALSE(diag.warnings.empty());
    CHECK(diag.warnings.front().find("NonConvergentUnivariateFit") !=
          std::string::npos);
  }

  SUBCASE("all-missing column cannot anchor a model") {
    const Dataset d = build_dataset(schema, {
        {"r1", "i1", "A", "70", "1", "NA", "0"},
        {"r2", "i1", "A", "70", "0", "NA", "1"},
    });
    CHECK_THROWS_WITH_AS(fcs_chain(d, 5, 3),
                         doctest::Contains("AllMissingColumn"), Error);
  }

  SUBCASE("masked outcome cells are rejected") {
    const Dataset d = build_dataset(schema, {
        {"r1", "i1", "A", "70", "1", "1", "NA"},
        {"r2", "i1", "A", "70", "0", "0", "1"},
    });
    CHECK_THROWS_WITH_AS(fcs_chain(d, 5, 3), doctest::Contains("MaskedOutcome"),
                         Error);
  }
}

TEST_CASE("multiple_impute contracts") {
  const Schema schema = respondent_schema();

  SUBCASE("fully observed data yields identical copies") {
    const Dataset d = build_dataset(schema, {
        {"r1", "i1", "A", "70", "1", "1", "0"},
        {"r2", "i1", "A", "70", "1", "0", "1"},
    });
    const ImputationSet set = multiple_impute(d, 2, 5);
    CHECK(set.completed[0] == d);
    CHECK(set.completed[1] == d);
  }

  SUBCASE("m=1 is rejected") {
    const Dataset d = build_dataset(schema, {{"r1", "i1", "A", "70", "1", "1", "0"}});
    CHECK_THROWS_WITH_AS(multiple_impute(d, 1, 5),
                         doctest::Contains("TooFewImputations"), Error);
  }

  std::vector<std::vector<std::string>> rows;
  Rng rng(90);
  for (int iw = 0; iw < 12; ++iw) {
    const std::string country = iw % 2 ? "A" : "B";
    const bool e_missing = rng.bernoulli(0.3);
    const std::string e = e_missing ? "NA" : std::to_string(10 * (iw % 11));
    const std::string female = rng.bernoulli(0.5) ? "1" : "0";
    for (int j = 0; j < 8; ++j) {
      rows.push_back({"r" + std::to_string(iw) + "_" + std::to_string(j),
                      "i" + std::to_string(iw), country, e, female,
                      rng.bernoulli(0.25) ? "NA" : (rng.bernoulli(0.6) ? "1" : "0"),
                      rng.bernoulli(0.5) ? "1" : "0"});
    }
  }
  const Dataset d = build_dataset(schema, rows);

  SUBCASE("observed cells are immutable, imputed cells vary across m") {
    const ImputationSet set = multiple_impute(d, 5, 31);
    REQUIRE(set.completed.size() == 5);
    bool any_difference = false;
    for (const Dataset& completed : set.completed) {
      REQUIRE(completed.nrow() == d.nrow());
      for (int c = 0; c < d.ncol(); ++c) {
        CHECK(completed.missing_count(c) == 0);
        for (std::int64_t r = 0; r < d.nrow(); ++r) {
          if (d.observed(c, r)) {
            CHECK(completed.token(c, r) == d.token(c, r));
          }
        }
      }
    }
    const int e = d.require_column("e");
    const int x = d.require_column("x");
    for (std::int64_t r = 0; r < d.nrow(); ++r) {
      for (int c : {e, x}) {
        if (d.observed(c, r)) continue;
        for (int m = 1; m < 5; ++m) {
          if (set.completed[m].value(c, r) != set.completed[0].value(c, r)) {
            any_difference = true;
          }
        }
      }
    }
    CHECK(any_difference);
  }

  SUBCASE("interviewer variables stay constant within each imputation") {
    const ImputationSet set = multiple_impute(d, 3, 77);
    const int iw = d.require_column("iw");
    const int e = d.require_column("e");
    for (const Dataset& completed : set.completed) {
      std::map<std::string, double> seen;
      for (std::int64_t r = 0; r < completed.nrow(); ++r) {
        const std::string id = completed.token(iw, r);
        const double value = completed.value(e, r);
        auto it = seen.find(id);
        if (it == seen.end()) {
          seen[id] = value;
        } else {
          CHECK(it->second == value);
        }
      }
    }
  }

  SUBCASE("determinism: same inputs give byte-identical saved sets") {
    const ImputationSet a = multiple_impute(d, 3, 123);
    const ImputationSet b = multiple_impute(d, 3, 123);
    testsup::TempDir da, db;
    save_imputation_set(a, da.str());
    save_imputation_set(b, db.str());
    CHECK(testsup::dir_contents(da.str()) == testsup::dir_contents(db.str()));
  }
}

TEST_CASE("rubin_pool arithmetic") {
  SUBCASE("no between-imputation variance") {
    const PooledEstimate p = rubin_pool({2, 2, 2}, {0.1, 0.1, 0.1});
    CHECK(p.qbar == doctest::Approx(2.0));
    CHECK(p.b == doctest::Approx(0.0));
    CHECK(p.t == doctest::Approx(0.1));
    CHECK(p.fmi == doctest::Approx(0.0));
    CHECK(std::isinf(p.df));
  }

  SUBCASE("hand-evaluated Rubin formulas") {
    const PooledEstimate p = rubin_pool({1, 2, 3}, {0.1, 0.1, 0.1});
    CHECK(p.qbar == doctest::Approx(2.0));
    CHECK(p.ubar == doctest::Approx(0.1));
    CHECK(p.b == doctest::Approx(1.0));
    CHECK(std::abs(p.t - 1.43333) < 1e-5);
    CHECK(std::abs(p.fmi - 0.93023) < 1e-5);
    CHECK(p.df == doctest::Approx(2.0 * std::pow(1.0 + 0.1 / (4.0 / 3.0), 2)));
  }

  SUBCASE("M=1 fails") {
    CHECK_THROWS_WITH_AS(rubin_pool({1.0}, {0.1}),
                         doctest::Contains("TooFewImputations"), Error);
  }

  SUBCASE("pooling identical pairs is the identity with fmi 0") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      const double e = rng.normal();
      const double v = std::abs(rng.normal()) + 0.01;
      const PooledEstimate p = rubin_pool({e, e, e, e}, {v, v, v, v});
      CHECK(p.qbar == doctest::Approx(e));
      CHECK(p.t == doctest::Approx(v));
      CHECK(p.fmi == 0.0);
    }
  }
}

TEST_CASE("choose_m rule of thumb") {
  CHECK(choose_m(0.85) == 85);
  CHECK(choose_m(0.0) == 2);
  CHECK(choose_m(1.0) == 100);
  CHECK(choose_m(0.851) == 86);
  CHECK(choose_m(0.005) == 2);
  CHECK_THROWS_AS(choose_m(1.5), Error);
}

TEST_CASE("fcs distributional sanity on an MCAR continuous column") {
  // x depends on z; 30% of x are MCAR; imputed draws should center on the
  // observed mean
  Schema schema = Schema::from_json_text(R"({
    "columns": [
      {"name": "z", "kind": "continuous"},
      {"name": "x", "kind": "continuous", "group": "capi", "model": "pmm"},
      {"name": "y", "kind": "binary", "role": "outcome"}
    ]
  })");
  Rng rng(2718);
  Dataset d(schema);
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    d.append_row();
    const double z = rng.normal(0.0, 1.0);
    const double x = 10.0 + 1.6 * z + rng.normal(0.0, 1.0);
    d.set_value(0, i, z);
    d.set_value(1, i, x);
    d.set_value(2, i, rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  double observed_sum = 0.0;
  double observed_sq = 0.0;
  std::int64_t observed_n = 0;
  std::int64_t missing_n = 0;
  Rng mask_rng(515);
  for (int i = 0; i < n; ++i) {
    if (mask_rng.bernoulli(0.3)) {
      d.set_missing(1, i);
      ++missing_n;
    } else {
      observed_sum += d.value(1, i);
      observed_sq += d.value(1, i) * d.value(1, i);
      ++observed_n;
    }
  }
  const double observed_mean = observed_sum / observed_n;
  const double observed_sd = std::sqrt(
      (observed_sq - observed_n * observed_mean * observed_mean) / (observed_n - 1));

  const ImputationSet set = multiple_impute(d, 50, 31415);
  double imputed_sum = 0.0;
  std::int64_t imputed_count = 0;
  for (const Dataset& completed : set.completed) {
    for (int i = 0; i < n; ++i) {
      if (!d.observed(1, i)) {
        imputed_sum += completed.value(1, i);
        ++imputed_count;
      }
    }
  }
  const double imputed_mean = imputed_sum / imputed_count;
  const double se = observed_sd / std::sqrt(static_cast<double>(missing_n));
  CHECK(std::abs(imputed_mean - observed_mean) < 4.0 * se);
}

TEST_CASE("marginal_fill draws only observed values and fills everything") {
  const Schema schema = respondent_schema();
  std::vector<std::vector<std::string>> rows;
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    rows.push_back({"r" + std::to_string(i), "i1", "A",
                    rng.bernoulli(0.4) ? "NA" : std::to_string(10 * (i % 10)),
                    "1", rng.bernoulli(0.4) ? "NA" : "1",
                    rng.bernoulli(0.5) ? "1" : "0"});
  }
  const Dataset d = build_dataset(schema, rows);
  const Dataset filled = marginal_fill(d, 17);
  std::set<double> observed_e;
  const int e = d.require_column("e");
  for (std::int64_t r = 0; r < d.nrow(); ++r) {
    if (d.observed(e, r)) observed_e.insert(d.value(e, r));
  }
  for (int c = 0; c < filled.ncol(); ++c) {
    CHECK(filled.missing_count(c) == 0);
  }
  for (std::int64_t r = 0; r < d.nrow(); ++r) {
    if (!d.observed(e, r)) {
      CHECK(observed_e.count(filled.value(e, r)) == 1);
    }
  }
  CHECK(marginal_fill(d, 17) == filled);
}
