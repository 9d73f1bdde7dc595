#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "blocklogit/dataset.hpp"
#include "blocklogit/errors.hpp"
#include "blocklogit/rng.hpp"
#include "test_support.hpp"

using namespace blocklogit;
using testsup::TempDir;
using testsup::build_dataset;

namespace {

Schema small_schema() {
  return Schema::from_json_text(R"({
    "na_token": "NA",
    "columns": [
      {"name": "id", "kind": "id", "role": "row-id"},
      {"name": "x", "kind": "continuous"},
      {"name": "b", "kind": "binary"}
    ]
  })");
}

}  // namespace

TEST_CASE("load_csv basic masking") {
  TempDir dir;
  const Schema schema = small_schema();

  SUBCASE("no NA tokens gives an all-observed mask") {
    testsup::write_file(dir.file("d.csv"), "id,x,b\na,1.5,0\nb,2.5,1\nc,3,0\n");
    const Dataset d = Dataset::load_csv(dir.file("d.csv"), schema);
    CHECK(d.nrow() == 3);
    for (int c = 0; c < d.ncol(); ++c) {
      CHECK(d.missing_count(c) == 0);
    }
    CHECK(d.value(1, 1) == 2.5);
    CHECK(d.token(0, 2) == "c");
  }

  SUBCASE("NA masks exactly that cell") {
    testsup::write_file(dir.file("d.csv"), "id,x,b\na,NA,0\nb,2.5,1\n");
    const Dataset d = Dataset::load_csv(dir.file("d.csv"), schema);
    CHECK_FALSE(d.observed(1, 0));
    CHECK(d.observed(1, 1));
    CHECK(d.observed(0, 0));
    CHECK(d.missing_count(1) == 1);
  }

  SUBCASE("empty field also counts as missing") {
    testsup::write_file(dir.file("d.csv"), "id,x,b\na,,0\n");
    const Dataset d = Dataset::load_csv(dir.file("d.csv"), schema);
    CHECK_FALSE(d.observed(1, 0));
  }

  SUBCASE("non-numeric continuous cell is a TypeViolation") {
    testsup::write_file(dir.file("d.csv"), "id,x,b\na,abc,0\n");
    CHECK_THROWS_WITH_AS(Dataset::load_csv(dir.file("d.csv"), schema),
                         doctest::Contains("TypeViolation"), Error);
  }

  SUBCASE("binary cell outside 0/1 is a TypeViolation") {
    testsup::write_file(dir.file("d.csv"), "id,x,b\na,1.0,2\n");
    CHECK_THROWS_WITH_AS(Dataset::load_csv(dir.file("d.csv"), schema),
                         doctest::Contains("TypeViolation"), Error);
  }

  SUBCASE("missing schema column") {
    testsup::write_file(dir.file("d.csv"), "id,x\na,1.0\n");
    CHECK_THROWS_WITH_AS(Dataset::load_csv(dir.file("d.csv"), schema),
                         doctest::Contains("MissingColumn"), Error);
  }

  SUBCASE("duplicate row id") {
    testsup::write_file(dir.file("d.csv"), "id,x,b\na,1,0\na,2,1\n");
    CHECK_THROWS_WITH_AS(Dataset::load_csv(dir.file("d.csv"), schema),
                         doctest::Contains("DuplicateId"), Error);
  }

  SUBCASE("duplicate header column") {
    testsup::write_file(dir.file("d.csv"), "id,x,x,b\na,1,2,0\n");
    CHECK_THROWS_WITH_AS(Dataset::load_csv(dir.file("d.csv"), schema),
                         doctest::Contains("DuplicateId"), Error);
  }

  SUBCASE("extra file columns are ignored") {
    testsup::write_file(dir.file("d.csv"), "id,extra,x,b\na,zzz,1,0\n");
    const Dataset d = Dataset::load_csv(dir.file("d.csv"), schema);
    CHECK(d.ncol() == 3);
    CHECK(d.value(1, 0) == 1.0);
  }
}

TEST_CASE("schema validation") {
  CHECK_THROWS_WITH_AS(Schema::from_json_text(R"({
    "columns": [{"name": "y", "kind": "continuous", "role": "outcome"}]
  })"),
                       doctest::Contains("must be binary"), Error);

  CHECK_THROWS_WITH_AS(Schema::from_json_text(R"({
    "columns": [
      {"name": "f", "kind": "binary", "role": "focus"}
    ]
  })"),
                       doctest::Contains("iws or capi"), Error);

  CHECK_THROWS_WITH_AS(Schema::from_json_text(R"({
    "columns": [
      {"name": "a", "kind": "continuous"},
      {"name": "a", "kind": "continuous"}
    ]
  })"),
                       doctest::Contains("DuplicateId"), Error);
}

TEST_CASE("response_rate matches the published participation arithmetic") {
  Schema schema = Schema::from_json_text(R"({
    "columns": [{"name": "part", "kind": "binary"}]
  })");

  auto with_counts = [&](int ones, int total) {
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < total; ++i) {
      rows.push_back({i < ones ? "1" : "0"});
    }
    return build_dataset(schema, rows);
  };

  auto rounded3 = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };

  CHECK(rounded3(response_rate(with_counts(51, 70), "part")) == "0.729");
  CHECK(rounded3(response_rate(with_counts(132, 140), "part")) == "0.943");
  CHECK(rounded3(response_rate(with_counts(808, 1172), "part")) == "0.689");
  CHECK(response_rate(with_counts(0, 10), "part") == 0.0);

  SUBCASE("masked rows are not eligible") {
    auto d = with_counts(3, 10);
    d.set_missing(0, 0);
    CHECK(response_rate(d, "part") == doctest::Approx(2.0 / 9.0));
  }

  SUBCASE("all-masked column is an EmptyEligibleSet") {
    auto d = with_counts(1, 2);
    d.set_missing(0, 0);
    d.set_missing(0, 1);
    CHECK_THROWS_WITH_AS(response_rate(d, "part"),
                         doctest::Contains("EmptyEligibleSet"), Error);
  }

  SUBCASE("invariant under row permutation") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const int total = 5 + static_cast<int>(rng.uniform_int(40));
      const int ones = static_cast<int>(rng.uniform_int(total + 1));
      Dataset d = with_counts(ones, total);
      std::vector<std::int64_t> perm(total);
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = total - 1; i > 0; --i) {
        std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
      }
      CHECK(response_rate(d.subset(perm), "part") == response_rate(d, "part"));
    }
  }
}

TEST_CASE("country_split partitions rows") {
  Schema schema = Schema::from_json_text(R"({
    "columns": [
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "x", "kind": "continuous"}
    ]
  })");

  SUBCASE("three rows over two countries") {
    const Dataset d =
        build_dataset(schema, {{"A", "1"}, {"A", "2"}, {"B", "3"}});
    const auto parts = country_split(d);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].first == "A");
    CHECK(parts[0].second.nrow() == 2);
    CHECK(parts[1].first == "B");
    CHECK(parts[1].second.nrow() == 1);
  }

  SUBCASE("single country returns the identical dataset") {
    const Dataset d = build_dataset(schema, {{"A", "1"}, {"A", "2"}});
    const auto parts = country_split(d);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].second == d);
  }

  SUBCASE("sizes sum to N and row ids are disjoint") {
    Rng rng(11);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 200; ++i) {
      rows.push_back({std::string(1, static_cast<char>('A' + rng.uniform_int(7))),
                      std::to_string(i)});
    }
    const Dataset d = build_dataset(schema, rows);
    const auto parts = country_split(d);
    std::int64_t total = 0;
    std::set<std::int64_t> ids;
    for (const auto& [country, part] : parts) {
      total += part.nrow();
      for (std::int64_t id : part.row_ids()) {
        CHECK(ids.insert(id).second);
      }
    }
    CHECK(total == d.nrow());
  }
}

TEST_CASE("write-then-load round trip is exact") {
  Schema schema = Schema::from_json_text(R"({
    "na_token": "NA",
    "columns": [
      {"name": "id", "kind": "id", "role": "row-id"},
      {"name": "country", "kind": "id", "role": "country-id"},
      {"name": "cat", "kind": "categorical"},
      {"name": "x", "kind": "continuous"},
      {"name": "b", "kind": "binary"}
    ]
  })");

  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset d(schema);
    const int n = 3 + static_cast<int>(rng.uniform_int(30));
    for (int i = 0; i < n; ++i) {
      d.append_row();
      d.set_token(0, i, "row" + std::to_string(i));
      d.set_token(1, i, rng.bernoulli(0.5) ? "AT" : "DE");
      if (rng.bernoulli(0.2)) {
        d.set_missing(2, i);
      } else {
        d.set_token(2, i, rng.bernoulli(0.5) ? "low" : "a,b\"quoted\"");
      }
      if (rng.bernoulli(0.2)) {
        d.set_missing(3, i);
      } else {
        d.set_value(3, i, rng.normal(0.0, 3.7));
      }
      d.set_value(4, i, rng.bernoulli(0.4) ? 1.0 : 0.0);
    }

    TempDir dir;
    d.save_csv(dir.file("round.csv"));
    const Dataset back = Dataset::load_csv(dir.file("round.csv"), schema);
    CHECK(back == d);
  }
}
