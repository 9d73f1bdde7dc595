#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blocklogit/dataset.hpp"

namespace blocklogit {

struct AmeEntry {
  std::string country;
  std::string item;
  double estimate = 0.0;
  double se = 0.0;
  int stars = 0;
  double z = 0.0;
  double p = 1.0;
};

// Country rows in the source table order (ES..EE), extra countries appended
// alphabetically; item columns thinc2, ypen1, bacc, home first, extras in
// first-appearance order.
std::vector<std::string> ordered_countries(const std::vector<AmeEntry>& entries);
std::vector<std::string> ordered_items(const std::vector<AmeEntry>& entries);

std::string format_estimate_cell(double estimate, int stars);  // "0.101**"
std::string format_se_cell(double se);                         // "(0.017)"

// Fixed-layout text table: estimate row with stars, standard errors in
// parentheses beneath, thresholds footnoted.
std::string format_ame_table(const std::vector<AmeEntry>& entries,
                             const std::string& caption_method);

void write_ame_csv(const std::vector<AmeEntry>& entries, const std::string& path);
std::vector<AmeEntry> read_ame_csv(const std::string& path);

struct HistogramRow {
  std::string country;
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  std::int64_t count = 0;
};

// Left-closed bins [k*w, (k+1)*w); counts sum to the non-missing N of each
// country; countries without any value are omitted with a warning.
std::vector<HistogramRow> emit_histogram(
    const std::vector<std::optional<double>>& values,
    const std::vector<std::string>& country, double bin_width,
    std::vector<std::string>* warnings = nullptr);

// Interviewer-level histogram of the expectation column.
std::vector<HistogramRow> emit_histogram(const Dataset& dataset, double bin_width,
                                         std::vector<std::string>* warnings = nullptr);

void write_histogram_csv(const std::vector<HistogramRow>& rows,
                         const std::string& path);

struct ResponseRateRow {
  std::string scope;  // "ALL" or a country code
  std::string item;
  std::int64_t eligible = 0;
  std::int64_t ones = 0;
  double rate = 0.0;
};

// Interviewer-survey participation by country: an interviewer participates
// when every iws-group column is observed. A Total row closes the table.
struct ParticipationRow {
  std::string country;
  std::int64_t interviewers = 0;
  std::int64_t participating = 0;
  double rate = 0.0;
};

std::vector<ParticipationRow> interviewer_participation(const Dataset& dataset);
void write_participation_csv(const std::vector<ParticipationRow>& rows,
                             const std::string& path);
std::string format_participation_table(const std::vector<ParticipationRow>& rows);

std::vector<ResponseRateRow> response_rate_rows(const Dataset& dataset,
                                                const std::vector<std::string>& items,
                                                bool by_country);
void write_response_rates_csv(const std::vector<ResponseRateRow>& rows,
                              const std::string& path);
std::string format_response_rate_table(const std::vector<ResponseRateRow>& rows);

}  // namespace blocklogit
