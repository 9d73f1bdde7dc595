#include "blocklogit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "blocklogit/errors.hpp"
#include "blocklogit/logit.hpp"
#include "blocklogit/patterns.hpp"

namespace blocklogit {

namespace {

const char* kCountryOrder[] = {"ES", "IT", "GR", "PT", "PL", "SI",
                               "AT", "DE", "BE", "LU", "SE", "EE"};
const char* kItemOrder[] = {"thinc2", "ypen1", "bacc", "home"};

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> ordered_countries(const std::vector<AmeEntry>& entries) {
  std::set<std::string> present;
  for (const auto& e : entries) present.insert(e.country);
  std::vector<std::string> out;
  for (const char* c : kCountryOrder) {
    if (present.erase(c)) out.push_back(c);
  }
  out.insert(out.end(), present.begin(), present.end());  // set: alphabetical
  return out;
}

std::vector<std::string> ordered_items(const std::vector<AmeEntry>& entries) {
  std::vector<std::string> seen;
  for (const auto& e : entries) {
    if (std::find(seen.begin(), seen.end(), e.item) == seen.end()) {
      seen.push_back(e.item);
    }
  }
  std::vector<std::string> out;
  for (const char* i : kItemOrder) {
    auto it = std::find(seen.begin(), seen.end(), i);
    if (it != seen.end()) {
      out.push_back(*it);
      seen.erase(it);
    }
  }
  out.insert(out.end(), seen.begin(), seen.end());
  return out;
}

std::string format_estimate_cell(double estimate, int stars) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f%s", estimate, star_string(stars));
  return buf;
}

std::string format_se_cell(double se) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "(%.3f)", se);
  return buf;
}

std::string format_ame_table(const std::vector<AmeEntry>& entries,
                             const std::string& caption_method) {
  const auto countries = ordered_countries(entries);
  const auto items = ordered_items(entries);

  std::map<std::pair<std::string, std::string>, const AmeEntry*> cell;
  for (const auto& e : entries) {
    cell[{e.country, e.item}] = &e;
  }

  constexpr int kCountryWidth = 8;
  constexpr int kCellWidth = 12;
  std::ostringstream out;
  out << "Average marginal effects of the focus indicator, " << caption_method
      << " estimates\n\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-*s", kCountryWidth, "Country");
  out << buf;
  for (const auto& item : items) {
    std::snprintf(buf, sizeof(buf), "%*s", kCellWidth, item.c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& country : countries) {
    std::snprintf(buf, sizeof(buf), "%-*s", kCountryWidth, country.c_str());
    out << buf;
    for (const auto& item : items) {
      auto it = cell.find({country, item});
      const std::string text =
          it == cell.end() ? ""
                           : format_estimate_cell(it->second->estimate,
                                                  it->second->stars);
      std::snprintf(buf, sizeof(buf), "%*s", kCellWidth, text.c_str());
      out << buf;
    }
    out << '\n';
    std::snprintf(buf, sizeof(buf), "%-*s", kCountryWidth, "");
    out << buf;
    for (const auto& item : items) {
      auto it = cell.find({country, item});
      const std::string text =
          it == cell.end() ? "" : format_se_cell(it->second->se);
      std::snprintf(buf, sizeof(buf), "%*s", kCellWidth, text.c_str());
      out << buf;
    }
    out << '\n';
  }
  out << "\nSignificance: ** p<0.01, * p<0.05 (two-sided)\n";
  return out.str();
}

void write_ame_csv(const std::vector<AmeEntry>& entries, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_validation("tabular/WriteError", "cannot write " + path);
  out << "country,item,estimate,se,stars,z,p\n";
  for (const auto& e : entries) {
    out << e.country << ',' << e.item << ',' << format_full(e.estimate) << ','
        << format_full(e.se) << ',' << e.stars << ',' << format_full(e.z)
        << ',' << format_full(e.p) << '\n';
  }
}

std::vector<AmeEntry> read_ame_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_validation("tabular/FileNotFound", "cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<AmeEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    AmeEntry e;
    std::string field;
    std::getline(ss, e.country, ',');
    std::getline(ss, e.item, ',');
    std::getline(ss, field, ',');
    e.estimate = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    e.se = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    e.stars = static_cast<int>(std::strtol(field.c_str(), nullptr, 10));
    std::getline(ss, field, ',');
    e.z = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    e.p = std::strtod(field.c_str(), nullptr);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<HistogramRow> emit_histogram(
    const std::vector<std::optional<double>>& values,
    const std::vector<std::string>& country, double bin_width,
    std::vector<std::string>* warnings) {
  if (values.size() != country.size()) {
    fail_validation("report/LengthMismatch",
                    "values and country vectors differ in length");
  }
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    fail_validation("report/InvalidBinWidth",
                    "bin width must be positive and finite");
  }

  std::vector<std::string> order;
  std::map<std::string, std::map<std::int64_t, std::int64_t>> counts;
  std::map<std::string, bool> any;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!any.count(country[i])) {
      order.push_back(country[i]);
      any[country[i]] = false;
    }
    if (!values[i]) continue;
    const double v = *values[i];
    if (v < 0.0 || v > 100.0) {
      fail_validation("report/TypeViolation",
                      "expectation value outside [0,100]");
    }
    const auto bin = static_cast<std::int64_t>(std::floor(v / bin_width));
    ++counts[country[i]][bin];
    any[country[i]] = true;
  }

  std::vector<HistogramRow> rows;
  for (const auto& c : order) {
    if (!any[c]) {
      if (warnings) {
        warnings->push_back("country '" + c + "' has no observed values; omitted");
      }
      continue;
    }
    for (const auto& [bin, count] : counts[c]) {
      HistogramRow row;
      row.country = c;
      row.bin_lo = static_cast<double>(bin) * bin_width;
      row.bin_hi = row.bin_lo + bin_width;
      row.count = count;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<HistogramRow> emit_histogram(const Dataset& dataset, double bin_width,
                                         std::vector<std::string>* warnings) {
  const int exp_col = dataset.require_role(ColumnRole::Expectation);
  const int iw_col = dataset.require_role(ColumnRole::InterviewerId);
  const int cc_col = dataset.require_role(ColumnRole::CountryId);

  // one value per interviewer
  std::set<std::string> seen;
  std::vector<std::optional<double>> values;
  std::vector<std::string> country;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    const std::string iw = dataset.token(iw_col, r);
    if (!seen.insert(iw).second) continue;
    values.push_back(dataset.cell(exp_col, r));
    country.push_back(dataset.token(cc_col, r));
  }
  return emit_histogram(values, country, bin_width, warnings);
}

void write_histogram_csv(const std::vector<HistogramRow>& rows,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_validation("tabular/WriteError", "cannot write " + path);
  out << "country,bin_lo,bin_hi,count\n";
  for (const auto& r : rows) {
    out << r.country << ',' << format_full(r.bin_lo) << ','
        << format_full(r.bin_hi) << ',' << r.count << '\n';
  }
}

namespace {

ResponseRateRow rate_row(const Dataset& d, const std::string& scope,
                         const std::string& item) {
  ResponseRateRow row;
  row.scope = scope;
  row.item = item;
  const int col = d.require_column(item);
  for (std::int64_t r = 0; r < d.nrow(); ++r) {
    if (!d.observed(col, r)) continue;
    ++row.eligible;
    if (d.value(col, r) == 1.0) ++row.ones;
  }
  row.rate = row.eligible > 0
                 ? static_cast<double>(row.ones) / static_cast<double>(row.eligible)
                 : 0.0;
  return row;
}

}  // namespace

std::vector<ResponseRateRow> response_rate_rows(const Dataset& dataset,
                                                const std::vector<std::string>& items,
                                                bool by_country) {
  std::vector<ResponseRateRow> rows;
  for (const auto& item : items) {
    rows.push_back(rate_row(dataset, "ALL", item));
  }
  if (by_country) {
    for (const auto& [country, part] : country_split(dataset)) {
      for (const auto& item : items) {
        rows.push_back(rate_row(part, country, item));
      }
    }
  }
  return rows;
}

void write_response_rates_csv(const std::vector<ResponseRateRow>& rows,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_validation("tabular/WriteError", "cannot write " + path);
  out << "scope,item,eligible,ones,rate\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%lld,%lld,%.3f\n", r.scope.c_str(),
                  r.item.c_str(), static_cast<long long>(r.eligible),
                  static_cast<long long>(r.ones), r.rate);
    out << buf;
  }
}

std::vector<ParticipationRow> interviewer_participation(const Dataset& dataset) {
  const int iw_col = dataset.require_role(ColumnRole::InterviewerId);
  const int cc_col = dataset.require_role(ColumnRole::CountryId);
  std::vector<int> iws_cols;
  for (int c = 0; c < dataset.ncol(); ++c) {
    if (dataset.spec(c).group == VarGroup::Iws) iws_cols.push_back(c);
  }
  if (iws_cols.empty()) {
    fail_validation("report/MissingColumn", "no iws-group columns declared");
  }

  std::vector<std::string> country_order;
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> tallies;
  std::set<std::string> seen;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (!seen.insert(dataset.token(iw_col, r)).second) continue;
    const std::string country = dataset.token(cc_col, r);
    if (!tallies.count(country)) country_order.push_back(country);
    bool complete = true;
    for (int c : iws_cols) complete = complete && dataset.observed(c, r);
    auto& [total, participating] = tallies[country];
    ++total;
    if (complete) ++participating;
  }

  std::vector<ParticipationRow> rows;
  std::int64_t all_total = 0;
  std::int64_t all_part = 0;
  for (const auto& country : country_order) {
    const auto [total, participating] = tallies[country];
    rows.push_back({country, total, participating,
                    static_cast<double>(participating) / total});
    all_total += total;
    all_part += participating;
  }
  rows.push_back({"Total", all_total, all_part,
                  all_total > 0 ? static_cast<double>(all_part) / all_total : 0.0});
  return rows;
}

void write_participation_csv(const std::vector<ParticipationRow>& rows,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_validation("tabular/WriteError", "cannot write " + path);
  out << "country,interviewers,participating,rate\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%lld,%lld,%.3f\n", r.country.c_str(),
                  static_cast<long long>(r.interviewers),
                  static_cast<long long>(r.participating), r.rate);
    out << buf;
  }
}

std::string format_participation_table(const std::vector<ParticipationRow>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %8s %8s %8s\n", "Country", "Total",
                "Obs.", "PR");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-8s %8lld %8lld %8.3f\n",
                  r.country.c_str(), static_cast<long long>(r.interviewers),
                  static_cast<long long>(r.participating), r.rate);
    out << buf;
  }
  return out.str();
}

std::string format_response_rate_table(const std::vector<ResponseRateRow>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8s %-12s %10s %10s %8s\n", "Scope", "Item",
                "Eligible", "Ones", "Rate");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-8s %-12s %10lld %10lld %8.3f\n",
                  r.scope.c_str(), r.item.c_str(),
                  static_cast<long long>(r.eligible),
                  static_cast<long long>(r.ones), r.rate);
    out << buf;
  }
  return out.str();
}

}  // namespace blocklogit
