#include "blocklogit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "blocklogit/errors.hpp"

namespace blocklogit {

using nlohmann::json;

const char* to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::Binary: return "binary";
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Id: return "id";
  }
  return "?";
}

const char* to_string(ColumnRole r) {
  switch (r) {
    case ColumnRole::None: return "none";
    case ColumnRole::RowId: return "row-id";
    case ColumnRole::Outcome: return "outcome";
    case ColumnRole::Focus: return "focus";
    case ColumnRole::Expectation: return "expectation";
    case ColumnRole::Control: return "control";
    case ColumnRole::InterviewerId: return "interviewer-id";
    case ColumnRole::CountryId: return "country-id";
  }
  return "?";
}

const char* to_string(VarGroup g) {
  switch (g) {
    case VarGroup::None: return "none";
    case VarGroup::Iws: return "iws";
    case VarGroup::Capi: return "capi";
    case VarGroup::Roster: return "roster";
  }
  return "?";
}

const char* to_string(ImputeModel m) {
  switch (m) {
    case ImputeModel::Default: return "default";
    case ImputeModel::LogisticDraw: return "logistic";
    case ImputeModel::Pmm: return "pmm";
  }
  return "?";
}

namespace {

template <typename Enum>
Enum parse_enum(const std::string& text, const std::string& what,
                std::initializer_list<std::pair<const char*, Enum>> table) {
  for (const auto& [name, v] : table) {
    if (text == name) return v;
  }
  fail_validation("tabular/SchemaError", "unknown " + what + " '" + text + "'");
}

ColumnKind parse_kind(const std::string& s) {
  return parse_enum<ColumnKind>(s, "column kind",
                                {{"binary", ColumnKind::Binary},
                                 {"continuous", ColumnKind::Continuous},
                                 {"categorical", ColumnKind::Categorical},
                                 {"id", ColumnKind::Id}});
}

ColumnRole parse_role(const std::string& s) {
  return parse_enum<ColumnRole>(s, "column role",
                                {{"none", ColumnRole::None},
                                 {"row-id", ColumnRole::RowId},
                                 {"outcome", ColumnRole::Outcome},
                                 {"focus", ColumnRole::Focus},
                                 {"expectation", ColumnRole::Expectation},
                                 {"control", ColumnRole::Control},
                                 {"interviewer-id", ColumnRole::InterviewerId},
                                 {"country-id", ColumnRole::CountryId}});
}

VarGroup parse_group(const std::string& s) {
  return parse_enum<VarGroup>(s, "covariate group",
                              {{"none", VarGroup::None},
                               {"iws", VarGroup::Iws},
                               {"capi", VarGroup::Capi},
                               {"roster", VarGroup::Roster}});
}

ImputeModel parse_model(const std::string& s) {
  return parse_enum<ImputeModel>(s, "imputation model",
                                 {{"default", ImputeModel::Default},
                                  {"logistic", ImputeModel::LogisticDraw},
                                  {"pmm", ImputeModel::Pmm}});
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n") != std::string::npos;
}

std::string csv_quote(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line,
                                        const std::string& where) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) {
    fail_validation("tabular/ParseError", "unterminated quote in " + where);
  }
  fields.push_back(field);
  return fields;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Schema Schema::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail_validation("tabular/SchemaError", std::string("bad schema JSON: ") + e.what());
  }
  Schema schema;
  schema.na_token = j.value("na_token", std::string("NA"));
  if (!j.contains("columns") || !j["columns"].is_array()) {
    fail_validation("tabular/SchemaError", "schema needs a 'columns' array");
  }
  for (const auto& jc : j["columns"]) {
    ColumnSpec spec;
    if (!jc.contains("name")) {
      fail_validation("tabular/SchemaError", "column entry without 'name'");
    }
    spec.name = jc["name"].get<std::string>();
    spec.kind = parse_kind(jc.value("kind", std::string("continuous")));
    spec.role = parse_role(jc.value("role", std::string("none")));
    spec.group = parse_group(jc.value("group", std::string("none")));
    spec.model = parse_model(jc.value("model", std::string("default")));
    schema.columns.push_back(std::move(spec));
  }
  schema.validate();
  return schema;
}

Schema Schema::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail_validation("tabular/FileNotFound", "cannot open schema file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Schema::to_json_text() const {
  json j;
  j["na_token"] = na_token;
  j["columns"] = json::array();
  for (const auto& c : columns) {
    json jc;
    jc["name"] = c.name;
    jc["kind"] = to_string(c.kind);
    if (c.role != ColumnRole::None) jc["role"] = to_string(c.role);
    if (c.group != VarGroup::None) jc["group"] = to_string(c.group);
    if (c.model != ImputeModel::Default) jc["model"] = to_string(c.model);
    j["columns"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

void Schema::to_json_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    fail_validation("tabular/WriteError", "cannot write schema file " + path);
  }
  out << to_json_text();
}

const ColumnSpec* Schema::find(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> Schema::group_columns(VarGroup g) const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.group == g) out.push_back(c.name);
  }
  return out;
}

std::vector<std::string> Schema::role_columns(ColumnRole r) const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.role == r) out.push_back(c.name);
  }
  return out;
}

void Schema::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns) {
    if (!seen.insert(c.name).second) {
      fail_validation("tabular/DuplicateId", "duplicate column name '" + c.name + "'");
    }
    const bool unique_role = c.role == ColumnRole::RowId ||
                             c.role == ColumnRole::Focus ||
                             c.role == ColumnRole::Expectation ||
                             c.role == ColumnRole::InterviewerId ||
                             c.role == ColumnRole::CountryId;
    if (unique_role) {
      for (const auto& other : columns) {
        if (&other != &c && other.role == c.role) {
          fail_validation("tabular/SchemaError",
                          std::string("role '") + to_string(c.role) +
                              "' bound to more than one column");
        }
      }
    }
    if (c.role == ColumnRole::Outcome && c.kind != ColumnKind::Binary) {
      fail_validation("tabular/SchemaError",
                      "outcome column '" + c.name + "' must be binary");
    }
    if (c.role == ColumnRole::Focus && c.kind != ColumnKind::Binary) {
      fail_validation("tabular/SchemaError",
                      "focus column '" + c.name + "' must be binary");
    }
    if (c.role == ColumnRole::Expectation && c.kind != ColumnKind::Continuous) {
      fail_validation("tabular/SchemaError",
                      "expectation column '" + c.name + "' must be continuous");
    }
    const bool regressor = c.role == ColumnRole::Focus ||
                           c.role == ColumnRole::Expectation ||
                           c.role == ColumnRole::Control;
    if (regressor && c.group != VarGroup::Iws && c.group != VarGroup::Capi) {
      fail_validation("tabular/SchemaError",
                      "regressor column '" + c.name +
                          "' must belong to covariate group iws or capi");
    }
    const bool id_role = c.role == ColumnRole::RowId ||
                         c.role == ColumnRole::InterviewerId ||
                         c.role == ColumnRole::CountryId;
    if (id_role && c.kind != ColumnKind::Id) {
      fail_validation("tabular/SchemaError",
                      "column '" + c.name + "' with role '" +
                          to_string(c.role) + "' must have kind id");
    }
  }
}

Dataset::Dataset(Schema schema, std::int64_t nrows) : schema_(std::move(schema)) {
  columns_.resize(schema_.columns.size());
  nrow_ = 0;
  for (std::int64_t i = 0; i < nrows; ++i) append_row();
}

void Dataset::append_row() {
  for (auto& col : columns_) {
    col.values.push_back(std::numeric_limits<double>::quiet_NaN());
    col.observed.push_back(0);
  }
  row_ids_.push_back(nrow_);
  ++nrow_;
}

int Dataset::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < schema_.columns.size(); ++i) {
    if (schema_.columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Dataset::require_column(const std::string& name) const {
  int idx = column_index(name);
  if (idx < 0) {
    fail_validation("tabular/MissingColumn", "no column named '" + name + "'");
  }
  return idx;
}

void Dataset::check_cell_kind(int col, double v) const {
  const ColumnSpec& spec = schema_.columns[col];
  if (spec.kind == ColumnKind::Binary && v != 0.0 && v != 1.0) {
    fail_validation("tabular/TypeViolation",
                    "binary column '" + spec.name + "' got value " + format_double(v));
  }
  if (!std::isfinite(v)) {
    fail_validation("tabular/TypeViolation",
                    "non-finite value in column '" + spec.name + "'");
  }
}

void Dataset::set_value(int col, std::int64_t row, double v) {
  check_cell_kind(col, v);
  columns_[col].values[row] = v;
  columns_[col].observed[row] = 1;
}

void Dataset::set_missing(int col, std::int64_t row) {
  columns_[col].values[row] = std::numeric_limits<double>::quiet_NaN();
  columns_[col].observed[row] = 0;
}

const std::string& Dataset::label(int col, double code) const {
  const auto& labels = columns_[col].labels;
  auto idx = static_cast<std::size_t>(code);
  if (idx >= labels.size()) {
    fail_validation("tabular/TypeViolation",
                    "label code out of range in column '" +
                        schema_.columns[col].name + "'");
  }
  return labels[idx];
}

double Dataset::intern_label(int col, const std::string& token) {
  auto& labels = columns_[col].labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == token) return static_cast<double>(i);
  }
  labels.push_back(token);
  return static_cast<double>(labels.size() - 1);
}

void Dataset::set_token(int col, std::int64_t row, const std::string& token) {
  const ColumnKind kind = schema_.columns[col].kind;
  if (kind == ColumnKind::Id || kind == ColumnKind::Categorical) {
    double code = intern_label(col, token);
    columns_[col].values[row] = code;
    columns_[col].observed[row] = 1;
    return;
  }
  char* end = nullptr;
  double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    fail_validation("tabular/TypeViolation",
                    "non-numeric value '" + token + "' in " +
                        to_string(kind) + " column '" +
                        schema_.columns[col].name + "'");
  }
  set_value(col, row, v);
}

std::string Dataset::token(int col, std::int64_t row) const {
  const ColumnKind kind = schema_.columns[col].kind;
  if (kind == ColumnKind::Id || kind == ColumnKind::Categorical) {
    return label(col, value(col, row));
  }
  if (kind == ColumnKind::Binary) {
    return value(col, row) == 1.0 ? "1" : "0";
  }
  return format_double(value(col, row));
}

void Dataset::set_row_ids(std::vector<std::int64_t> ids) {
  if (static_cast<std::int64_t>(ids.size()) != nrow_) {
    fail_validation("tabular/SchemaError", "row id vector length mismatch");
  }
  row_ids_ = std::move(ids);
}

int Dataset::role_column(ColumnRole role) const {
  for (std::size_t i = 0; i < schema_.columns.size(); ++i) {
    if (schema_.columns[i].role == role) return static_cast<int>(i);
  }
  return -1;
}

int Dataset::require_role(ColumnRole role) const {
  int idx = role_column(role);
  if (idx < 0) {
    fail_validation("tabular/MissingColumn",
                    std::string("no column bound to role '") + to_string(role) + "'");
  }
  return idx;
}

std::vector<int> Dataset::outcome_columns() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < schema_.columns.size(); ++i) {
    if (schema_.columns[i].role == ColumnRole::Outcome) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

Dataset Dataset::subset(const std::vector<std::int64_t>& row_positions) const {
  Dataset out(schema_);
  out.columns_ = columns_;
  for (auto& col : out.columns_) {
    col.values.clear();
    col.observed.clear();
  }
  out.row_ids_.clear();
  for (std::int64_t pos : row_positions) {
    for (int c = 0; c < ncol(); ++c) {
      out.columns_[c].values.push_back(columns_[c].values[pos]);
      out.columns_[c].observed.push_back(columns_[c].observed[pos]);
    }
    out.row_ids_.push_back(row_ids_[pos]);
  }
  out.nrow_ = static_cast<std::int64_t>(row_positions.size());
  return out;
}

std::int64_t Dataset::missing_count(int col) const {
  std::int64_t n = 0;
  for (char obs : columns_[col].observed) {
    if (!obs) ++n;
  }
  return n;
}

bool Dataset::operator==(const Dataset& other) const {
  if (nrow_ != other.nrow_ || ncol() != other.ncol()) return false;
  if (row_ids_ != other.row_ids_) return false;
  for (int c = 0; c < ncol(); ++c) {
    const auto& a = schema_.columns[c];
    const auto& b = other.schema_.columns[c];
    if (a.name != b.name || a.kind != b.kind || a.role != b.role ||
        a.group != b.group) {
      return false;
    }
    for (std::int64_t r = 0; r < nrow_; ++r) {
      if (observed(c, r) != other.observed(c, r)) return false;
      if (!observed(c, r)) continue;
      if (a.kind == ColumnKind::Id || a.kind == ColumnKind::Categorical) {
        if (label(c, value(c, r)) != other.label(c, other.value(c, r))) {
          return false;
        }
      } else if (value(c, r) != other.value(c, r)) {
        return false;
      }
    }
  }
  return true;
}

Dataset Dataset::load_csv(const std::string& path, const Schema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) {
    fail_validation("tabular/FileNotFound", "cannot open data file " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    fail_validation("tabular/ParseError", "empty file " + path);
  }
  const std::vector<std::string> header = split_csv_line(line, "header of " + path);
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : header) {
      if (!seen.insert(name).second) {
        fail_validation("tabular/DuplicateId",
                        "duplicate column '" + name + "' in header of " + path);
      }
    }
  }

  // Map schema columns onto file positions; extra file columns are ignored.
  std::vector<int> file_pos(schema.columns.size(), -1);
  for (std::size_t c = 0; c < schema.columns.size(); ++c) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == schema.columns[c].name) {
        file_pos[c] = static_cast<int>(h);
        break;
      }
    }
    if (file_pos[c] < 0) {
      fail_validation("tabular/MissingColumn",
                      "file " + path + " lacks column '" + schema.columns[c].name + "'");
    }
  }

  Dataset out(schema);
  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line, path + ":" + std::to_string(line_no));
    if (fields.size() != header.size()) {
      fail_validation("tabular/ParseError",
                      path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()));
    }
    out.append_row();
    const std::int64_t row = out.nrow() - 1;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const std::string& tok = fields[file_pos[c]];
      if (tok.empty() || tok == schema.na_token) {
        out.set_missing(static_cast<int>(c), row);
      } else {
        out.set_token(static_cast<int>(c), row, tok);
      }
    }
  }

  // Id-role integrity: row ids unique, country/interviewer ids present.
  const int rid = out.role_column(ColumnRole::RowId);
  if (rid >= 0) {
    std::unordered_set<std::string> seen;
    for (std::int64_t r = 0; r < out.nrow(); ++r) {
      if (!out.observed(rid, r)) {
        fail_validation("tabular/TypeViolation", "masked row-id cell at row " +
                                                     std::to_string(r));
      }
      if (!seen.insert(out.token(rid, r)).second) {
        fail_validation("tabular/DuplicateId",
                        "duplicate row id '" + out.token(rid, r) + "'");
      }
    }
  }
  for (ColumnRole role : {ColumnRole::CountryId, ColumnRole::InterviewerId}) {
    const int idx = out.role_column(role);
    if (idx < 0) continue;
    for (std::int64_t r = 0; r < out.nrow(); ++r) {
      if (!out.observed(idx, r)) {
        fail_validation("tabular/TypeViolation",
                        std::string("masked ") + to_string(role) + " cell at row " +
                            std::to_string(r));
      }
    }
  }
  return out;
}

void Dataset::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    fail_validation("tabular/WriteError", "cannot write data file " + path);
  }
  for (int c = 0; c < ncol(); ++c) {
    if (c) out << ',';
    out << csv_quote(schema_.columns[c].name);
  }
  out << '\n';
  for (std::int64_t r = 0; r < nrow_; ++r) {
    for (int c = 0; c < ncol(); ++c) {
      if (c) out << ',';
      if (!observed(c, r)) {
        out << schema_.na_token;
      } else {
        out << csv_quote(token(c, r));
      }
    }
    out << '\n';
  }
}

double response_rate(const Dataset& dataset, const std::string& item) {
  const int col = dataset.require_column(item);
  if (dataset.spec(col).kind != ColumnKind::Binary) {
    fail_validation("tabular/TypeViolation",
                    "response_rate needs a binary indicator column, '" + item +
                        "' is " + to_string(dataset.spec(col).kind));
  }
  std::int64_t eligible = 0;
  std::int64_t ones = 0;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    if (!dataset.observed(col, r)) continue;
    ++eligible;
    if (dataset.value(col, r) == 1.0) ++ones;
  }
  if (eligible == 0) {
    fail_estimation("tabular/EmptyEligibleSet",
                    "no eligible rows for item '" + item + "'");
  }
  return static_cast<double>(ones) / static_cast<double>(eligible);
}

std::vector<std::pair<std::string, Dataset>> country_split(const Dataset& dataset) {
  const int cc = dataset.require_role(ColumnRole::CountryId);
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::int64_t>> rows;
  for (std::int64_t r = 0; r < dataset.nrow(); ++r) {
    const std::string key = dataset.token(cc, r);
    auto it = rows.find(key);
    if (it == rows.end()) {
      order.push_back(key);
      rows.emplace(key, std::vector<std::int64_t>{r});
    } else {
      it->second.push_back(r);
    }
  }
  std::vector<std::pair<std::string, Dataset>> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    out.emplace_back(key, dataset.subset(rows[key]));
  }
  return out;
}

}  // namespace blocklogit
