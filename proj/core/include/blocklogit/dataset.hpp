#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blocklogit {

enum class ColumnKind { Binary, Continuous, Categorical, Id };

enum class ColumnRole {
  None,
  RowId,          // unique respondent key, duplicates rejected at load
  Outcome,        // binary response indicator Y_j, one per financial item
  Focus,          // binary focus regressor used as-is
  Expectation,    // 0-100 expected response rate; focus derived by median split
  Control,
  InterviewerId,
  CountryId,
};

// Covariate-group membership: the two missingness sources. Regressor columns
// must belong to Iws or Capi; Roster marks always-observed interviewer
// attributes used for hot-deck donor matching.
enum class VarGroup { None, Iws, Capi, Roster };

enum class ImputeModel { Default, LogisticDraw, Pmm };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  ColumnRole role = ColumnRole::None;
  VarGroup group = VarGroup::None;
  ImputeModel model = ImputeModel::Default;
};

const char* to_string(ColumnKind k);
const char* to_string(ColumnRole r);
const char* to_string(VarGroup g);
const char* to_string(ImputeModel m);

struct Schema {
  std::vector<ColumnSpec> columns;
  std::string na_token = "NA";

  static Schema from_json_file(const std::string& path);
  static Schema from_json_text(const std::string& text);
  std::string to_json_text() const;
  void to_json_file(const std::string& path) const;

  const ColumnSpec* find(const std::string& name) const;
  std::vector<std::string> group_columns(VarGroup g) const;
  std::vector<std::string> role_columns(ColumnRole r) const;

  // Roles must name declared columns; outcome/focus columns must be binary;
  // regressor columns (focus/expectation/control) must carry an Iws or Capi
  // group so the two-source patterns cover them.
  void validate() const;
};

// Rectangular typed table with a per-cell missingness mask. Immutable in the
// pipelines after construction; transforms return new datasets. Id and
// categorical cells are stored as codes into a per-column label table, binary
// and continuous cells as plain doubles. Row ids are assigned by file order
// and preserved through subsetting so partitions can be checked.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema, std::int64_t nrows = 0);

  static Dataset load_csv(const std::string& path, const Schema& schema);
  void save_csv(const std::string& path) const;

  const Schema& schema() const { return schema_; }
  std::int64_t nrow() const { return nrow_; }
  int ncol() const { return static_cast<int>(columns_.size()); }

  int column_index(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;
  const ColumnSpec& spec(int col) const { return schema_.columns[col]; }

  bool observed(int col, std::int64_t row) const {
    return columns_[col].observed[row] != 0;
  }
  double value(int col, std::int64_t row) const {
    return columns_[col].values[row];
  }
  std::optional<double> cell(int col, std::int64_t row) const {
    if (!observed(col, row)) return std::nullopt;
    return value(col, row);
  }

  void set_value(int col, std::int64_t row, double v);
  void set_missing(int col, std::int64_t row);

  // Label handling for id/categorical columns.
  const std::string& label(int col, double code) const;
  double intern_label(int col, const std::string& token);
  void set_token(int col, std::int64_t row, const std::string& token);
  std::string token(int col, std::int64_t row) const;  // formatted cell text

  const std::vector<std::int64_t>& row_ids() const { return row_ids_; }
  void set_row_ids(std::vector<std::int64_t> ids);

  int role_column(ColumnRole role) const;     // -1 when unbound
  int require_role(ColumnRole role) const;
  std::vector<int> outcome_columns() const;

  Dataset subset(const std::vector<std::int64_t>& row_positions) const;
  void append_row();

  std::int64_t missing_count(int col) const;

  bool operator==(const Dataset& other) const;

 private:
  struct Column {
    std::vector<double> values;
    std::vector<char> observed;
    std::vector<std::string> labels;  // id/categorical only
  };

  void check_cell_kind(int col, double v) const;

  Schema schema_;
  std::vector<Column> columns_;
  std::vector<std::int64_t> row_ids_;
  std::int64_t nrow_ = 0;
};

// Share of ones among eligible (non-masked) rows of a binary indicator.
double response_rate(const Dataset& dataset, const std::string& item);

// Partition by country in first-occurrence order; empty countries cannot
// occur since rows carry their own country. Row ids are preserved.
std::vector<std::pair<std::string, Dataset>> country_split(const Dataset& dataset);

}  // namespace blocklogit
