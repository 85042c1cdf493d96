#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "desgraph/types.hpp"

namespace desgraph {

/// A table cell. monostate is a missing value.
using Value = std::variant<std::monostate, std::string, double>;

inline bool is_missing(const Value& v) { return std::holds_alternative<std::monostate>(v); }
std::string value_to_string(const Value& v);

struct Column {
  std::string name;
  std::optional<Role> role;  // ingested columns may carry no role
  std::size_t level_count = 0;
  ValueType type = ValueType::Text;
  std::vector<Value> values;
  /// False for record columns that hold only the "o" placeholder.
  bool filled = true;

  friend bool operator==(const Column&, const Column&) = default;
};

/// The served rectangular design. Immutable once built.
class DesignTable {
 public:
  DesignTable() = default;
  DesignTable(std::string title, std::vector<Column> columns);

  const std::string& title() const { return title_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().values.size(); }
  std::size_t cols() const { return columns_.size(); }

  bool has_column(std::string_view name) const;
  /// Throws UnknownColumn.
  const Column& column(std::string_view name) const;
  /// Cell rendered as text; placeholder record cells render as "o".
  std::string cell_text(std::size_t row, std::size_t col) const;

  /// Copy with one column replaced by filled values.
  DesignTable with_column_values(std::string_view name, std::vector<Value> values,
                                 ValueType type) const;

  friend bool operator==(const DesignTable&, const DesignTable&) = default;

 private:
  std::string title_;
  std::vector<Column> columns_;
};

/// "1k", "~2k", "12M"; counts below 1000 print unchanged.
std::string si_count(std::size_t count);

struct RenderOptions {
  std::size_t max_rows = 6;
  std::string banner = "An edibble";
};

std::string render_table(const DesignTable& table, const RenderOptions& options = {});

// CSV (RFC 4180).

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvData parse_csv(std::string_view text);
CsvData read_csv_file(const std::string& path);
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
/// Header row of names followed by every row; missing and placeholder cells
/// are empty fields.
std::string table_to_csv(const DesignTable& table);

}  // namespace desgraph
