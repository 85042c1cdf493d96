#include "desgraph/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "desgraph/error.hpp"

namespace desgraph {

std::string value_to_string(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  return {};
}

DesignTable::DesignTable(std::string title, std::vector<Column> columns)
    : title_(std::move(title)), columns_(std::move(columns)) {
  for (const auto& c : columns_) {
    if (c.values.size() != rows()) {
      throw DesignError(ErrorKind::ShapeMismatch, "column '" + c.name + "' has " +
                                                      std::to_string(c.values.size()) +
                                                      " values, expected " +
                                                      std::to_string(rows()));
    }
  }
}

bool DesignTable::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& DesignTable::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw DesignError(ErrorKind::UnknownColumn, "unknown column '" + std::string(name) + "'");
}

namespace {

/// Cell text for printing; fractional numbers are cut to four significant digits.
std::string display_text(const DesignTable& table, std::size_t row, std::size_t col) {
  const Column& c = table.columns()[col];
  if (c.filled) {
    if (const auto* d = std::get_if<double>(&c.values[row]); d && std::nearbyint(*d) != *d) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", *d);
      return buf;
    }
  }
  return table.cell_text(row, col);
}

}  // namespace

std::string DesignTable::cell_text(std::size_t row, std::size_t col) const {
  const Column& c = columns_.at(col);
  if (!c.filled) return "o";
  const Value& v = c.values.at(row);
  if (is_missing(v)) return "NA";
  return value_to_string(v);
}

DesignTable DesignTable::with_column_values(std::string_view name, std::vector<Value> values,
                                            ValueType type) const {
  DesignTable copy = *this;
  for (auto& c : copy.columns_) {
    if (c.name == name) {
      if (values.size() != rows()) {
        throw DesignError(ErrorKind::ShapeMismatch,
                          "expected " + std::to_string(rows()) + " values for '" +
                              std::string(name) + "', got " + std::to_string(values.size()));
      }
      c.values = std::move(values);
      c.type = type;
      c.filled = true;
      return copy;
    }
  }
  throw DesignError(ErrorKind::UnknownColumn, "unknown column '" + std::string(name) + "'");
}

std::string si_count(std::size_t count) {
  if (count < 1000) return std::to_string(count);
  static constexpr const char* prefixes[] = {"", "k", "M", "G", "T", "P"};
  std::size_t exponent = 0;
  double scale = 1;
  while (exponent + 1 < std::size(prefixes) && static_cast<double>(count) >= scale * 1000) {
    scale *= 1000;
    ++exponent;
  }
  auto rounded = static_cast<long long>(std::llround(static_cast<double>(count) / scale));
  if (rounded >= 1000 && exponent + 1 < std::size(prefixes)) {
    scale *= 1000;
    ++exponent;
    rounded = std::llround(static_cast<double>(count) / scale);
  }
  const bool exact = static_cast<double>(rounded) * scale == static_cast<double>(count);
  return (exact ? "" : "~") + std::to_string(rounded) + prefixes[exponent];
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string rtrim(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

std::string render_table(const DesignTable& table, const RenderOptions& options) {
  std::ostringstream out;
  if (!table.title().empty()) out << "# " << table.title() << "\n";
  out << "# " << options.banner << ": " << table.rows() << " x " << table.cols() << "\n";
  if (table.cols() == 0) return out.str();

  const std::size_t shown = std::min(table.rows(), options.max_rows);
  const std::size_t index_width = std::to_string(std::max<std::size_t>(shown, 1)).size();

  std::vector<std::string> names, roles, types;
  std::vector<std::vector<std::string>> cells(shown);
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    const Column& col = table.columns()[c];
    names.push_back(col.name);
    roles.push_back(col.role ? std::string("<") + role_letter(*col.role) + "(" +
                                   si_count(col.level_count) + ")>"
                             : std::string());
    types.emplace_back(type_tag(col.type));
    std::size_t w = std::max({names.back().size(), roles.back().size(), types.back().size()});
    for (std::size_t r = 0; r < shown; ++r) {
      cells[r].push_back(display_text(table, r, c));
      w = std::max(w, cells[r].back().size());
    }
    widths.push_back(w);
  }

  auto line = [&](const std::string& index, const std::vector<std::string>& fields) {
    std::string s = pad_left(index, index_width);
    for (std::size_t c = 0; c < fields.size(); ++c) s += " " + pad_left(fields[c], widths[c]);
    out << rtrim(s) << "\n";
  };
  line("", names);
  line("", roles);
  line("", types);
  for (std::size_t r = 0; r < shown; ++r) line(std::to_string(r + 1), cells[r]);
  if (table.rows() > shown) out << "# i " << (table.rows() - shown) << " more rows\n";
  return out.str();
}

CsvData parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // CRLF handled at the '\n'
    } else if (ch == '\n') {
      end_record();
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (in_quotes) throw DesignError(ErrorKind::IoFailure, "unterminated quoted CSV field");
  if (field_started || !record.empty()) end_record();

  CsvData data;
  if (records.empty()) return data;
  data.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != data.header.size()) {
      throw DesignError(ErrorKind::IoFailure, "CSV record " + std::to_string(r + 1) + " has " +
                                                  std::to_string(records[r].size()) +
                                                  " fields, expected " +
                                                  std::to_string(data.header.size()));
    }
    data.rows.push_back(std::move(records[r]));
  }
  return data;
}

CsvData read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DesignError(ErrorKind::IoFailure, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << "\r\n";
}

std::string table_to_csv(const DesignTable& table) {
  std::ostringstream out;
  std::vector<std::string> fields;
  for (const auto& c : table.columns()) fields.push_back(c.name);
  write_csv_row(out, fields);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    fields.clear();
    for (const auto& c : table.columns()) {
      fields.push_back(c.filled ? value_to_string(c.values[r]) : std::string());
    }
    write_csv_row(out, fields);
  }
  return out.str();
}

}  // namespace desgraph
