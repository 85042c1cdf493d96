#include "desgraph/records.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "desgraph/error.hpp"
#include "json.hpp"

namespace desgraph {

namespace {

FactorId require_record(const Design& d, const std::string& name) {
  auto id = d.find(name);
  if (!id || d.factor(*id).role != Role::Record) {
    throw DesignError(ErrorKind::UnknownRecord, "unknown record '" + name + "'");
  }
  return *id;
}

template <class Rule>
Rule* find_kind(Design& d, const std::string& record) {
  for (auto& r : d.rules()) {
    if (r.record == record) {
      if (auto* k = std::get_if<Rule>(&r.kind)) return k;
    }
  }
  return nullptr;
}

void check_bounds(const std::string& record, const RangeRule& r) {
  if (!r.lower || !r.upper) return;
  if (*r.lower > *r.upper || (*r.lower == *r.upper && !(r.lower_inclusive && r.upper_inclusive))) {
    throw DesignError(ErrorKind::ContradictoryBounds, "bounds on '" + record + "' leave no valid value");
  }
}

void merge_bound(RangeRule& r, const BoundExpr& b) {
  const bool inclusive = b.op == Comparison::GreaterEqual || b.op == Comparison::LessEqual;
  if (b.op == Comparison::Greater || b.op == Comparison::GreaterEqual) {
    if (!r.lower || b.value > *r.lower || (b.value == *r.lower && !inclusive)) {
      r.lower = b.value;
      r.lower_inclusive = inclusive;
    }
  } else {
    if (!r.upper || b.value < *r.upper || (b.value == *r.upper && !inclusive)) {
      r.upper = b.value;
      r.upper_inclusive = inclusive;
    }
  }
}

}  // namespace

Design& expect_rcrds(Design& d, const std::vector<RuleExpr>& rules) {
  for (const auto& expr : rules) {
    if (const auto* b = std::get_if<BoundExpr>(&expr)) {
      require_record(d, b->record);
      if (find_kind<LevelSetRule>(d, b->record)) {
        throw DesignError(ErrorKind::ConflictingRule, "'" + b->record + "' already expects a set of levels");
      }
      RangeRule* existing = find_kind<RangeRule>(d, b->record);
      RangeRule merged = existing ? *existing : RangeRule{};
      merge_bound(merged, *b);
      check_bounds(b->record, merged);
      if (existing) {
        *existing = merged;
      } else {
        d.rules().push_back(ValidationRule{b->record, merged});
      }
    } else if (const auto* l = std::get_if<LevelsExpr>(&expr)) {
      const FactorId id = require_record(d, l->record);
      if (l->levels.empty()) {
        throw DesignError(ErrorKind::InvalidSpec, "'" + l->record + "' expects an empty set of levels");
      }
      if (find_kind<RangeRule>(d, l->record)) {
        throw DesignError(ErrorKind::ConflictingRule, "'" + l->record + "' already expects a range");
      }
      LevelSetRule set{l->levels};
      if (auto* existing = find_kind<LevelSetRule>(d, l->record)) {
        *existing = set;
      } else {
        d.rules().push_back(ValidationRule{l->record, set});
      }
      d.set_value_type(id, ValueType::Text);
    } else {
      const auto& t = std::get<TypeExpr>(expr);
      const FactorId id = require_record(d, t.record);
      if (auto* existing = find_kind<ValueTypeRule>(d, t.record)) {
        existing->type = t.type;
      } else {
        d.rules().push_back(ValidationRule{t.record, ValueTypeRule{t.type}});
      }
      d.set_value_type(id, t.type == ExpectedType::Text      ? ValueType::Text
                           : t.type == ExpectedType::Integer ? ValueType::Integer
                                                             : ValueType::Numeric);
    }
  }
  return d;
}

const ValidationRule* find_rule(const Design& d, std::string_view record, std::size_t alternative) {
  for (const auto& r : d.rules()) {
    if (r.record == record && r.kind.index() == alternative) return &r;
  }
  return nullptr;
}

const RangeRule* range_rule(const Design& d, std::string_view record) {
  const auto* r = find_rule(d, record, 0);
  return r ? &std::get<RangeRule>(r->kind) : nullptr;
}

const LevelSetRule* levels_rule(const Design& d, std::string_view record) {
  const auto* r = find_rule(d, record, 1);
  return r ? &std::get<LevelSetRule>(r->kind) : nullptr;
}

const ValueTypeRule* type_rule(const Design& d, std::string_view record) {
  const auto* r = find_rule(d, record, 2);
  return r ? &std::get<ValueTypeRule>(r->kind) : nullptr;
}

bool satisfies(const ValidationRule& rule, const Value& value) {
  if (is_missing(value)) return true;
  if (const auto* range = std::get_if<RangeRule>(&rule.kind)) {
    const auto* v = std::get_if<double>(&value);
    if (!v || std::isnan(*v)) return false;
    if (range->lower && (range->lower_inclusive ? *v < *range->lower : *v <= *range->lower)) return false;
    if (range->upper && (range->upper_inclusive ? *v > *range->upper : *v >= *range->upper)) return false;
    return true;
  }
  if (const auto* set = std::get_if<LevelSetRule>(&rule.kind)) {
    const std::string text = value_to_string(value);
    return std::find(set->allowed.begin(), set->allowed.end(), text) != set->allowed.end();
  }
  const auto& type = std::get<ValueTypeRule>(rule.kind);
  switch (type.type) {
    case ExpectedType::Text: return std::holds_alternative<std::string>(value);
    case ExpectedType::Numeric: return std::holds_alternative<double>(value);
    case ExpectedType::Integer: {
      const auto* v = std::get_if<double>(&value);
      return v && std::isfinite(*v) && std::floor(*v) == *v;
    }
  }
  return false;
}

std::vector<Verdict> validate_values(const Design& d, std::string_view record,
                                     const std::vector<Value>& values) {
  std::vector<Verdict> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    bool ok = true;
    for (const auto& r : d.rules()) {
      if (r.record == record && !satisfies(r, v)) ok = false;
    }
    out.push_back(ok ? Verdict::Valid : Verdict::Invalid);
  }
  return out;
}

namespace {

using nlohmann::ordered_json;

std::string_view expected_tag(ExpectedType t) {
  switch (t) {
    case ExpectedType::Numeric: return "numeric";
    case ExpectedType::Integer: return "integer";
    case ExpectedType::Text: return "text";
  }
  return "numeric";
}

ordered_json bound_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::string validation_json(const Design& d) {
  ordered_json doc = ordered_json::array();
  for (const auto& r : d.rules()) {
    ordered_json entry;
    entry["record"] = r.record;
    auto id = d.find(r.record);
    const auto unit = id ? d.factor(*id).recorded_on : std::nullopt;
    entry["unit"] = unit ? ordered_json(d.factor(*unit).name) : ordered_json(nullptr);
    ordered_json rule;
    if (const auto* range = std::get_if<RangeRule>(&r.kind)) {
      rule["type"] = "range";
      rule["min"] = bound_json(range->lower);
      rule["max"] = bound_json(range->upper);
      rule["min_inclusive"] = range->lower_inclusive;
      rule["max_inclusive"] = range->upper_inclusive;
    } else if (const auto* set = std::get_if<LevelSetRule>(&r.kind)) {
      rule["type"] = "levels";
      rule["allowed"] = set->allowed;
    } else {
      rule["type"] = "valuetype";
      rule["valuetype"] = expected_tag(std::get<ValueTypeRule>(r.kind).type);
    }
    entry["rule"] = std::move(rule);
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::vector<ValidationRule> parse_validation_json(std::string_view text) {
  std::vector<ValidationRule> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& entry : doc) {
      ValidationRule r;
      r.record = entry.at("record").get<std::string>();
      const auto& rule = entry.at("rule");
      const auto type = rule.at("type").get<std::string>();
      if (type == "range") {
        RangeRule range;
        if (!rule.at("min").is_null()) range.lower = rule.at("min").get<double>();
        if (!rule.at("max").is_null()) range.upper = rule.at("max").get<double>();
        range.lower_inclusive = rule.at("min_inclusive").get<bool>();
        range.upper_inclusive = rule.at("max_inclusive").get<bool>();
        r.kind = range;
      } else if (type == "levels") {
        r.kind = LevelSetRule{rule.at("allowed").get<std::vector<std::string>>()};
      } else if (type == "valuetype") {
        const auto v = rule.at("valuetype").get<std::string>();
        if (v == "numeric") {
          r.kind = ValueTypeRule{ExpectedType::Numeric};
        } else if (v == "integer") {
          r.kind = ValueTypeRule{ExpectedType::Integer};
        } else if (v == "text") {
          r.kind = ValueTypeRule{ExpectedType::Text};
        } else {
          throw DesignError(ErrorKind::IoFailure, "unknown value type '" + v + "'");
        }
      } else {
        throw DesignError(ErrorKind::IoFailure, "unknown rule type '" + type + "'");
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DesignError(ErrorKind::IoFailure, std::string("malformed validation JSON: ") + e.what());
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DesignError(ErrorKind::IoFailure, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw DesignError(ErrorKind::IoFailure, "failed writing '" + path.string() + "'");
}

std::string cell_field(const Column& c, std::size_t row) {
  return c.filled ? value_to_string(c.values[row]) : std::string();
}

}  // namespace

Manifest export_design(const DesignTable& table, const Design& d, const std::filesystem::path& dir,
                       bool overwrite) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      throw DesignError(ErrorKind::TargetExists, "'" + dir.string() + "' exists and is not a directory");
    }
    if (!overwrite && !fs::is_empty(dir, ec)) {
      throw DesignError(ErrorKind::TargetExists, "'" + dir.string() + "' already exists");
    }
  }
  fs::create_directories(dir, ec);
  if (ec) throw DesignError(ErrorKind::IoFailure, "cannot create '" + dir.string() + "': " + ec.message());

  Manifest manifest{table.title(), d.seed(), {}};
  write_file(dir / "design.csv", table_to_csv(table));
  manifest.files.push_back({"design.csv", table.rows()});

  bool any_records = false;
  for (const auto& unit : d.factors()) {
    if (unit.role != Role::Unit) continue;
    std::vector<const Column*> records;
    for (const auto& f : d.factors()) {
      if (f.role == Role::Record && f.recorded_on == unit.id && table.has_column(f.name)) {
        records.push_back(&table.column(f.name));
      }
    }
    if (records.empty() || !table.has_column(unit.name)) continue;
    any_records = true;
    std::vector<const Column*> keys;
    for (FactorId a : unit_ancestors(d, unit.id)) {
      if (table.has_column(d.factor(a).name)) keys.push_back(&table.column(d.factor(a).name));
    }
    keys.push_back(&table.column(unit.name));

    std::ostringstream sheet;
    std::vector<std::string> fields;
    for (const auto* c : keys) fields.push_back(c->name);
    for (const auto* c : records) fields.push_back(c->name);
    write_csv_row(sheet, fields);
    std::set<std::vector<std::string>> seen;
    std::size_t rows = 0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
      std::vector<std::string> key;
      for (const auto* c : keys) key.push_back(cell_field(*c, r));
      if (!seen.insert(key).second) continue;
      fields = key;
      for (const auto* c : records) fields.push_back(cell_field(*c, r));
      write_csv_row(sheet, fields);
      ++rows;
    }
    const std::string name = "sheet_" + unit.name + ".csv";
    write_file(dir / name, sheet.str());
    manifest.files.push_back({name, rows});
  }
  if (any_records || !d.factors_with_role(Role::Record).empty()) {
    write_file(dir / "validation.json", validation_json(d));
    manifest.files.push_back({"validation.json", d.rules().size()});
  }

  ordered_json doc;
  doc["title"] = manifest.title;
  doc["seed"] = manifest.seed ? ordered_json(*manifest.seed) : ordered_json(nullptr);
  ordered_json files = ordered_json::array();
  for (const auto& f : manifest.files) files.push_back({{"name", f.name}, {"rows", f.rows}});
  doc["files"] = std::move(files);
  write_file(dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

}  // namespace desgraph
