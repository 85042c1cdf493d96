#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "desgraph/design.hpp"
#include "desgraph/rules.hpp"
#include "desgraph/table.hpp"

namespace desgraph {

enum class Comparison { Less, LessEqual, Greater, GreaterEqual };

struct BoundExpr {
  std::string record;
  Comparison op = Comparison::Greater;
  double value = 0;
  friend bool operator==(const BoundExpr&, const BoundExpr&) = default;
};

struct LevelsExpr {
  std::string record;
  std::vector<std::string> levels;
  friend bool operator==(const LevelsExpr&, const LevelsExpr&) = default;
};

struct TypeExpr {
  std::string record;
  ExpectedType type = ExpectedType::Numeric;
  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

using RuleExpr = std::variant<BoundExpr, LevelsExpr, TypeExpr>;

/// Lets rules read as `rcrd("yield") > 0`.
struct RecordRef {
  std::string name;
};
inline RecordRef rcrd(std::string name) { return RecordRef{std::move(name)}; }
inline BoundExpr operator<(const RecordRef& r, double v) { return {r.name, Comparison::Less, v}; }
inline BoundExpr operator<=(const RecordRef& r, double v) { return {r.name, Comparison::LessEqual, v}; }
inline BoundExpr operator>(const RecordRef& r, double v) { return {r.name, Comparison::Greater, v}; }
inline BoundExpr operator>=(const RecordRef& r, double v) { return {r.name, Comparison::GreaterEqual, v}; }
inline LevelsExpr factor_levels(std::string record, std::vector<std::string> levels) {
  return {std::move(record), std::move(levels)};
}

/// Store expected values. One-sided bounds on the same record merge into a
/// single range; repeated bounds on one side keep the tighter one.
Design& expect_rcrds(Design& d, const std::vector<RuleExpr>& rules);

const ValidationRule* find_rule(const Design& d, std::string_view record,
                                std::size_t alternative);
const RangeRule* range_rule(const Design& d, std::string_view record);
const LevelSetRule* levels_rule(const Design& d, std::string_view record);
const ValueTypeRule* type_rule(const Design& d, std::string_view record);

enum class Verdict { Valid, Invalid };

bool satisfies(const ValidationRule& rule, const Value& value);
/// Missing values are always valid.
std::vector<Verdict> validate_values(const Design& d, std::string_view record,
                                     const std::vector<Value>& values);

std::string validation_json(const Design& d);
std::vector<ValidationRule> parse_validation_json(std::string_view text);

struct ExportedFile {
  std::string name;
  std::size_t rows = 0;
  friend bool operator==(const ExportedFile&, const ExportedFile&) = default;
};

struct Manifest {
  std::string title;
  std::optional<std::uint64_t> seed;
  std::vector<ExportedFile> files;
};

/// Writes design.csv, one sheet_<unit>.csv per unit carrying records,
/// validation.json (when records exist) and manifest.json.
Manifest export_design(const DesignTable& table, const Design& d,
                       const std::filesystem::path& dir, bool overwrite);

}  // namespace desgraph
