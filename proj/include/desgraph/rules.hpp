#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace desgraph {

struct RangeRule {
  std::optional<double> lower;
  std::optional<double> upper;
  bool lower_inclusive = false;
  bool upper_inclusive = false;

  friend bool operator==(const RangeRule&, const RangeRule&) = default;
};

struct LevelSetRule {
  std::vector<std::string> allowed;

  friend bool operator==(const LevelSetRule&, const LevelSetRule&) = default;
};

enum class ExpectedType { Numeric, Integer, Text };

struct ValueTypeRule {
  ExpectedType type = ExpectedType::Numeric;

  friend bool operator==(const ValueTypeRule&, const ValueTypeRule&) = default;
};

/// Machine-checkable constraint on a record factor.
struct ValidationRule {
  std::string record;
  std::variant<RangeRule, LevelSetRule, ValueTypeRule> kind;

  friend bool operator==(const ValidationRule&, const ValidationRule&) = default;
};

}  // namespace desgraph
