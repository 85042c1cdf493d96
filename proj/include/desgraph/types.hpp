#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>

namespace desgraph {

enum class Role { Unit, Treatment, Record };

/// Short role tag used in graph exports: unit | trt | rcrd.
std::string_view role_tag(Role role) noexcept;
/// Single-letter role used in table headers: U | T | R.
char role_letter(Role role) noexcept;

enum class ValueType { Text, Integer, Numeric };

/// Column type tag as printed under the header: <chr>, <int>, <dbl>.
std::string_view type_tag(ValueType type) noexcept;

struct FactorId {
  std::uint32_t value = 0;
  friend auto operator<=>(FactorId, FactorId) = default;
};

struct LevelId {
  std::uint32_t value = 0;
  friend auto operator<=>(LevelId, LevelId) = default;
};

/// A level value: text or number.
using Scalar = std::variant<std::string, double>;

/// Shortest round-trip decimal form; integral values print without a point.
std::string format_number(double value);
std::string scalar_to_string(const Scalar& value);

}  // namespace desgraph

template <>
struct std::hash<desgraph::FactorId> {
  std::size_t operator()(desgraph::FactorId id) const noexcept { return id.value; }
};
template <>
struct std::hash<desgraph::LevelId> {
  std::size_t operator()(desgraph::LevelId id) const noexcept { return id.value; }
};
