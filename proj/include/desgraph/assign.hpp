#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "desgraph/design.hpp"
#include "desgraph/factors.hpp"
#include "desgraph/rng.hpp"

namespace desgraph {

/// `lhs ~ rhs`; lhs holds one or more factor names (an interaction a:b).
struct AllotFormula {
  std::vector<std::string> lhs;
  std::string rhs;
};

/// Parse "a:b ~ unit".
AllotFormula formula(std::string_view text);

Design& allot_trts(Design& d, const std::vector<AllotFormula>& formulas);
Design& allot_units(Design& d, const std::vector<AllotFormula>& formulas);

/// One row per level of the target unit, in level order, with the linked
/// level of every unit ancestor.
struct UnitsTable {
  FactorId unit;
  std::vector<FactorId> columns;  // ancestors by id, then the unit itself
  std::vector<std::vector<LevelId>> rows;

  /// Column of levels for a factor; throws UnknownColumn.
  std::vector<LevelId> column(FactorId factor) const;
};

/// Arguments for an ordering algorithm. Returned indices address rows of
/// `trts` and must align with rows of `units`.
struct OrderingContext {
  const Design& design;
  const TreatmentsTable& trts;
  const UnitsTable& units;
  const std::vector<FactorId>& constraint;
  Rng& rng;
};

using OrderingFn = std::function<std::vector<std::size_t>(const OrderingContext&)>;

inline constexpr std::string_view kBuiltinOrderings[] = {
    "systematic-fastest", "systematic",        "systematic-random-fastest",
    "systematic-random",  "systematic-slowest", "systematic-random-slowest",
    "random"};

bool is_builtin_ordering(std::string_view name);

/// Custom orderings by name. Registration is expected to finish before any
/// assignment runs; lookups are safe across threads.
class OrderingRegistry {
 public:
  /// Throws ReservedName for built-in names, DuplicateOrdering for repeats.
  void add(std::string name, OrderingFn fn);
  bool contains(std::string_view name) const;
  std::optional<OrderingFn> find(std::string_view name) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, OrderingFn, std::less<>> orderings_;
};

OrderingRegistry& default_registry();
void register_ordering(std::string name, OrderingFn fn);

/// unit -> unit factors whose levels bound the randomisation groups.
using Constraint = std::map<std::string, std::vector<std::string>>;

struct AssignOptions {
  /// One name recycled over every allotment, or one per allotment.
  std::vector<std::string> order = {"random"};
  std::optional<std::uint64_t> seed;
  Constraint constrain;
  const OrderingRegistry* registry = nullptr;  // default_registry() when null
};

Design& assign_trts(Design& d, const AssignOptions& options = {});
Design& assign_units(Design& d, const AssignOptions& options = {});

/// Units table for `unit` as passed to orderings.
UnitsTable units_table(const Design& d, FactorId unit);

/// Pure systematic orderings over n units and t levels (0-based indices).
std::vector<std::size_t> systematic_fastest(std::size_t n, std::size_t t);
std::vector<std::size_t> systematic_slowest(std::size_t n, std::size_t t);
/// floor(n/t) copies of each level plus n mod t distinct extras, shuffled.
std::vector<std::size_t> balanced_random(std::size_t n, std::size_t t, Rng& rng);

/// Williams square with treatments 0..t-1: entry [row][col], each column a
/// sequence over rows. t columns for even t; for odd t the square and its
/// row-reversed mirror side by side (2t columns).
std::vector<std::vector<std::size_t>> williams_square(std::size_t t);

/// Tiles independently relabelled Williams squares over the larger of two
/// crossed constraint factors, the smaller one indexing the rows.
std::vector<std::size_t> ordering_williams(const OrderingContext& ctx);

}  // namespace desgraph
