#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "desgraph/design.hpp"
#include "desgraph/table.hpp"

namespace desgraph {

struct CountSpec {
  std::size_t n = 0;
  friend bool operator==(const CountSpec&, const CountSpec&) = default;
};

/// Explicit level values. `single` marks the lvls() form, which behaves the
/// same but is kept apart so it can be written back out unchanged.
struct ValuesSpec {
  std::vector<Scalar> values;
  bool single = false;
  friend bool operator==(const ValuesSpec&, const ValuesSpec&) = default;
};

struct CrossedSpec {
  std::vector<std::string> parents;
  friend bool operator==(const CrossedSpec&, const CrossedSpec&) = default;
};

/// `match ~ spec`; an empty match list with wildcard=true is the "." rule,
/// binding every parent level not matched by another rule.
struct PerParentRule {
  std::vector<std::string> match;
  bool wildcard = false;
  std::variant<CountSpec, ValuesSpec> spec;
  friend bool operator==(const PerParentRule&, const PerParentRule&) = default;
};

struct NestedSpec {
  std::string parent;
  std::variant<CountSpec, CrossedSpec, std::vector<PerParentRule>> inner;
  friend bool operator==(const NestedSpec&, const NestedSpec&) = default;
};

struct ConditionedSpec {
  std::string parent;
  std::vector<PerParentRule> rules;
  friend bool operator==(const ConditionedSpec&, const ConditionedSpec&) = default;
};

using LevelSpec = std::variant<CountSpec, ValuesSpec, NestedSpec, CrossedSpec, ConditionedSpec>;
using FactorSpecs = std::vector<std::pair<std::string, LevelSpec>>;

// Spec helpers, named after the grammar they express.
inline CountSpec count(std::size_t n) { return CountSpec{n}; }
ValuesSpec values(std::initializer_list<const char*> labels);
ValuesSpec values(std::vector<std::string> labels);
ValuesSpec values(std::vector<double> numbers);
ValuesSpec lvls(std::vector<Scalar> values);
NestedSpec nested_in(std::string parent, std::size_t n);
NestedSpec nested_in(std::string parent, CrossedSpec crossed);
NestedSpec nested_in(std::string parent, std::vector<PerParentRule> rules);
CrossedSpec crossed_by(std::vector<std::string> parents);
ConditionedSpec conditioned_on(std::string parent, std::vector<PerParentRule> rules);
PerParentRule when(std::vector<std::string> match, std::variant<CountSpec, ValuesSpec> spec);
PerParentRule otherwise(std::variant<CountSpec, ValuesSpec> spec);

/// Define unit factors in order; nested and crossed specs also add the
/// factor-graph and level-graph links.
Design& set_units(Design& d, const FactorSpecs& specs);
/// Define treatment factors. Treatments are implicitly crossed; only
/// conditioned specs store links.
Design& set_trts(Design& d, const FactorSpecs& specs);
/// record -> unit pairs.
Design& set_rcrds(Design& d, const std::vector<std::pair<std::string, std::string>>& records);
/// unit -> record names.
Design& set_rcrds_of(Design& d,
                     const std::vector<std::pair<std::string, std::vector<std::string>>>& records);

/// Full set of treatment combinations over `factors` (all treatments when
/// empty). Columns in declaration order; the first-declared factor varies
/// fastest, and a conditioned factor's values are enumerated within each of
/// its parent's levels.
struct TreatmentsTable {
  std::vector<FactorId> factors;
  std::vector<std::vector<LevelId>> rows;
};

TreatmentsTable trts_table(const Design& d, std::vector<FactorId> factors = {});
DesignTable as_table(const Design& d, const TreatmentsTable& trts);

}  // namespace desgraph
