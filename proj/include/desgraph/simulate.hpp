#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "desgraph/design.hpp"
#include "desgraph/process.hpp"
#include "desgraph/serve.hpp"
#include "desgraph/table.hpp"

namespace desgraph {

struct CensorNone {
  friend bool operator==(CensorNone, CensorNone) = default;
};
struct CensorToMissing {
  friend bool operator==(CensorToMissing, CensorToMissing) = default;
};
struct CensorClamp {
  std::optional<double> lower;
  std::optional<double> upper;
  friend bool operator==(const CensorClamp&, const CensorClamp&) = default;
};
using Censor = std::variant<CensorNone, CensorToMissing, CensorClamp>;

/// Censor one value against an optional rule. ToMissing drops values that
/// fail the rule; Clamp pins numbers to its bounds.
Value censor_value(const Value& value, const Censor& censor, const ValidationRule* rule);

/// Register processes; redefining a name replaces it.
Design& simulate_process(Design& d, std::vector<SimProcess> processes);

struct Invocation {
  std::string process;
  ParamMap params;                       // overrides of the defaults
  std::map<std::string, Censor> censor;  // per record; default ToMissing
};

struct SimulateOptions {
  std::optional<std::uint64_t> seed;
  ServeOptions serve;
};

/// Runs each invocation against the pristine served table. Values for a
/// record on a coarser unit are taken from the first row of each unit level.
DesignTable simulate_rcrds(const Design& d, const std::vector<Invocation>& invocations,
                           const SimulateOptions& options = {});

/// Fill every record with values satisfying its rules.
DesignTable autofill_rcrds(const Design& d, const SimulateOptions& options = {});

}  // namespace desgraph
