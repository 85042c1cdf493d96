#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "desgraph/rng.hpp"
#include "desgraph/table.hpp"

namespace desgraph {

using ParamMap = std::map<std::string, std::vector<double>>;
using SimColumns = std::map<std::string, std::vector<Value>>;

/// Read-only view handed to a simulation body.
class SimContext {
 public:
  SimContext(const DesignTable& table, const ParamMap& params, Rng& rng)
      : table_(table), params_(params), rng_(rng) {}

  /// Number of rows the process must produce.
  std::size_t n() const { return table_.rows(); }
  const Column& column(std::string_view name) const { return table_.column(name); }
  /// Column cells as text, one per row.
  std::vector<std::string> text(std::string_view name) const;
  const std::vector<double>& param(const std::string& name) const;
  Rng& rng() { return rng_; }

 private:
  const DesignTable& table_;
  const ParamMap& params_;
  Rng& rng_;
};

/// A single-record process returns one column; a multi-record process
/// (name starting with '.') returns named columns.
using SimOutput = std::variant<std::vector<Value>, SimColumns>;
using SimBody = std::function<SimOutput(SimContext&)>;

enum class ProcessKind { SingleRecord, MultiRecord };

struct SimProcess {
  std::string name;
  ParamMap params;
  SimBody body;
  /// Declared output columns of a multi-record process.
  std::vector<std::string> outputs;

  ProcessKind kind() const {
    return !name.empty() && name.front() == '.' ? ProcessKind::MultiRecord
                                                : ProcessKind::SingleRecord;
  }
};

}  // namespace desgraph
