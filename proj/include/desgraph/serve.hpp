#pragma once

#include <optional>
#include <string>
#include <vector>

#include "desgraph/assign.hpp"
#include "desgraph/design.hpp"
#include "desgraph/table.hpp"

namespace desgraph {

inline constexpr const char* kNotConvertibleMessage =
    "The graph cannot be converted to a table format.";

struct ServeOptions {
  /// Unit factors rendered with labels restarting within their parent.
  std::vector<std::string> label_nested;
  bool label_nested_all = false;
};

/// One row per level of the finest unit, columns in declaration order.
DesignTable serve_table(const Design& d, const ServeOptions& options = {});

/// allot_trts, then assign_trts, then serve_table.
DesignTable allot_table(Design& d, const std::vector<AllotFormula>& formulas,
                        const AssignOptions& assign = {}, const ServeOptions& serve = {});

struct IngestSelectors {
  std::vector<std::string> units;
  std::vector<std::string> trts;
  std::vector<std::string> rcrds;
};

/// Attach roles to existing data. Types are inferred: integer, numeric, else text.
DesignTable ingest_table(const CsvData& data, const IngestSelectors& selectors,
                         std::string title);

}  // namespace desgraph
