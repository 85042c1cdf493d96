#include "desgraph/serve.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "desgraph/error.hpp"

namespace desgraph {

namespace {

[[noreturn]] void not_convertible() {
  throw DesignError(ErrorKind::NotConvertible, kNotConvertibleMessage);
}

FactorId finest_unit(const Design& d) {
  std::vector<FactorId> sinks;
  for (FactorId u : d.factors_with_role(Role::Unit)) {
    const bool has_child = std::any_of(d.factor_edges().begin(), d.factor_edges().end(), [&](const FactorEdge& e) {
      return e.from == u && d.factor(e.to).role == Role::Unit;
    });
    if (!has_child) sinks.push_back(u);
  }
  if (sinks.size() != 1) not_convertible();
  return sinks.front();
}

Value cell_value(const Design& d, const FactorNode& f, LevelId l, bool nested) {
  const LevelNode& lvl = d.level(l);
  if (f.type != ValueType::Text) {
    if (const auto* num = std::get_if<double>(&lvl.value)) return *num;
  }
  if (nested && !lvl.nested_label.empty()) return lvl.nested_label;
  return lvl.label;
}

}  // namespace

DesignTable serve_table(const Design& d, const ServeOptions& options) {
  std::set<FactorId> nested;
  for (const auto& name : options.label_nested) nested.insert(d.require(name));

  for (const auto& a : d.allotments()) {
    if (a.kind == AllotKind::TrtsToUnit && !a.assigned) {
      throw DesignError(ErrorKind::UnassignedTreatments, "treatments allotted to '" +
                                                             d.factor(a.rhs).name + "' are not assigned");
    }
  }
  for (FactorId t : d.factors_with_role(Role::Treatment)) {
    const bool allotted = std::any_of(d.allotments().begin(), d.allotments().end(), [&](const Allotment& a) {
      return std::find(a.lhs.begin(), a.lhs.end(), t) != a.lhs.end();
    });
    if (!allotted && !d.factors_with_role(Role::Unit).empty()) {
      throw DesignError(ErrorKind::UnassignedTreatments,
                        "treatment '" + d.factor(t).name + "' is not allotted to any unit");
    }
  }
  if (d.factors_with_role(Role::Unit).empty()) not_convertible();
  const FactorId finest = finest_unit(d);

  const auto& rows = d.levels_of(finest);
  std::vector<std::map<FactorId, LevelId>> links(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto add = [&](LevelId l) {
      auto [it, fresh] = links[r].emplace(d.level(l).factor, l);
      if (!fresh && it->second != l) not_convertible();
    };
    for (LevelId l : unit_lineage(d, rows[r])) add(l);
    for (LevelId l : linked_treatments(d, rows[r])) {
      if (links[r].count(d.level(l).factor) && links[r][d.level(l).factor] != l) {
        throw DesignError(ErrorKind::InvalidAssignment, "unit " + d.level(rows[r]).label +
                                                            " has two levels of '" +
                                                            d.factor(d.level(l).factor).name + "'");
      }
      add(l);
    }
  }

  std::vector<Column> columns;
  for (const auto& f : d.factors()) {
    Column col;
    col.name = f.name;
    col.role = f.role;
    col.type = f.type;
    if (f.role == Role::Record) {
      col.level_count = f.recorded_on ? level_count(d, *f.recorded_on) : 0;
      col.values.assign(rows.size(), std::monostate{});
      col.filled = false;
      columns.push_back(std::move(col));
      continue;
    }
    col.level_count = level_count(d, f.id);
    const bool use_nested = options.label_nested_all || nested.count(f.id) > 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto it = links[r].find(f.id);
      if (it == links[r].end()) {
        if (f.role == Role::Treatment) {
          throw DesignError(ErrorKind::UnassignedTreatments,
                            "treatment '" + f.name + "' has no level on unit " + d.level(rows[r]).label);
        }
        not_convertible();
      }
      col.values.push_back(cell_value(d, f, it->second, use_nested));
    }
    columns.push_back(std::move(col));
  }
  return DesignTable(d.title(), std::move(columns));
}

DesignTable allot_table(Design& d, const std::vector<AllotFormula>& formulas, const AssignOptions& assign,
                        const ServeOptions& serve) {
  if (formulas.empty()) throw DesignError(ErrorKind::NoAllotment, "no allotments given");
  allot_trts(d, formulas);
  assign_trts(d, assign);
  return serve_table(d, serve);
}

namespace {

bool parse_integer(const std::string& s, double& out) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return false;
  out = static_cast<double>(v);
  return true;
}

bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool missing_text(const std::string& s) { return s.empty() || s == "NA"; }

}  // namespace

DesignTable ingest_table(const CsvData& data, const IngestSelectors& selectors, std::string title) {
  std::map<std::string, Role> roles;
  auto select = [&](const std::vector<std::string>& names, Role role) {
    for (const auto& n : names) {
      if (std::find(data.header.begin(), data.header.end(), n) == data.header.end()) {
        throw DesignError(ErrorKind::UnknownColumn, "unknown column '" + n + "'");
      }
      roles[n] = role;
    }
  };
  select(selectors.units, Role::Unit);
  select(selectors.trts, Role::Treatment);
  select(selectors.rcrds, Role::Record);

  std::vector<Column> columns;
  for (std::size_t c = 0; c < data.header.size(); ++c) {
    Column col;
    col.name = data.header[c];
    if (auto it = roles.find(col.name); it != roles.end()) col.role = it->second;
    bool integers = true, numbers = true;
    for (const auto& row : data.rows) {
      const std::string& s = row[c];
      if (missing_text(s)) continue;
      double v = 0;
      integers = integers && parse_integer(s, v);
      numbers = numbers && parse_double(s, v);
    }
    col.type = integers ? ValueType::Integer : numbers ? ValueType::Numeric : ValueType::Text;
    std::set<std::string> distinct;
    for (const auto& row : data.rows) {
      const std::string& s = row[c];
      if (missing_text(s)) {
        col.values.emplace_back(std::monostate{});
        continue;
      }
      distinct.insert(s);
      if (col.type == ValueType::Text) {
        col.values.emplace_back(s);
      } else {
        double v = 0;
        parse_double(s, v);
        col.values.emplace_back(v);
      }
    }
    col.level_count = distinct.size();
    columns.push_back(std::move(col));
  }
  return DesignTable(std::move(title), std::move(columns));
}

}  // namespace desgraph
