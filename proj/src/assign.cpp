#include "desgraph/assign.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "desgraph/error.hpp"

namespace desgraph {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

AllotFormula formula(std::string_view text) {
  const auto tilde = text.find('~');
  if (tilde == std::string_view::npos) {
    throw DesignError(ErrorKind::InvalidSpec, "formula '" + std::string(text) + "' has no '~'");
  }
  AllotFormula f;
  f.rhs = trim(text.substr(tilde + 1));
  std::string_view lhs = text.substr(0, tilde);
  while (true) {
    const auto colon = lhs.find(':');
    f.lhs.push_back(trim(lhs.substr(0, colon)));
    if (colon == std::string_view::npos) break;
    lhs = lhs.substr(colon + 1);
  }
  if (f.rhs.empty() || std::any_of(f.lhs.begin(), f.lhs.end(), [](auto& s) { return s.empty(); })) {
    throw DesignError(ErrorKind::InvalidSpec, "formula '" + std::string(text) + "' is incomplete");
  }
  return f;
}

namespace {

FactorId require_unit(const Design& d, const std::string& name) {
  const FactorId id = d.require(name);
  if (d.factor(id).role != Role::Unit) {
    throw DesignError(ErrorKind::RoleMismatch, "'" + name + "' is not a unit");
  }
  return id;
}

}  // namespace

Design& allot_trts(Design& d, const std::vector<AllotFormula>& formulas) {
  for (const auto& f : formulas) {
    const FactorId rhs = require_unit(d, f.rhs);
    Allotment a{{}, rhs, AllotKind::TrtsToUnit, false};
    for (const auto& name : f.lhs) {
      const FactorId t = d.require(name);
      if (d.factor(t).role != Role::Treatment) {
        throw DesignError(ErrorKind::RoleMismatch, "'" + name + "' is not a treatment");
      }
      for (const auto& existing : d.allotments()) {
        if (existing.kind == AllotKind::TrtsToUnit &&
            std::find(existing.lhs.begin(), existing.lhs.end(), t) != existing.lhs.end()) {
          throw DesignError(ErrorKind::DuplicateAllotment, "treatment '" + name + "' is already allotted");
        }
      }
      if (std::find(a.lhs.begin(), a.lhs.end(), t) != a.lhs.end()) {
        throw DesignError(ErrorKind::DuplicateAllotment, "treatment '" + name + "' repeats in one allotment");
      }
      a.lhs.push_back(t);
    }
    for (FactorId t : a.lhs) d.add_factor_edge(t, rhs, EdgeKind::Allots);
    d.add_allotment(std::move(a));
  }
  return d;
}

Design& allot_units(Design& d, const std::vector<AllotFormula>& formulas) {
  for (const auto& f : formulas) {
    if (f.lhs.size() != 1) {
      throw DesignError(ErrorKind::InvalidSpec, "a unit allotment takes exactly one unit on the left");
    }
    const FactorId lhs = require_unit(d, f.lhs.front());
    const FactorId rhs = require_unit(d, f.rhs);
    if (lhs == rhs) {
      throw DesignError(ErrorKind::SelfAllotment, "unit '" + f.rhs + "' cannot be allotted to itself");
    }
    for (const auto& existing : d.allotments()) {
      if (existing.kind == AllotKind::UnitToUnit && existing.lhs.front() == lhs && existing.rhs == rhs) {
        throw DesignError(ErrorKind::DuplicateAllotment,
                          "'" + f.lhs.front() + " ~ " + f.rhs + "' is already allotted");
      }
    }
    d.add_factor_edge(lhs, rhs, EdgeKind::Allots);
    d.add_allotment(Allotment{{lhs}, rhs, AllotKind::UnitToUnit, false});
  }
  return d;
}

std::vector<LevelId> UnitsTable::column(FactorId factor) const {
  auto it = std::find(columns.begin(), columns.end(), factor);
  if (it == columns.end()) throw DesignError(ErrorKind::UnknownColumn, "no such column in units table");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<LevelId> out;
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

UnitsTable units_table(const Design& d, FactorId unit) {
  UnitsTable t;
  t.unit = unit;
  const auto& lvls = d.levels_of(unit);
  std::vector<std::map<FactorId, LevelId>> links(lvls.size());
  for (std::size_t i = 0; i < lvls.size(); ++i) {
    for (LevelId a : unit_lineage(d, lvls[i])) {
      if (a != lvls[i]) links[i].emplace(d.level(a).factor, a);
    }
  }
  for (FactorId a : unit_ancestors(d, unit)) {
    if (std::all_of(links.begin(), links.end(), [&](const auto& m) { return m.count(a) == 1; })) {
      t.columns.push_back(a);
    }
  }
  t.columns.push_back(unit);
  for (std::size_t i = 0; i < lvls.size(); ++i) {
    std::vector<LevelId> row;
    for (std::size_t c = 0; c + 1 < t.columns.size(); ++c) row.push_back(links[i].at(t.columns[c]));
    row.push_back(lvls[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

bool is_builtin_ordering(std::string_view name) {
  return std::find(std::begin(kBuiltinOrderings), std::end(kBuiltinOrderings), name) !=
         std::end(kBuiltinOrderings);
}

void OrderingRegistry::add(std::string name, OrderingFn fn) {
  if (is_builtin_ordering(name)) {
    throw DesignError(ErrorKind::ReservedName, "ordering '" + name + "' is built in");
  }
  std::lock_guard lock(mutex_);
  if (orderings_.count(name)) {
    throw DesignError(ErrorKind::DuplicateOrdering, "ordering '" + name + "' is already registered");
  }
  orderings_.emplace(std::move(name), std::move(fn));
}

bool OrderingRegistry::contains(std::string_view name) const {
  std::lock_guard lock(mutex_);
  return orderings_.find(name) != orderings_.end();
}

std::optional<OrderingFn> OrderingRegistry::find(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = orderings_.find(name);
  if (it == orderings_.end()) return std::nullopt;
  return it->second;
}

OrderingRegistry& default_registry() {
  static OrderingRegistry registry;
  return registry;
}

void register_ordering(std::string name, OrderingFn fn) {
  default_registry().add(std::move(name), std::move(fn));
}

std::vector<std::size_t> systematic_fastest(std::size_t n, std::size_t t) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i % t;
  return out;
}

std::vector<std::size_t> systematic_slowest(std::size_t n, std::size_t t) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t run = n / t + (k < n % t ? 1 : 0);
    out.insert(out.end(), run, k);
  }
  return out;
}

std::vector<std::size_t> balanced_random(std::size_t n, std::size_t t, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t k = 0; k < t; ++k) out.insert(out.end(), n / t, k);
  std::vector<std::size_t> extras(t);
  std::iota(extras.begin(), extras.end(), 0);
  rng.shuffle(std::span<std::size_t>(extras));
  out.insert(out.end(), extras.begin(), extras.begin() + static_cast<std::ptrdiff_t>(n % t));
  rng.shuffle(std::span<std::size_t>(out));
  return out;
}

namespace {

enum class Stage : std::uint64_t { Trts = 1, Units = 2 };

struct Prepared {
  TreatmentsTable trts;
  UnitsTable units;
  std::vector<FactorId> constraint;
  /// Admissible trts rows per unit row.
  std::vector<std::vector<std::size_t>> candidates;
};

std::vector<FactorId> resolve_constraint(const Design& d, const Allotment& a, const UnitsTable& units,
                                         const Constraint& constrain) {
  const std::string& rhs_name = d.factor(a.rhs).name;
  for (const auto& [unit, _] : constrain) {
    const FactorId u = d.require(unit);
    if (d.factor(u).role != Role::Unit) {
      throw DesignError(ErrorKind::RoleMismatch, "constraint key '" + unit + "' is not a unit");
    }
  }
  std::vector<FactorId> out;
  auto it = constrain.find(rhs_name);
  if (it != constrain.end()) {
    for (const auto& name : it->second) {
      const FactorId f = d.require(name);
      if (std::find(units.columns.begin(), units.columns.end() - 1, f) == units.columns.end() - 1) {
        throw DesignError(ErrorKind::ConstraintRefersToNonAncestor,
                          "constraint '" + name + "' is not a linked ancestor of '" + rhs_name + "'");
      }
      out.push_back(f);
    }
  } else {
    for (FactorId p : unit_parents(d, a.rhs)) {
      if (a.kind == AllotKind::UnitToUnit && p == a.lhs.front()) continue;
      if (std::find(units.columns.begin(), units.columns.end() - 1, p) != units.columns.end() - 1) {
        out.push_back(p);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<FactorId, LevelId> ancestor_map(const Design& d, LevelId level) {
  std::map<FactorId, LevelId> out;
  for (LevelId a : unit_lineage(d, level)) out.emplace(d.level(a).factor, a);
  for (LevelId a : linked_treatments(d, level)) out.emplace(d.level(a).factor, a);
  return out;
}

Prepared prepare(const Design& d, const Allotment& a, const Constraint& constrain) {
  Prepared p;
  p.units = units_table(d, a.rhs);
  p.constraint = resolve_constraint(d, a, p.units, constrain);
  const std::size_t n = p.units.rows.size();
  p.candidates.resize(n);

  if (a.kind == AllotKind::UnitToUnit) {
    const FactorId lhs = a.lhs.front();
    p.trts.factors = {lhs};
    std::vector<std::map<FactorId, LevelId>> lhs_maps;
    for (LevelId l : d.levels_of(lhs)) {
      p.trts.rows.push_back({l});
      lhs_maps.push_back(ancestor_map(d, l));
    }
    for (std::size_t r = 0; r < n; ++r) {
      const auto unit_map = ancestor_map(d, p.units.rows[r].back());
      for (std::size_t k = 0; k < lhs_maps.size(); ++k) {
        bool ok = true;
        for (const auto& [f, l] : lhs_maps[k]) {
          if (d.factor(f).role != Role::Unit) continue;
          auto it = unit_map.find(f);
          if (it != unit_map.end() && it->second != l) ok = false;
        }
        if (ok) p.candidates[r].push_back(k);
      }
    }
    return p;
  }

  p.trts = trts_table(d, a.lhs);
  // Conditioned treatments whose parent sits outside this allotment.
  std::vector<std::pair<std::size_t, FactorId>> gated;
  for (std::size_t c = 0; c < p.trts.factors.size(); ++c) {
    const auto parent = d.factor(p.trts.factors[c]).conditioned_on;
    if (parent && std::find(a.lhs.begin(), a.lhs.end(), *parent) == a.lhs.end()) {
      gated.emplace_back(c, *parent);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    std::map<FactorId, LevelId> unit_map;
    if (!gated.empty()) unit_map = ancestor_map(d, p.units.rows[r].back());
    for (std::size_t k = 0; k < p.trts.rows.size(); ++k) {
      bool ok = true;
      for (const auto& [c, parent] : gated) {
        auto it = unit_map.find(parent);
        if (it == unit_map.end()) {
          throw DesignError(ErrorKind::ConditionalParentUnassigned,
                            "'" + d.factor(p.trts.factors[c]).name + "' is conditioned on '" +
                                d.factor(parent).name + "', which is not assigned at or above '" +
                                d.factor(a.rhs).name + "'");
        }
        const auto& ps = d.level_parents(p.trts.rows[k][c]);
        if (std::find(ps.begin(), ps.end(), it->second) == ps.end()) ok = false;
      }
      if (ok) p.candidates[r].push_back(k);
    }
  }
  return p;
}

std::vector<std::size_t> builtin_order(const std::string& name, const Prepared& p, std::uint64_t seed,
                                       Stage stage, std::size_t index) {
  const std::size_t n = p.units.rows.size();
  std::vector<std::size_t> out(n);
  // Candidate classes in order of first appearance.
  std::map<std::vector<std::size_t>, std::size_t> class_of;
  std::vector<std::size_t> row_class(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (p.candidates[r].empty()) {
      throw DesignError(ErrorKind::InvalidAssignment, "a unit has no admissible treatment");
    }
    row_class[r] = class_of.emplace(p.candidates[r], class_of.size()).first->second;
  }

  if (name == "random") {
    std::vector<std::size_t> cols;
    for (FactorId f : p.constraint) {
      cols.push_back(static_cast<std::size_t>(
          std::find(p.units.columns.begin(), p.units.columns.end(), f) - p.units.columns.begin()));
    }
    std::map<std::pair<std::vector<LevelId>, std::size_t>, std::size_t> group_of;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<LevelId> key;
      for (std::size_t c : cols) key.push_back(p.units.rows[r][c]);
      auto [it, fresh] = group_of.emplace(std::make_pair(std::move(key), row_class[r]), members.size());
      if (fresh) members.emplace_back();
      members[it->second].push_back(r);
    }
    for (std::size_t g = 0; g < members.size(); ++g) {
      const auto& cand = p.candidates[members[g].front()];
      Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(stage), index, g});
      const auto picks = balanced_random(members[g].size(), cand.size(), rng);
      for (std::size_t i = 0; i < members[g].size(); ++i) out[members[g][i]] = cand[picks[i]];
    }
    return out;
  }

  const bool shuffled = name.rfind("systematic-random", 0) == 0;
  const bool slowest = name.size() >= 7 && name.compare(name.size() - 7, 7, "slowest") == 0;
  std::vector<std::vector<std::size_t>> rows_of(class_of.size());
  for (std::size_t r = 0; r < n; ++r) rows_of[row_class[r]].push_back(r);
  for (std::size_t c = 0; c < rows_of.size(); ++c) {
    std::vector<std::size_t> cand = p.candidates[rows_of[c].front()];
    if (shuffled) {
      Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(stage), index, c});
      rng.shuffle(std::span<std::size_t>(cand));
    }
    const std::size_t m = rows_of[c].size();
    const auto picks = slowest ? systematic_slowest(m, cand.size()) : systematic_fastest(m, cand.size());
    for (std::size_t i = 0; i < m; ++i) out[rows_of[c][i]] = cand[picks[i]];
  }
  return out;
}

void assign_kind(Design& d, AllotKind kind, const AssignOptions& options) {
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < d.allotments().size(); ++i) {
    if (d.allotments()[i].kind == kind) targets.push_back(i);
  }
  const std::string what = kind == AllotKind::TrtsToUnit ? "treatment" : "unit";
  if (targets.empty()) throw DesignError(ErrorKind::NoAllotment, "no " + what + " allotments to assign");

  std::vector<std::string> order = options.order;
  if (order.empty()) order = {"random"};
  if (order.size() != 1 && order.size() != targets.size()) {
    throw DesignError(ErrorKind::LengthMismatch, "got " + std::to_string(order.size()) +
                                                     " orderings for " + std::to_string(targets.size()) +
                                                     " " + what + " allotments");
  }
  const OrderingRegistry& registry = options.registry ? *options.registry : default_registry();
  for (const auto& o : order) {
    if (!is_builtin_ordering(o) && !registry.contains(o)) {
      throw DesignError(ErrorKind::UnknownOrdering, "unknown ordering '" + o + "'");
    }
  }

  std::uint64_t seed = 0;
  if (options.seed) {
    seed = *options.seed;
  } else if (d.seed()) {
    seed = *d.seed();
  } else {
    seed = entropy_seed();
  }
  d.set_seed(seed);
  const Stage stage = kind == AllotKind::TrtsToUnit ? Stage::Trts : Stage::Units;

  for (std::size_t t = 0; t < targets.size(); ++t) {
    const std::size_t index = targets[t];
    const std::string& name = order.size() == 1 ? order.front() : order[t];
    d.remove_allotment_edges(index);
    d.mark_assigned(index, false);
    const Allotment a = d.allotments()[index];
    const Prepared p = prepare(d, a, options.constrain);

    std::vector<std::size_t> picks;
    if (is_builtin_ordering(name)) {
      picks = builtin_order(name, p, seed, stage, index);
    } else {
      Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(stage), index});
      const OrderingContext ctx{d, p.trts, p.units, p.constraint, rng};
      picks = (*registry.find(name))(ctx);
      if (picks.size() != p.units.rows.size()) {
        throw DesignError(ErrorKind::LengthMismatch,
                          "ordering '" + name + "' returned " + std::to_string(picks.size()) +
                              " indices for " + std::to_string(p.units.rows.size()) + " units");
      }
      for (std::size_t r = 0; r < picks.size(); ++r) {
        const auto& cand = p.candidates[r];
        if (std::find(cand.begin(), cand.end(), picks[r]) == cand.end()) {
          throw DesignError(ErrorKind::InvalidAssignment,
                            "ordering '" + name + "' picked an inadmissible treatment for unit " +
                                d.level(p.units.rows[r].back()).label);
        }
      }
    }

    for (std::size_t r = 0; r < picks.size(); ++r) {
      const LevelId unit_level = p.units.rows[r].back();
      for (LevelId l : p.trts.rows[picks[r]]) d.add_level_edge(l, unit_level, index);
    }
    d.mark_assigned(index, true);
  }
}

}  // namespace

Design& assign_trts(Design& d, const AssignOptions& options) {
  assign_kind(d, AllotKind::TrtsToUnit, options);
  return d;
}

Design& assign_units(Design& d, const AssignOptions& options) {
  assign_kind(d, AllotKind::UnitToUnit, options);
  return d;
}

}  // namespace desgraph
