#include "desgraph/factors.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "desgraph/error.hpp"

namespace desgraph {

ValuesSpec values(std::initializer_list<const char*> labels) {
  ValuesSpec spec;
  for (const char* l : labels) spec.values.emplace_back(std::string(l));
  return spec;
}

ValuesSpec values(std::vector<std::string> labels) {
  ValuesSpec spec;
  for (auto& l : labels) spec.values.emplace_back(std::move(l));
  return spec;
}

ValuesSpec values(std::vector<double> numbers) {
  ValuesSpec spec;
  for (double v : numbers) spec.values.emplace_back(v);
  return spec;
}

ValuesSpec lvls(std::vector<Scalar> vals) { return ValuesSpec{std::move(vals), true}; }

NestedSpec nested_in(std::string parent, std::size_t n) {
  return NestedSpec{std::move(parent), CountSpec{n}};
}

NestedSpec nested_in(std::string parent, CrossedSpec crossed) {
  return NestedSpec{std::move(parent), std::move(crossed)};
}

NestedSpec nested_in(std::string parent, std::vector<PerParentRule> rules) {
  return NestedSpec{std::move(parent), std::move(rules)};
}

CrossedSpec crossed_by(std::vector<std::string> parents) { return CrossedSpec{std::move(parents)}; }

ConditionedSpec conditioned_on(std::string parent, std::vector<PerParentRule> rules) {
  return ConditionedSpec{std::move(parent), std::move(rules)};
}

PerParentRule when(std::vector<std::string> match, std::variant<CountSpec, ValuesSpec> spec) {
  return PerParentRule{std::move(match), false, std::move(spec)};
}

PerParentRule otherwise(std::variant<CountSpec, ValuesSpec> spec) {
  return PerParentRule{{}, true, std::move(spec)};
}

namespace {

struct PlannedLevel {
  std::string label;
  Scalar value;
  std::string nested_label;
  std::vector<LevelId> parents;
};

struct Plan {
  ValueType type = ValueType::Text;
  std::vector<FactorId> parents;
  std::vector<PlannedLevel> levels;
};

std::string padded(const std::string& name, std::size_t index, std::size_t max) {
  std::string digits = std::to_string(index);
  const std::size_t width = std::to_string(max).size();
  return name + std::string(width - digits.size(), '0') + digits;
}

ValueType values_type(const std::string& name, const std::vector<Scalar>& vals) {
  if (vals.empty()) throw DesignError(ErrorKind::EmptySpec, "factor '" + name + "' has no levels");
  const auto numbers = std::count_if(vals.begin(), vals.end(),
                                     [](const Scalar& v) { return std::holds_alternative<double>(v); });
  if (numbers != 0 && static_cast<std::size_t>(numbers) != vals.size()) {
    throw DesignError(ErrorKind::InvalidSpec,
                      "factor '" + name + "' mixes numeric and text levels");
  }
  return numbers ? ValueType::Numeric : ValueType::Text;
}

void check_unique(const std::string& name, const std::vector<Scalar>& vals) {
  std::set<std::string> seen;
  for (const auto& v : vals) {
    if (!seen.insert(scalar_to_string(v)).second) {
      throw DesignError(ErrorKind::InvalidSpec, "factor '" + name + "' repeats level '" +
                                                    scalar_to_string(v) + "'");
    }
  }
}

std::vector<Scalar> count_values(const std::string& name, std::size_t n) {
  if (n == 0) throw DesignError(ErrorKind::EmptySpec, "factor '" + name + "' has no levels");
  std::vector<Scalar> out;
  for (std::size_t i = 1; i <= n; ++i) out.emplace_back(padded(name, i, n));
  return out;
}

FactorId require_parent(const Design& d, const std::string& child, const std::string& parent,
                        Role role) {
  auto id = d.find(parent);
  if (!id) {
    throw DesignError(ErrorKind::UnknownParent,
                      "factor '" + child + "' refers to unknown parent '" + parent + "'");
  }
  if (d.factor(*id).role != role) {
    throw DesignError(ErrorKind::RoleMismatch, "parent '" + parent + "' of '" + child +
                                                   "' is not a " +
                                                   std::string(role == Role::Unit ? "unit" : "treatment"));
  }
  return *id;
}

/// Match every parent level to the rule covering it: explicit matches first,
/// then the wildcard for whatever is left.
std::vector<const PerParentRule*> bind_rules(const Design& d, const std::string& child,
                                             FactorId parent,
                                             const std::vector<PerParentRule>& rules) {
  const auto& plevels = d.levels_of(parent);
  std::vector<const PerParentRule*> bound(plevels.size(), nullptr);
  const PerParentRule* wildcard = nullptr;
  for (const auto& rule : rules) {
    if (rule.wildcard) {
      if (wildcard) {
        throw DesignError(ErrorKind::InvalidSpec, "factor '" + child + "' has more than one '.' rule");
      }
      wildcard = &rule;
      continue;
    }
    for (const auto& m : rule.match) {
      auto lvl = d.find_level(parent, m);
      if (!lvl) {
        throw DesignError(ErrorKind::InvalidSpec, "factor '" + child + "' names unknown level '" +
                                                      m + "' of '" + d.factor(parent).name + "'");
      }
      auto pos = std::find(plevels.begin(), plevels.end(), *lvl) - plevels.begin();
      if (bound[pos]) {
        throw DesignError(ErrorKind::InvalidSpec,
                          "level '" + m + "' is matched twice for factor '" + child + "'");
      }
      bound[pos] = &rule;
    }
  }
  for (auto& b : bound) {
    if (!b) {
      if (!wildcard) {
        throw DesignError(ErrorKind::IncompleteRules,
                          "rules for '" + child + "' do not cover every level of '" +
                              d.factor(parent).name + "'");
      }
      b = wildcard;
    }
  }
  return bound;
}

std::vector<Scalar> rule_values(const std::string& child,
                                const std::variant<CountSpec, ValuesSpec>& spec) {
  if (const auto* c = std::get_if<CountSpec>(&spec)) return count_values(child, c->n);
  const auto& v = std::get<ValuesSpec>(spec).values;
  if (v.empty()) throw DesignError(ErrorKind::EmptySpec, "factor '" + child + "' has no levels");
  check_unique(child, v);
  return v;
}

/// Ancestor level of `level` for factor `f`, if any.
std::optional<LevelId> ancestor_in(const Design& d, LevelId level, FactorId f) {
  for (LevelId a : unit_lineage(d, level)) {
    if (d.level(a).factor == f) return a;
  }
  return std::nullopt;
}

bool compatible(const Design& d, const std::vector<LevelId>& combo) {
  std::map<FactorId, LevelId> seen;
  for (LevelId l : combo) {
    for (LevelId a : unit_lineage(d, l)) {
      auto [it, fresh] = seen.emplace(d.level(a).factor, a);
      if (!fresh && it->second != a) return false;
    }
  }
  return true;
}

/// Cartesian product of the parents' levels (first parent fastest), keeping
/// only combinations whose shared ancestors agree.
std::vector<std::vector<LevelId>> crossings(const Design& d, const std::vector<FactorId>& parents,
                                            std::optional<LevelId> within) {
  std::vector<std::vector<LevelId>> pools;
  for (FactorId p : parents) {
    std::vector<LevelId> pool;
    for (LevelId l : d.levels_of(p)) {
      if (within) {
        auto a = ancestor_in(d, l, d.level(*within).factor);
        if (a && *a != *within) continue;
      }
      pool.push_back(l);
    }
    pools.push_back(std::move(pool));
  }
  std::vector<std::vector<LevelId>> out;
  if (std::any_of(pools.begin(), pools.end(), [](const auto& p) { return p.empty(); })) return out;
  std::vector<std::size_t> idx(pools.size(), 0);
  while (true) {
    std::vector<LevelId> combo;
    for (std::size_t i = 0; i < pools.size(); ++i) combo.push_back(pools[i][idx[i]]);
    if (compatible(d, combo)) out.push_back(std::move(combo));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == pools[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

std::vector<FactorId> crossed_parents(const Design& d, const std::string& child,
                                      const CrossedSpec& spec) {
  if (spec.parents.size() < 2) {
    throw DesignError(ErrorKind::FewerThanTwoParents,
                      "crossed_by for '" + child + "' needs at least two factors");
  }
  std::vector<FactorId> out;
  for (const auto& p : spec.parents) {
    FactorId id = require_parent(d, child, p, Role::Unit);
    if (std::find(out.begin(), out.end(), id) != out.end()) {
      throw DesignError(ErrorKind::InvalidSpec, "crossed_by for '" + child + "' repeats '" + p + "'");
    }
    out.push_back(id);
  }
  return out;
}

void plan_crossed(const Design& d, const std::string& name, const std::vector<FactorId>& parents,
                  std::optional<FactorId> nest, Plan& plan) {
  std::vector<std::vector<std::vector<LevelId>>> groups;
  if (nest) {
    for (LevelId s : d.levels_of(*nest)) groups.push_back(crossings(d, parents, s));
  } else {
    groups.push_back(crossings(d, parents, std::nullopt));
  }
  std::size_t total = 0, widest = 0;
  for (const auto& g : groups) {
    total += g.size();
    widest = std::max(widest, g.size());
  }
  if (total == 0) throw DesignError(ErrorKind::EmptySpec, "factor '" + name + "' has no levels");
  std::size_t index = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t j = 0; j < groups[gi].size(); ++j) {
      PlannedLevel lvl;
      lvl.label = padded(name, ++index, total);
      lvl.value = lvl.label;
      std::vector<LevelId> links = groups[gi][j];
      if (nest) {
        lvl.nested_label = padded(name, j + 1, widest);
        links.insert(links.begin(), d.levels_of(*nest)[gi]);
      }
      lvl.parents = std::move(links);
      plan.levels.push_back(std::move(lvl));
    }
  }
  plan.parents = parents;
  if (nest) plan.parents.insert(plan.parents.begin(), *nest);
}

void plan_nested(const Design& d, const std::string& name, const NestedSpec& spec, Plan& plan) {
  const FactorId parent = require_parent(d, name, spec.parent, Role::Unit);
  if (const auto* crossed = std::get_if<CrossedSpec>(&spec.inner)) {
    plan_crossed(d, name, crossed_parents(d, name, *crossed), parent, plan);
    return;
  }
  const auto& plevels = d.levels_of(parent);
  std::vector<std::vector<Scalar>> per_parent;
  bool counted = true;
  if (const auto* c = std::get_if<CountSpec>(&spec.inner)) {
    if (c->n == 0) throw DesignError(ErrorKind::EmptySpec, "factor '" + name + "' has no levels");
    per_parent.assign(plevels.size(), std::vector<Scalar>(c->n));
  } else {
    const auto bound = bind_rules(d, name, parent, std::get<std::vector<PerParentRule>>(spec.inner));
    std::vector<Scalar> all;
    for (const PerParentRule* rule : bound) {
      if (std::holds_alternative<CountSpec>(rule->spec)) {
        const std::size_t n = std::get<CountSpec>(rule->spec).n;
        if (n == 0) throw DesignError(ErrorKind::EmptySpec, "factor '" + name + "' has no levels");
        per_parent.emplace_back(n);
      } else {
        counted = false;
        per_parent.push_back(rule_values(name, rule->spec));
        all.insert(all.end(), per_parent.back().begin(), per_parent.back().end());
      }
    }
    if (!counted) {
      plan.type = values_type(name, all);
      if (std::any_of(bound.begin(), bound.end(),
                      [](const PerParentRule* r) { return std::holds_alternative<CountSpec>(r->spec); })) {
        throw DesignError(ErrorKind::InvalidSpec,
                          "rules for '" + name + "' mix level counts and level values");
      }
    }
  }

  std::size_t total = 0, widest = 0;
  for (const auto& p : per_parent) {
    total += p.size();
    widest = std::max(widest, p.size());
  }
  std::set<std::string> seen;
  bool distinct_values = true;
  if (!counted) {
    for (const auto& p : per_parent) {
      for (const auto& v : p) distinct_values &= seen.insert(scalar_to_string(v)).second;
    }
  }
  std::size_t index = 0;
  for (std::size_t pi = 0; pi < plevels.size(); ++pi) {
    for (std::size_t j = 0; j < per_parent[pi].size(); ++j) {
      PlannedLevel lvl;
      ++index;
      if (counted) {
        lvl.label = padded(name, index, total);
        lvl.value = lvl.label;
        lvl.nested_label = padded(name, j + 1, widest);
      } else {
        const std::string text = scalar_to_string(per_parent[pi][j]);
        lvl.label = distinct_values ? text : d.level(plevels[pi]).label + ":" + text;
        lvl.value = per_parent[pi][j];
        lvl.nested_label = text;
      }
      lvl.parents = {plevels[pi]};
      plan.levels.push_back(std::move(lvl));
    }
  }
  plan.parents = {parent};
}

void plan_plain(const std::vector<Scalar>& vals, ValueType type, Plan& plan) {
  plan.type = type;
  for (const auto& v : vals) plan.levels.push_back(PlannedLevel{scalar_to_string(v), v, {}, {}});
}

void plan_conditioned(const Design& d, const std::string& name, const ConditionedSpec& spec,
                      Plan& plan) {
  const FactorId parent = require_parent(d, name, spec.parent, Role::Treatment);
  const auto bound = bind_rules(d, name, parent, spec.rules);
  const auto& plevels = d.levels_of(parent);
  std::vector<Scalar> unique;
  std::map<std::string, std::size_t> position;
  std::vector<std::vector<std::size_t>> links(plevels.size());
  for (std::size_t pi = 0; pi < plevels.size(); ++pi) {
    for (const auto& v : rule_values(name, bound[pi]->spec)) {
      auto [it, fresh] = position.emplace(scalar_to_string(v), unique.size());
      if (fresh) unique.push_back(v);
      links[pi].push_back(it->second);
    }
  }
  plan.type = values_type(name, unique);
  for (const auto& v : unique) plan.levels.push_back(PlannedLevel{scalar_to_string(v), v, {}, {}});
  for (std::size_t pi = 0; pi < plevels.size(); ++pi) {
    for (std::size_t li : links[pi]) plan.levels[li].parents.push_back(plevels[pi]);
  }
  plan.parents = {parent};
}

void materialise(Design& d, const std::string& name, Role role, Plan plan,
                 std::optional<FactorId> conditioned_on) {
  const FactorId id = d.add_factor(name, role, plan.type);
  for (FactorId p : plan.parents) d.add_factor_edge(p, id, EdgeKind::Nests);
  if (conditioned_on) d.set_conditioned_on(id, *conditioned_on);
  for (auto& lvl : plan.levels) {
    const LevelId l = d.add_level(id, lvl.label, lvl.value, lvl.nested_label);
    for (LevelId p : lvl.parents) d.add_level_edge(p, l);
  }
}

void define(Design& d, const FactorSpecs& specs, Role role) {
  for (const auto& [name, spec] : specs) {
    if (name.empty()) throw DesignError(ErrorKind::EmptySpec, "factor name is empty");
    if (d.find(name)) throw DesignError(ErrorKind::DuplicateFactor, "factor '" + name + "' already exists");
    Plan plan;
    std::optional<FactorId> conditioned;
    if (const auto* c = std::get_if<CountSpec>(&spec)) {
      plan_plain(count_values(name, c->n), ValueType::Text, plan);
    } else if (const auto* v = std::get_if<ValuesSpec>(&spec)) {
      const ValueType type = values_type(name, v->values);
      check_unique(name, v->values);
      plan_plain(v->values, type, plan);
    } else if (const auto* n = std::get_if<NestedSpec>(&spec)) {
      if (role != Role::Unit) {
        throw DesignError(ErrorKind::InvalidSpec, "treatment '" + name + "' cannot be nested");
      }
      plan_nested(d, name, *n, plan);
    } else if (const auto* x = std::get_if<CrossedSpec>(&spec)) {
      if (role != Role::Unit) {
        throw DesignError(ErrorKind::InvalidSpec, "treatment '" + name + "' cannot be crossed_by");
      }
      plan_crossed(d, name, crossed_parents(d, name, *x), std::nullopt, plan);
    } else {
      if (role != Role::Treatment) {
        throw DesignError(ErrorKind::InvalidSpec, "unit '" + name + "' cannot be conditioned_on");
      }
      const auto& cond = std::get<ConditionedSpec>(spec);
      plan_conditioned(d, name, cond, plan);
      conditioned = plan.parents.front();
    }
    materialise(d, name, role, std::move(plan), conditioned);
  }
}

}  // namespace

Design& set_units(Design& d, const FactorSpecs& specs) {
  define(d, specs, Role::Unit);
  return d;
}

Design& set_trts(Design& d, const FactorSpecs& specs) {
  define(d, specs, Role::Treatment);
  return d;
}

Design& set_rcrds(Design& d, const std::vector<std::pair<std::string, std::string>>& records) {
  for (const auto& [record, unit] : records) {
    auto uid = d.find(unit);
    if (!uid) throw DesignError(ErrorKind::UnknownUnit, "record '" + record + "' refers to unknown unit '" + unit + "'");
    if (d.factor(*uid).role != Role::Unit) {
      throw DesignError(ErrorKind::TargetNotAUnit, "record '" + record + "' refers to '" + unit +
                                                       "', which is not a unit");
    }
    const FactorId rid = d.add_factor(record, Role::Record, ValueType::Numeric);
    d.set_recorded_on(rid, *uid);
    d.add_factor_edge(*uid, rid, EdgeKind::Records);
  }
  return d;
}

Design& set_rcrds_of(Design& d,
                     const std::vector<std::pair<std::string, std::vector<std::string>>>& records) {
  std::vector<std::pair<std::string, std::string>> flat;
  for (const auto& [unit, names] : records) {
    for (const auto& n : names) flat.emplace_back(n, unit);
  }
  return set_rcrds(d, flat);
}

namespace {

using Tuple = std::vector<std::pair<FactorId, LevelId>>;

/// Tuples for `f` starting at level `l`, expanding conditioned children in
/// `members` within each level.
std::vector<Tuple> expand(const Design& d, FactorId f, LevelId l, const std::vector<FactorId>& members) {
  std::vector<Tuple> out{Tuple{{f, l}}};
  for (FactorId c : members) {
    if (d.factor(c).conditioned_on != f) continue;
    std::vector<Tuple> child;
    for (LevelId cl : d.levels_of(c)) {
      const auto& ps = d.level_parents(cl);
      if (std::find(ps.begin(), ps.end(), l) == ps.end()) continue;
      for (auto& t : expand(d, c, cl, members)) child.push_back(std::move(t));
    }
    std::vector<Tuple> next;
    for (const auto& head : out) {
      for (const auto& tail : child) {
        Tuple t = head;
        t.insert(t.end(), tail.begin(), tail.end());
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TreatmentsTable trts_table(const Design& d, std::vector<FactorId> factors) {
  if (factors.empty()) factors = d.factors_with_role(Role::Treatment);
  if (factors.empty()) throw DesignError(ErrorKind::NoTreatments, "the design has no treatment factors");
  for (FactorId f : factors) {
    if (d.factor(f).role != Role::Treatment) {
      throw DesignError(ErrorKind::RoleMismatch, "'" + d.factor(f).name + "' is not a treatment");
    }
  }
  std::sort(factors.begin(), factors.end());
  factors.erase(std::unique(factors.begin(), factors.end()), factors.end());

  auto in_set = [&](std::optional<FactorId> f) {
    return f && std::find(factors.begin(), factors.end(), *f) != factors.end();
  };
  std::vector<std::vector<Tuple>> slots;
  for (FactorId f : factors) {
    if (in_set(d.factor(f).conditioned_on)) continue;
    std::vector<Tuple> slot;
    for (LevelId l : d.levels_of(f)) {
      for (auto& t : expand(d, f, l, factors)) slot.push_back(std::move(t));
    }
    slots.push_back(std::move(slot));
  }

  TreatmentsTable table;
  table.factors = factors;
  std::vector<std::size_t> idx(slots.size(), 0);
  if (std::any_of(slots.begin(), slots.end(), [](const auto& s) { return s.empty(); })) return table;
  std::map<FactorId, std::size_t> column;
  for (std::size_t i = 0; i < factors.size(); ++i) column[factors[i]] = i;
  while (true) {
    std::vector<LevelId> row(factors.size());
    for (std::size_t s = 0; s < slots.size(); ++s) {
      for (const auto& [f, l] : slots[s][idx[s]]) row[column[f]] = l;
    }
    table.rows.push_back(std::move(row));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == slots[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return table;
}

DesignTable as_table(const Design& d, const TreatmentsTable& trts) {
  std::vector<Column> columns;
  for (std::size_t c = 0; c < trts.factors.size(); ++c) {
    const FactorNode& f = d.factor(trts.factors[c]);
    Column col{f.name, Role::Treatment, level_count(d, f.id), f.type, {}, true};
    for (const auto& row : trts.rows) {
      const LevelNode& l = d.level(row[c]);
      if (f.type == ValueType::Text) {
        col.values.emplace_back(l.label);
      } else {
        col.values.emplace_back(std::get<double>(l.value));
      }
    }
    columns.push_back(std::move(col));
  }
  return DesignTable(d.title(), std::move(columns));
}

}  // namespace desgraph
