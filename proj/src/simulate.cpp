#include "desgraph/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "desgraph/error.hpp"
#include "desgraph/records.hpp"

namespace desgraph {

std::vector<std::string> SimContext::text(std::string_view name) const {
  const Column& c = table_.column(name);
  std::vector<std::string> out;
  out.reserve(c.values.size());
  for (const auto& v : c.values) out.push_back(value_to_string(v));
  return out;
}

const std::vector<double>& SimContext::param(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw DesignError(ErrorKind::InvalidParams, "no parameter '" + name + "'");
  return it->second;
}

Value censor_value(const Value& value, const Censor& censor, const ValidationRule* rule) {
  if (std::holds_alternative<CensorNone>(censor) || is_missing(value)) return value;
  if (std::holds_alternative<CensorToMissing>(censor)) {
    if (rule && !satisfies(*rule, value)) return std::monostate{};
    return value;
  }
  const auto& clamp = std::get<CensorClamp>(censor);
  const auto* v = std::get_if<double>(&value);
  if (!v) return value;
  double x = *v;
  if (clamp.lower && x < *clamp.lower) x = *clamp.lower;
  if (clamp.upper && x > *clamp.upper) x = *clamp.upper;
  return x;
}

Design& simulate_process(Design& d, std::vector<SimProcess> processes) {
  for (auto& p : processes) {
    if (p.kind() == ProcessKind::SingleRecord) {
      auto id = d.find(p.name);
      if (!id || d.factor(*id).role != Role::Record) {
        throw DesignError(ErrorKind::BadName, "process '" + p.name +
                                                  "' neither names a record nor starts with '.'");
      }
    } else {
      if (p.name.size() < 2) throw DesignError(ErrorKind::BadName, "process name '.' is empty");
      for (const auto& out : p.outputs) {
        auto id = d.find(out);
        if (!id || d.factor(*id).role != Role::Record) {
          throw DesignError(ErrorKind::UnknownRecordColumn,
                            "process '" + p.name + "' declares unknown record '" + out + "'");
        }
      }
    }
    if (!p.body) throw DesignError(ErrorKind::BadName, "process '" + p.name + "' has no body");
    d.processes().insert_or_assign(p.name, std::move(p));
  }
  return d;
}

namespace {

enum class Stream : std::uint64_t { Simulate = 3, Autofill = 4 };

std::uint64_t effective_seed(const Design& d, const SimulateOptions& options) {
  if (options.seed) return *options.seed;
  if (d.seed()) return *d.seed();
  return entropy_seed();
}

/// Group index per row for the levels of `unit`, in order of first row.
std::vector<std::size_t> unit_groups(const DesignTable& table, const Design& d, FactorId unit,
                                     std::size_t& count) {
  std::vector<const Column*> keys;
  for (FactorId a : unit_ancestors(d, unit)) {
    if (table.has_column(d.factor(a).name)) keys.push_back(&table.column(d.factor(a).name));
  }
  keys.push_back(&table.column(d.factor(unit).name));
  std::map<std::vector<std::string>, std::size_t> index;
  std::vector<std::size_t> out(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    std::vector<std::string> key;
    for (const auto* c : keys) key.push_back(value_to_string(c->values[r]));
    out[r] = index.emplace(std::move(key), index.size()).first->second;
  }
  count = index.size();
  return out;
}

std::vector<Value> broadcast(const DesignTable& table, const Design& d, FactorId record,
                             const std::vector<Value>& values) {
  const auto unit = d.factor(record).recorded_on;
  if (!unit) return values;
  std::size_t count = 0;
  const auto groups = unit_groups(table, d, *unit, count);
  if (count == table.rows()) return values;
  std::vector<std::optional<std::size_t>> first(count);
  for (std::size_t r = 0; r < groups.size(); ++r) {
    if (!first[groups[r]]) first[groups[r]] = r;
  }
  std::vector<Value> out(values.size());
  for (std::size_t r = 0; r < groups.size(); ++r) out[r] = values[*first[groups[r]]];
  return out;
}

ValueType column_type(const Design& d, FactorId record, const std::vector<Value>& values) {
  const ValueType declared = d.factor(record).type;
  if (declared == ValueType::Text) return ValueType::Text;
  for (const auto& v : values) {
    if (std::holds_alternative<std::string>(v)) return ValueType::Text;
  }
  return declared;
}

void check_clamp(const Design& d, const std::string& record, const CensorClamp& clamp) {
  const RangeRule* range = range_rule(d, record);
  if (clamp.lower && clamp.upper && *clamp.lower > *clamp.upper) {
    throw DesignError(ErrorKind::InconsistentCensor, "censor bounds for '" + record + "' are reversed");
  }
  if (!range) return;
  if ((clamp.lower && range->lower && *clamp.lower < *range->lower) ||
      (clamp.upper && range->upper && *clamp.upper > *range->upper) ||
      (clamp.lower && range->upper && *clamp.lower > *range->upper) ||
      (clamp.upper && range->lower && *clamp.upper < *range->lower)) {
    throw DesignError(ErrorKind::InconsistentCensor,
                      "censor bounds for '" + record + "' fall outside its expected values");
  }
}

std::vector<Value> censor_column(const Design& d, const std::string& record, std::vector<Value> values,
                                 const std::map<std::string, Censor>& spec) {
  Censor censor = CensorToMissing{};
  if (auto it = spec.find(record); it != spec.end()) censor = it->second;
  if (const auto* clamp = std::get_if<CensorClamp>(&censor)) {
    check_clamp(d, record, *clamp);
    for (auto& v : values) v = censor_value(v, censor, nullptr);
    return values;
  }
  for (const auto& rule : d.rules()) {
    if (rule.record != record) continue;
    for (auto& v : values) v = censor_value(v, censor, &rule);
  }
  return values;
}

}  // namespace

DesignTable simulate_rcrds(const Design& d, const std::vector<Invocation>& invocations,
                           const SimulateOptions& options) {
  const DesignTable pristine = serve_table(d, options.serve);
  const std::uint64_t seed = effective_seed(d, options);
  DesignTable out = pristine;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    const Invocation& inv = invocations[i];
    auto it = d.processes().find(inv.process);
    if (it == d.processes().end()) {
      throw DesignError(ErrorKind::UnknownProcess, "no simulation process '" + inv.process + "'");
    }
    const SimProcess& process = it->second;
    ParamMap params = process.params;
    for (const auto& [k, v] : inv.params) {
      if (!params.count(k)) {
        throw DesignError(ErrorKind::InvalidParams,
                          "process '" + inv.process + "' has no parameter '" + k + "'");
      }
      params[k] = v;
    }
    Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(Stream::Simulate), i});
    SimContext ctx(pristine, params, rng);
    SimOutput result = process.body(ctx);

    SimColumns columns;
    if (auto* single = std::get_if<std::vector<Value>>(&result)) {
      columns.emplace(process.name, std::move(*single));
    } else {
      columns = std::move(std::get<SimColumns>(result));
    }
    for (auto& [record, values] : columns) {
      auto id = d.find(record);
      if (!id || d.factor(*id).role != Role::Record) {
        throw DesignError(ErrorKind::UnknownRecordColumn,
                          "process '" + inv.process + "' returned unknown record '" + record + "'");
      }
      if (values.size() != pristine.rows()) {
        throw DesignError(ErrorKind::ShapeMismatch, "process '" + inv.process + "' returned " +
                                                        std::to_string(values.size()) + " values for " +
                                                        std::to_string(pristine.rows()) + " rows");
      }
      auto filled = censor_column(d, record, broadcast(pristine, d, *id, values), inv.censor);
      const ValueType type = column_type(d, *id, filled);
      out = out.with_column_values(record, std::move(filled), type);
    }
  }
  return out;
}

namespace {

double softplus(double x) { return x > 30 ? x : std::log1p(std::exp(x)); }

/// Factors constant within each level of `unit` that may drive its records.
std::vector<FactorId> influencers(const Design& d, const DesignTable& table, FactorId unit) {
  std::vector<FactorId> scope = unit_ancestors(d, unit);
  scope.push_back(unit);
  std::vector<FactorId> out;
  for (FactorId a : scope) {
    if (a != unit && table.has_column(d.factor(a).name)) out.push_back(a);
  }
  for (const auto& al : d.allotments()) {
    if (al.kind != AllotKind::TrtsToUnit) continue;
    if (std::find(scope.begin(), scope.end(), al.rhs) == scope.end()) continue;
    for (FactorId t : al.lhs) {
      if (table.has_column(d.factor(t).name)) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Nearest valid integer moving toward the interior of the range.
Value integer_inward(const ValidationRule* rule, double v, double centre) {
  double r = std::round(v);
  Value candidate = r;
  if (!rule || satisfies(*rule, candidate)) return candidate;
  r = v < centre ? std::ceil(v) : std::floor(v);
  candidate = r;
  if (satisfies(*rule, candidate)) return candidate;
  return std::monostate{};
}

}  // namespace

DesignTable autofill_rcrds(const Design& d, const SimulateOptions& options) {
  const DesignTable pristine = serve_table(d, options.serve);
  const std::uint64_t seed = effective_seed(d, options);
  DesignTable out = pristine;
  for (const auto& f : d.factors()) {
    if (f.role != Role::Record || !f.recorded_on || !pristine.has_column(f.name)) continue;
    Rng rng = Rng::stream(seed, {static_cast<std::uint64_t>(Stream::Autofill), f.id.value});
    std::size_t groups = 0;
    const auto group_of = unit_groups(pristine, d, *f.recorded_on, groups);
    std::vector<std::size_t> first(groups, pristine.rows());
    for (std::size_t r = group_of.size(); r-- > 0;) first[group_of[r]] = r;

    std::vector<Value> per_group(groups);
    if (const LevelSetRule* set = levels_rule(d, f.name)) {
      std::vector<double> weights;
      double total = 0;
      for (std::size_t k = 0; k < set->allowed.size(); ++k) {
        weights.push_back(rng.exponential());
        total += weights.back();
      }
      for (auto& g : per_group) {
        double u = rng.uniform() * total;
        std::size_t k = 0;
        while (k + 1 < weights.size() && u >= weights[k]) u -= weights[k++];
        g = set->allowed[k];
      }
    } else {
      const RangeRule* range = range_rule(d, f.name);
      const ValueTypeRule* type = type_rule(d, f.name);
      const bool lower = range && range->lower, upper = range && range->upper;
      double scale = 10, centre = 0;
      if (lower && upper) {
        scale = *range->upper - *range->lower;
        centre = (*range->lower + *range->upper) / 2;
      } else if (lower) {
        scale = std::max(10.0, std::abs(*range->lower));
        centre = *range->lower + scale / 2;
      } else if (upper) {
        scale = std::max(10.0, std::abs(*range->upper));
        centre = *range->upper - scale / 2;
      }

      auto pool = influencers(d, pristine, *f.recorded_on);
      rng.shuffle(std::span<FactorId>(pool));
      pool.resize(std::min<std::size_t>(pool.size(), rng.below(3)));
      std::vector<double> raw(groups, centre);
      for (FactorId inf : pool) {
        const Column& col = pristine.column(d.factor(inf).name);
        std::map<std::string, double> effect;
        for (std::size_t g = 0; g < groups; ++g) {
          const std::string key = value_to_string(col.values[first[g]]);
          auto [it, fresh] = effect.emplace(key, 0.0);
          if (fresh) it->second = rng.normal() * 0.1 * scale;
          raw[g] += it->second;
        }
      }
      for (auto& v : raw) v += rng.normal() * 0.05 * scale;

      if (lower && upper) {
        const double eps = 1e-3 * scale;
        const double lo = *range->lower + eps, hi = *range->upper - eps;
        const auto [mn, mx] = std::minmax_element(raw.begin(), raw.end());
        if (!raw.empty() && (*mn <= lo || *mx >= hi)) {
          const double a = *mn, b = *mx;
          for (auto& v : raw) v = b > a ? lo + (v - a) / (b - a) * (hi - lo) : centre;
        }
      } else if (lower) {
        for (auto& v : raw) v = *range->lower + 1e-6 * scale + softplus(v - *range->lower);
      } else if (upper) {
        for (auto& v : raw) v = *range->upper - 1e-6 * scale - softplus(*range->upper - v);
      }

      const bool integer = f.type == ValueType::Integer || (type && type->type == ExpectedType::Integer);
      const bool text = type && type->type == ExpectedType::Text;
      const ValidationRule* rule = find_rule(d, f.name, 0);
      for (std::size_t g = 0; g < groups; ++g) {
        if (integer) {
          per_group[g] = integer_inward(rule, raw[g], centre);
        } else if (text) {
          per_group[g] = format_number(raw[g]);
        } else {
          per_group[g] = raw[g];
        }
      }
    }

    std::vector<Value> values(pristine.rows());
    for (std::size_t r = 0; r < values.size(); ++r) values[r] = per_group[group_of[r]];
    const ValueType type = column_type(d, f.id, values);
    out = out.with_column_values(f.name, std::move(values), type);
  }
  return out;
}

}  // namespace desgraph
