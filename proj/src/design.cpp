#include "desgraph/design.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "json.hpp"

namespace desgraph {

std::string_view edge_tag(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::Nests: return "nests";
    case EdgeKind::Allots: return "allots";
    case EdgeKind::Records: return "records";
  }
  return "nests";
}

Design::Design(std::optional<std::string> title)
    : title_(title ? std::move(*title) : std::string(kDefaultTitle)) {}

FactorId Design::add_factor(std::string name, Role role, ValueType type) {
  if (name.empty()) throw DesignError(ErrorKind::EmptySpec, "factor name is empty");
  if (find(name)) throw DesignError(ErrorKind::DuplicateFactor, "factor '" + name + "' already exists");
  FactorId id{static_cast<std::uint32_t>(factors_.size())};
  factors_.push_back(FactorNode{id, std::move(name), role, type, {}, {}});
  levels_by_factor_.emplace_back();
  return id;
}

void Design::add_factor_edge(FactorId from, FactorId to, EdgeKind kind) {
  factor(from);
  factor(to);
  if (from == to || reaches(to, from)) {
    throw DesignError(ErrorKind::CycleDetected, "edge " + factor(from).name + " -> " +
                                                    factor(to).name + " would create a cycle");
  }
  if (has_factor_edge(from, to)) return;
  factor_edges_.push_back(FactorEdge{from, to, kind});
}

void Design::set_conditioned_on(FactorId child, FactorId parent) {
  factors_.at(child.value).conditioned_on = parent;
}

void Design::set_recorded_on(FactorId record, FactorId unit) {
  factors_.at(record.value).recorded_on = unit;
}

void Design::set_value_type(FactorId f, ValueType type) { factors_.at(f.value).type = type; }

std::optional<FactorId> Design::find(std::string_view name) const {
  for (const auto& f : factors_) {
    if (f.name == name) return f.id;
  }
  return std::nullopt;
}

FactorId Design::require(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw DesignError(ErrorKind::UnknownFactor, "unknown factor '" + std::string(name) + "'");
}

bool Design::has_factor_edge(FactorId from, FactorId to) const {
  return factor_edge_kind(from, to).has_value();
}

std::optional<EdgeKind> Design::factor_edge_kind(FactorId from, FactorId to) const {
  for (const auto& e : factor_edges_) {
    if (e.from == from && e.to == to) return e.kind;
  }
  return std::nullopt;
}

std::vector<FactorId> Design::factors_with_role(Role role) const {
  std::vector<FactorId> out;
  for (const auto& f : factors_) {
    if (f.role == role) out.push_back(f.id);
  }
  return out;
}

LevelId Design::add_level(FactorId f, std::string label, Scalar value, std::string nested_label) {
  factor(f);
  if (find_level(f, label)) {
    throw DesignError(ErrorKind::InvalidSpec,
                      "factor '" + factor(f).name + "' already has level '" + label + "'");
  }
  LevelId id{static_cast<std::uint32_t>(levels_.size())};
  levels_.push_back(LevelNode{id, f, std::move(label), std::move(value), std::move(nested_label)});
  levels_by_factor_[f.value].push_back(id);
  level_parents_.emplace_back();
  return id;
}

void Design::add_level_edge(LevelId from, LevelId to, std::optional<std::size_t> allotment) {
  const FactorId a = level(from).factor;
  const FactorId b = level(to).factor;
  if (!has_factor_edge(a, b)) {
    throw DesignError(ErrorKind::InvalidSpec, "no factor edge " + factor(a).name + " -> " +
                                                  factor(b).name + " for level edge");
  }
  level_edges_.push_back(LevelEdge{from, to, allotment});
  level_parents_[to.value].push_back(from);
}

void Design::remove_allotment_edges(std::size_t allotment) {
  std::erase_if(level_edges_, [&](const LevelEdge& e) { return e.allotment == allotment; });
  rebuild_level_index();
}

std::optional<LevelId> Design::find_level(FactorId f, std::string_view label) const {
  for (LevelId id : levels_of(f)) {
    if (levels_[id.value].label == label) return id;
  }
  return std::nullopt;
}

std::size_t Design::add_allotment(Allotment allotment) {
  allotments_.push_back(std::move(allotment));
  return allotments_.size() - 1;
}

void Design::mark_assigned(std::size_t index, bool assigned) {
  allotments_.at(index).assigned = assigned;
}

bool Design::reaches(FactorId from, FactorId to) const {
  std::vector<bool> seen(factors_.size(), false);
  std::vector<FactorId> stack{from};
  while (!stack.empty()) {
    FactorId cur = stack.back();
    stack.pop_back();
    if (cur == to) return true;
    if (seen[cur.value]) continue;
    seen[cur.value] = true;
    for (const auto& e : factor_edges_) {
      if (e.from == cur) stack.push_back(e.to);
    }
  }
  return false;
}

void Design::rebuild_level_index() {
  for (auto& p : level_parents_) p.clear();
  for (const auto& e : level_edges_) level_parents_[e.to.value].push_back(e.from);
}

Design combine(const Design& a, const Design& b) {
  for (const auto& f : b.factors()) {
    if (a.find(f.name)) {
      throw DesignError(ErrorKind::DuplicateFactor, "factor '" + f.name + "' is in both designs");
    }
  }
  Design out(a.title());
  const auto offset = static_cast<std::uint32_t>(a.factors().size());
  const auto level_offset = static_cast<std::uint32_t>(a.levels().size());
  const std::size_t allot_offset = a.allotments().size();

  auto copy_from = [&](const Design& src, std::uint32_t fo, std::uint32_t lo, std::size_t ao) {
    auto fid = [&](FactorId id) { return FactorId{id.value + fo}; };
    for (const auto& f : src.factors()) out.add_factor(f.name, f.role, f.type);
    for (const auto& f : src.factors()) {
      if (f.conditioned_on) out.set_conditioned_on(fid(f.id), fid(*f.conditioned_on));
      if (f.recorded_on) out.set_recorded_on(fid(f.id), fid(*f.recorded_on));
    }
    for (const auto& e : src.factor_edges()) out.add_factor_edge(fid(e.from), fid(e.to), e.kind);
    for (const auto& l : src.levels()) out.add_level(fid(l.factor), l.label, l.value, l.nested_label);
    for (const auto& e : src.level_edges()) {
      std::optional<std::size_t> allot;
      if (e.allotment) allot = *e.allotment + ao;
      out.add_level_edge(LevelId{e.from.value + lo}, LevelId{e.to.value + lo}, allot);
    }
    for (const auto& al : src.allotments()) {
      Allotment copy = al;
      for (auto& f : copy.lhs) f = fid(f);
      copy.rhs = fid(copy.rhs);
      out.add_allotment(copy);
    }
    for (const auto& r : src.rules()) out.rules().push_back(r);
    for (const auto& [name, p] : src.processes()) out.processes().emplace(name, p);
  };
  copy_from(a, 0, 0, 0);
  copy_from(b, offset, level_offset, allot_offset);
  if (a.seed()) {
    out.set_seed(*a.seed());
  } else if (b.seed()) {
    out.set_seed(*b.seed());
  }
  return out;
}

Design operator+(const Design& a, const Design& b) { return combine(a, b); }

std::vector<FactorId> unit_parents(const Design& d, FactorId unit) {
  std::vector<FactorId> out;
  for (const auto& e : d.factor_edges()) {
    if (e.to == unit && e.kind != EdgeKind::Records && d.factor(e.from).role == Role::Unit) {
      out.push_back(e.from);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<FactorId> unit_ancestors(const Design& d, FactorId unit) {
  std::vector<bool> seen(d.factors().size(), false);
  std::vector<FactorId> stack = unit_parents(d, unit);
  std::vector<FactorId> out;
  while (!stack.empty()) {
    FactorId cur = stack.back();
    stack.pop_back();
    if (seen[cur.value]) continue;
    seen[cur.value] = true;
    out.push_back(cur);
    for (FactorId p : unit_parents(d, cur)) stack.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LevelId> level_ancestors(const Design& d, LevelId level) {
  std::vector<bool> seen(d.levels().size(), false);
  std::vector<LevelId> stack = d.level_parents(level);
  std::vector<LevelId> out;
  while (!stack.empty()) {
    LevelId cur = stack.back();
    stack.pop_back();
    if (seen[cur.value]) continue;
    seen[cur.value] = true;
    out.push_back(cur);
    for (LevelId p : d.level_parents(cur)) stack.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LevelId> unit_lineage(const Design& d, LevelId level) {
  std::vector<bool> seen(d.levels().size(), false);
  std::vector<LevelId> stack{level};
  std::vector<LevelId> out;
  while (!stack.empty()) {
    LevelId cur = stack.back();
    stack.pop_back();
    if (seen[cur.value]) continue;
    seen[cur.value] = true;
    out.push_back(cur);
    for (LevelId p : d.level_parents(cur)) {
      if (d.factor(d.level(p).factor).role == Role::Unit) stack.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LevelId> linked_treatments(const Design& d, LevelId level) {
  std::vector<LevelId> out;
  for (LevelId u : unit_lineage(d, level)) {
    for (LevelId p : d.level_parents(u)) {
      if (d.factor(d.level(p).factor).role == Role::Treatment) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t level_count(const Design& d, FactorId f) {
  if (d.factor(f).role == Role::Record) return 0;
  return d.levels_of(f).size();
}

namespace {

std::string tree_label(const Design& d, FactorId f) {
  const FactorNode& node = d.factor(f);
  if (node.role == Role::Record) return node.name + " (record)";
  const std::size_t n = level_count(d, f);
  return node.name + " (" + std::to_string(n) + (n == 1 ? " level)" : " levels)");
}

std::vector<FactorId> tree_children(const Design& d, FactorId f) {
  std::vector<FactorId> out;
  for (const auto& e : d.factor_edges()) {
    if (e.from != f) continue;
    const Role role = d.factor(e.to).role;
    if (role == Role::Record || (role == Role::Unit && d.factor(f).role == Role::Unit)) {
      out.push_back(e.to);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void draw_branches(const Design& d, const std::vector<FactorId>& nodes, const std::string& prefix,
                   std::ostringstream& out) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const bool last = i + 1 == nodes.size();
    out << prefix << (last ? "\\-" : "+-") << tree_label(d, nodes[i]) << "\n";
    draw_branches(d, tree_children(d, nodes[i]), prefix + (last ? "  " : "| "), out);
  }
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace

std::string print_tree(const Design& d) {
  std::vector<FactorId> roots;
  for (const auto& f : d.factors()) {
    if (f.role == Role::Treatment) {
      roots.push_back(f.id);
    } else if (f.role == Role::Unit && unit_parents(d, f.id).empty()) {
      roots.push_back(f.id);
    } else if (f.role == Role::Record && !f.recorded_on) {
      roots.push_back(f.id);
    }
  }
  std::ostringstream out;
  out << d.title() << "\n";
  draw_branches(d, roots, "", out);
  return out.str();
}

std::string graph_export(const Design& d, GraphWhich which, GraphFormat format) {
  using nlohmann::ordered_json;
  if (format == GraphFormat::Json) {
    ordered_json doc;
    doc["title"] = d.title();
    ordered_json nodes = ordered_json::array();
    ordered_json edges = ordered_json::array();
    if (which == GraphWhich::Factors) {
      for (const auto& f : d.factors()) {
        nodes.push_back({{"id", f.id.value},
                         {"name", f.name},
                         {"role", role_tag(f.role)},
                         {"levels", level_count(d, f.id)}});
      }
      for (const auto& e : d.factor_edges()) {
        edges.push_back({{"from", e.from.value}, {"to", e.to.value}, {"kind", edge_tag(e.kind)}});
      }
    } else {
      for (const auto& l : d.levels()) {
        ordered_json node = {{"id", l.id.value},
                             {"label", l.label},
                             {"factor", d.factor(l.factor).name},
                             {"role", role_tag(d.factor(l.factor).role)}};
        if (const auto* num = std::get_if<double>(&l.value)) {
          node["value"] = *num;
        } else {
          node["value"] = std::get<std::string>(l.value);
        }
        nodes.push_back(std::move(node));
      }
      for (const auto& e : d.level_edges()) {
        edges.push_back({{"from", e.from.value}, {"to", e.to.value}});
      }
    }
    doc["nodes"] = std::move(nodes);
    doc["edges"] = std::move(edges);
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "digraph design {\n";
  if (which == GraphWhich::Factors) {
    for (const auto& f : d.factors()) {
      out << "  n" << f.id.value << " [label=\"" << dot_escape(f.name) << " ("
          << level_count(d, f.id) << ")\", role=\"" << role_tag(f.role) << "\"];\n";
    }
    for (const auto& e : d.factor_edges()) {
      out << "  n" << e.from.value << " -> n" << e.to.value << " [kind=\"" << edge_tag(e.kind)
          << "\"];\n";
    }
  } else {
    for (const auto& l : d.levels()) {
      const FactorNode& f = d.factor(l.factor);
      out << "  l" << l.id.value << " [label=\"" << dot_escape(l.label) << "\", factor=\""
          << dot_escape(f.name) << "\", role=\"" << role_tag(f.role) << "\"];\n";
    }
    for (const auto& e : d.level_edges()) {
      out << "  l" << e.from.value << " -> l" << e.to.value << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

namespace {

template <class Edges, class From, class To>
bool kahn(std::size_t n, const Edges& edges, From from, To to) {
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& e : edges) {
    out[from(e)].push_back(to(e));
    ++indegree[to(e)];
  }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t cur = ready.front();
    ready.pop_front();
    ++visited;
    for (std::size_t next : out[cur]) {
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  return visited == n;
}

}  // namespace

bool factor_graph_acyclic(const Design& d) {
  return kahn(
      d.factors().size(), d.factor_edges(), [](const FactorEdge& e) { return e.from.value; },
      [](const FactorEdge& e) { return e.to.value; });
}

bool level_graph_acyclic(const Design& d) {
  return kahn(
      d.levels().size(), d.level_edges(), [](const LevelEdge& e) { return e.from.value; },
      [](const LevelEdge& e) { return e.to.value; });
}

}  // namespace desgraph
