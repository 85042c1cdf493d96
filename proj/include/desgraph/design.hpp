#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "desgraph/error.hpp"
#include "desgraph/process.hpp"
#include "desgraph/rules.hpp"
#include "desgraph/types.hpp"

namespace desgraph {

/// nests: within-role structure (nesting, crossing, conditioning).
/// allots: treatment to unit, or unit to unit. records: unit to record.
enum class EdgeKind { Nests, Allots, Records };
std::string_view edge_tag(EdgeKind kind) noexcept;

struct FactorNode {
  FactorId id;
  std::string name;
  Role role = Role::Unit;
  ValueType type = ValueType::Text;
  /// Treatment whose levels gate this treatment's levels.
  std::optional<FactorId> conditioned_on;
  /// Unit a record factor is measured on.
  std::optional<FactorId> recorded_on;
};

struct LevelNode {
  LevelId id;
  FactorId factor;
  /// Distinct label, unique within the factor.
  std::string label;
  Scalar value;
  /// Label restarting within the parent level; empty when not nested.
  std::string nested_label;
};

struct FactorEdge {
  FactorId from;
  FactorId to;
  EdgeKind kind = EdgeKind::Nests;
};

struct LevelEdge {
  LevelId from;
  LevelId to;
  /// Index of the allotment whose assignment created the edge.
  std::optional<std::size_t> allotment;
};

enum class AllotKind { TrtsToUnit, UnitToUnit };

struct Allotment {
  std::vector<FactorId> lhs;
  FactorId rhs;
  AllotKind kind = AllotKind::TrtsToUnit;
  bool assigned = false;
};

inline constexpr std::string_view kDefaultTitle = "An edibble design";

/// The progressively built design: paired factor and level DAGs plus the
/// allotments, validation rules and simulation processes attached to them.
/// Node ids are assigned in creation order and never reused.
class Design {
 public:
  explicit Design(std::optional<std::string> title = std::nullopt);

  const std::string& title() const { return title_; }

  // Factor graph.
  FactorId add_factor(std::string name, Role role, ValueType type = ValueType::Text);
  void add_factor_edge(FactorId from, FactorId to, EdgeKind kind);
  void set_conditioned_on(FactorId child, FactorId parent);
  void set_recorded_on(FactorId record, FactorId unit);
  void set_value_type(FactorId factor, ValueType type);

  const std::vector<FactorNode>& factors() const { return factors_; }
  const FactorNode& factor(FactorId id) const { return factors_.at(id.value); }
  std::optional<FactorId> find(std::string_view name) const;
  /// Throws UnknownFactor.
  FactorId require(std::string_view name) const;
  const std::vector<FactorEdge>& factor_edges() const { return factor_edges_; }
  bool has_factor_edge(FactorId from, FactorId to) const;
  std::optional<EdgeKind> factor_edge_kind(FactorId from, FactorId to) const;
  std::vector<FactorId> factors_with_role(Role role) const;

  // Level graph.
  LevelId add_level(FactorId factor, std::string label, Scalar value,
                    std::string nested_label = {});
  /// Endpoints must belong to factors joined by a factor edge.
  void add_level_edge(LevelId from, LevelId to, std::optional<std::size_t> allotment = {});
  void remove_allotment_edges(std::size_t allotment);

  const std::vector<LevelNode>& levels() const { return levels_; }
  const LevelNode& level(LevelId id) const { return levels_.at(id.value); }
  const std::vector<LevelId>& levels_of(FactorId factor) const {
    return levels_by_factor_.at(factor.value);
  }
  std::optional<LevelId> find_level(FactorId factor, std::string_view label) const;
  const std::vector<LevelEdge>& level_edges() const { return level_edges_; }
  const std::vector<LevelId>& level_parents(LevelId id) const {
    return level_parents_.at(id.value);
  }

  // Allotments in declaration order.
  const std::vector<Allotment>& allotments() const { return allotments_; }
  std::size_t add_allotment(Allotment allotment);
  void mark_assigned(std::size_t index, bool assigned);

  std::vector<ValidationRule>& rules() { return rules_; }
  const std::vector<ValidationRule>& rules() const { return rules_; }
  std::map<std::string, SimProcess>& processes() { return processes_; }
  const std::map<std::string, SimProcess>& processes() const { return processes_; }

  std::optional<std::uint64_t> seed() const { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

 private:
  bool reaches(FactorId from, FactorId to) const;
  void rebuild_level_index();

  std::string title_;
  std::vector<FactorNode> factors_;
  std::vector<FactorEdge> factor_edges_;
  std::vector<LevelNode> levels_;
  std::vector<std::vector<LevelId>> levels_by_factor_;
  std::vector<LevelEdge> level_edges_;
  std::vector<std::vector<LevelId>> level_parents_;
  std::vector<Allotment> allotments_;
  std::vector<ValidationRule> rules_;
  std::map<std::string, SimProcess> processes_;
  std::optional<std::uint64_t> seed_;
};

/// Union of two designs with disjoint factor names; keeps the left title and
/// appends the right allotments after the left ones.
Design combine(const Design& a, const Design& b);
Design operator+(const Design& a, const Design& b);

/// Unit factors with a nests or allots edge into `unit`, by id.
std::vector<FactorId> unit_parents(const Design& d, FactorId unit);
/// Transitive closure of unit_parents, by id.
std::vector<FactorId> unit_ancestors(const Design& d, FactorId unit);

/// Every level reachable backwards from `level` through level edges, by id.
std::vector<LevelId> level_ancestors(const Design& d, LevelId level);

/// The unit level itself and every unit level above it, walking through unit
/// levels only, by id.
std::vector<LevelId> unit_lineage(const Design& d, LevelId level);
/// Treatment levels linked directly onto any level of the unit lineage, by id.
std::vector<LevelId> linked_treatments(const Design& d, LevelId level);

/// Number of level nodes; record factors report zero.
std::size_t level_count(const Design& d, FactorId factor);

/// Title line followed by one branch per factor. Units appear under every
/// unit parent; records appear under their unit.
std::string print_tree(const Design& d);

enum class GraphWhich { Factors, Levels };
enum class GraphFormat { Dot, Json };
std::string graph_export(const Design& d, GraphWhich which, GraphFormat format);

/// Kahn's algorithm over both graphs.
bool factor_graph_acyclic(const Design& d);
bool level_graph_acyclic(const Design& d);

}  // namespace desgraph
