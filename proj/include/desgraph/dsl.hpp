#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "desgraph/factors.hpp"
#include "desgraph/records.hpp"
#include "desgraph/serve.hpp"

namespace desgraph::dsl {

/// Diagnostic position. Never takes part in AST equality, so a reformatted
/// spec parses to an equal tree.
struct SourcePos {
  int line = 0;
  int column = 0;
  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

struct FactorDecl {
  std::string name;
  LevelSpec spec;
  SourcePos pos;
  friend bool operator==(const FactorDecl&, const FactorDecl&) = default;
};

struct RecordDecl {
  std::vector<std::string> names;
  std::string unit;
  SourcePos pos;
  friend bool operator==(const RecordDecl&, const RecordDecl&) = default;
};

struct ExpectDecl {
  RuleExpr rule;
  SourcePos pos;
  friend bool operator==(const ExpectDecl&, const ExpectDecl&) = default;
};

struct AllotDecl {
  std::vector<std::string> lhs;
  std::string rhs;
  SourcePos pos;
  friend bool operator==(const AllotDecl&, const AllotDecl&) = default;
};

struct ConstraintDecl {
  std::string unit;
  std::vector<std::string> factors;
  SourcePos pos;
  friend bool operator==(const ConstraintDecl&, const ConstraintDecl&) = default;
};

struct UnitsBlock {
  std::vector<FactorDecl> decls;
  friend bool operator==(const UnitsBlock&, const UnitsBlock&) = default;
};
struct TrtsBlock {
  std::vector<FactorDecl> decls;
  friend bool operator==(const TrtsBlock&, const TrtsBlock&) = default;
};
struct RcrdsBlock {
  std::vector<RecordDecl> decls;
  friend bool operator==(const RcrdsBlock&, const RcrdsBlock&) = default;
};
struct ExpectBlock {
  std::vector<ExpectDecl> decls;
  friend bool operator==(const ExpectBlock&, const ExpectBlock&) = default;
};
struct AllotBlock {
  std::vector<AllotDecl> decls;
  friend bool operator==(const AllotBlock&, const AllotBlock&) = default;
};
/// order: treatment allotments; unit_order: unit-to-unit allotments.
struct AssignBlock {
  std::vector<std::string> order;
  std::vector<std::string> unit_order;
  std::optional<std::uint64_t> seed;
  std::vector<ConstraintDecl> constrain;
  SourcePos pos;
  friend bool operator==(const AssignBlock&, const AssignBlock&) = default;
};
struct OutputBlock {
  std::vector<std::string> label_nested;
  bool label_nested_all = false;
  SourcePos pos;
  friend bool operator==(const OutputBlock&, const OutputBlock&) = default;
};

using Block =
    std::variant<UnitsBlock, TrtsBlock, RcrdsBlock, ExpectBlock, AllotBlock, AssignBlock, OutputBlock>;

struct SpecAst {
  std::optional<std::string> title;
  std::vector<Block> blocks;
  friend bool operator==(const SpecAst&, const SpecAst&) = default;
};

class SpecError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Semantic };

  SpecError(Kind kind, int line, int column, std::string token, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string token_;
};

/// Syntax then semantic check; throws SpecError.
SpecAst parse_spec(std::string_view text);
/// Semantic check only: names declared before use, roles respected.
void check_spec(const SpecAst& ast);
/// Canonical text; parse_spec(unparse(ast)) == ast.
std::string unparse(const SpecAst& ast);

struct BuildOptions {
  /// Overrides any seed in the spec.
  std::optional<std::uint64_t> seed;
};

/// Everything a spec produces short of serving: the design after allotment
/// and assignment, and the output settings.
struct BuiltSpec {
  Design design;
  ServeOptions serve;
  /// Seed actually used for assignment (spec, override, or drawn).
  std::optional<std::uint64_t> seed;
};

/// Runs the builder pipeline; throws DesignError.
BuiltSpec build_spec(const SpecAst& ast, const BuildOptions& options = {});

struct RunFlags {
  std::optional<std::string> out;     // design CSV
  std::optional<std::string> export_dir;
  bool overwrite = false;
  std::optional<std::string> graph_which;  // "factors" | "levels"
  std::optional<std::string> graph_file;
  std::string graph_format = "dot";
  bool tree = false;
  std::optional<std::uint64_t> seed;
  bool autofill = false;
  std::size_t max_rows = 6;
};

/// Seed precedence helper: flag > spec > DESGRAPH_SEED > none.
std::optional<std::uint64_t> env_seed();

/// Runs a parsed spec and writes requested artifacts. Returns the process exit
/// status: 0 on success, 1 on a pipeline error.
int run_spec(const SpecAst& ast, const RunFlags& flags, std::ostream& out, std::ostream& err);

}  // namespace desgraph::dsl
