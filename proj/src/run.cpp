#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "desgraph/assign.hpp"
#include "desgraph/design.hpp"
#include "desgraph/dsl.hpp"
#include "desgraph/error.hpp"
#include "desgraph/records.hpp"
#include "desgraph/serve.hpp"
#include "desgraph/simulate.hpp"

namespace desgraph::dsl {

namespace {

struct AssignSettings {
  std::vector<std::string> order;
  std::vector<std::string> unit_order;
  std::optional<std::uint64_t> seed;
  Constraint constrain;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DesignError(ErrorKind::IoFailure, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw DesignError(ErrorKind::IoFailure, "failed writing '" + path + "'");
}

}  // namespace

BuiltSpec build_spec(const SpecAst& ast, const BuildOptions& options) {
  BuiltSpec built{Design(ast.title), {}, std::nullopt};
  Design& d = built.design;
  AssignSettings settings;
  bool has_trt_allot = false;
  bool has_unit_allot = false;
  bool has_assign = false;

  for (const auto& block : ast.blocks) {
    if (const auto* b = std::get_if<UnitsBlock>(&block)) {
      for (const auto& decl : b->decls) set_units(d, {{decl.name, decl.spec}});
    } else if (const auto* b = std::get_if<TrtsBlock>(&block)) {
      for (const auto& decl : b->decls) set_trts(d, {{decl.name, decl.spec}});
    } else if (const auto* b = std::get_if<RcrdsBlock>(&block)) {
      for (const auto& decl : b->decls) {
        for (const auto& n : decl.names) set_rcrds(d, {{n, decl.unit}});
      }
    } else if (const auto* b = std::get_if<ExpectBlock>(&block)) {
      std::vector<RuleExpr> rules;
      for (const auto& decl : b->decls) rules.push_back(decl.rule);
      expect_rcrds(d, rules);
    } else if (const auto* b = std::get_if<AllotBlock>(&block)) {
      for (const auto& decl : b->decls) {
        AllotFormula f{decl.lhs, decl.rhs};
        const auto id = d.find(decl.lhs.front());
        if (id && d.factor(*id).role == Role::Unit) {
          allot_units(d, {f});
          has_unit_allot = true;
        } else {
          allot_trts(d, {f});
          has_trt_allot = true;
        }
      }
    } else if (const auto* b = std::get_if<AssignBlock>(&block)) {
      has_assign = true;
      if (!b->order.empty()) settings.order = b->order;
      if (!b->unit_order.empty()) settings.unit_order = b->unit_order;
      if (b->seed) settings.seed = b->seed;
      for (const auto& c : b->constrain) settings.constrain[c.unit] = c.factors;
    } else if (const auto* b = std::get_if<OutputBlock>(&block)) {
      built.serve.label_nested = b->label_nested;
      built.serve.label_nested_all = b->label_nested_all;
    }
  }

  std::optional<std::uint64_t> seed = options.seed ? options.seed : settings.seed;
  if (seed) d.set_seed(*seed);
  if (has_assign && has_unit_allot) {
    AssignOptions opts;
    if (!settings.unit_order.empty()) opts.order = settings.unit_order;
    opts.seed = seed;
    opts.constrain = settings.constrain;
    assign_units(d, opts);
    seed = d.seed();
  }
  if (has_assign && has_trt_allot) {
    AssignOptions opts;
    if (!settings.order.empty()) opts.order = settings.order;
    opts.seed = seed;
    opts.constrain = settings.constrain;
    assign_trts(d, opts);
  }
  built.seed = d.seed();
  return built;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("DESGRAPH_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::string_view text(raw);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw DesignError(ErrorKind::InvalidParams, "DESGRAPH_SEED must be a non-negative integer");
  }
  return v;
}

namespace {

bool spec_has_seed(const SpecAst& ast) {
  for (const auto& block : ast.blocks) {
    if (const auto* b = std::get_if<AssignBlock>(&block); b && b->seed) return true;
  }
  return false;
}

}  // namespace

int run_spec(const SpecAst& ast, const RunFlags& flags, std::ostream& out, std::ostream& err) {
  try {
    BuildOptions build;
    if (flags.seed) {
      build.seed = flags.seed;
    } else if (!spec_has_seed(ast)) {
      build.seed = env_seed();
    }
    BuiltSpec built = build_spec(ast, build);
    Design& d = built.design;
    if (flags.autofill && !d.seed()) d.set_seed(entropy_seed());

    if (flags.tree) out << print_tree(d);
    if (flags.graph_which) {
      GraphWhich which;
      if (*flags.graph_which == "factors") {
        which = GraphWhich::Factors;
      } else if (*flags.graph_which == "levels") {
        which = GraphWhich::Levels;
      } else {
        throw DesignError(ErrorKind::InvalidParams, "graph must be 'factors' or 'levels'");
      }
      GraphFormat format;
      if (flags.graph_format == "dot") {
        format = GraphFormat::Dot;
      } else if (flags.graph_format == "json") {
        format = GraphFormat::Json;
      } else {
        throw DesignError(ErrorKind::InvalidParams, "graph format must be 'dot' or 'json'");
      }
      const std::string text = graph_export(d, which, format);
      if (!flags.graph_file || *flags.graph_file == "-") {
        out << text;
      } else {
        write_file(*flags.graph_file, text);
      }
    }
    const bool graph_to_stdout = flags.graph_which && (!flags.graph_file || *flags.graph_file == "-");
    if ((flags.tree || graph_to_stdout) && !flags.out && !flags.export_dir && !flags.autofill) return 0;

    DesignTable table = flags.autofill ? autofill_rcrds(d, SimulateOptions{d.seed(), built.serve})
                                       : serve_table(d, built.serve);
    if (flags.out) write_file(*flags.out, table_to_csv(table));
    if (flags.export_dir) export_design(table, d, *flags.export_dir, flags.overwrite);
    out << render_table(table, RenderOptions{flags.max_rows, "An edibble"});
    return 0;
  } catch (const DesignError& e) {
    err << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace desgraph::dsl
