#include <gtest/gtest.h>

#include "support.hpp"

using namespace desgraph;
using namespace desgraph::dsl;

namespace {

const char* kGolden[] = {"calf.des", "complex.des", "complexd.des", "garden.des", "composition.des", "field.des"};

SpecError spec_error(std::string_view text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return SpecError(SpecError::Kind::Syntax, 0, 0, "", "");
}

}  // namespace

TEST(Dsl, CalfAst) {
  SpecAst want;
  want.title = "Calf feeding";
  want.blocks.push_back(UnitsBlock{{{"pen", count(8), {}}, {"calf", nested_in("pen", 10), {}}}});
  want.blocks.push_back(RcrdsBlock{{{{"weight"}, "calf", {}}}});
  want.blocks.push_back(TrtsBlock{{{"hay", count(2), {}}, {"antiscour", count(2), {}}}});
  want.blocks.push_back(AllotBlock{{{{"hay"}, "pen", {}}, {{"antiscour"}, "calf", {}}}});
  AssignBlock assign;
  assign.order = {"random"};
  assign.seed = 42;
  want.blocks.push_back(assign);
  EXPECT_EQ(parse_spec(support::slurp(support::data_path("calf.des"))), want);
}

TEST(Dsl, Specs) {
  const auto ast = parse_spec(
      "design\n"
      "units:\n"
      "  site = 2\n"
      "  col = nested_in(site, [a, \"b\"] ~ 3, . ~ 2)\n"
      "  row = lvls([1, 2, x])\n"
      "  plot = crossed_by(col, row)\n"
      "trts:\n"
      "  dose = 1:3\n"
      "  f = [\"none\", \"A\"]\n"
      "  g = conditioned_on(f, \"none\" ~ [0], . ~ [1, 2])\n"
      "allot:\n"
      "  dose:g ~ plot\n"
      "assign: order = [random], seed = 4, constrain: plot = [site]\n"
      "output:\n"
      "  label_nested = *\n");
  EXPECT_FALSE(ast.title);
  const auto& units = std::get<UnitsBlock>(ast.blocks[0]);
  const auto& col = std::get<NestedSpec>(units.decls[1].spec);
  const auto& rules = std::get<std::vector<PerParentRule>>(col.inner);
  EXPECT_EQ(rules[0], when({"a", "b"}, count(3)));
  EXPECT_EQ(rules[1], otherwise(count(2)));
  EXPECT_EQ(std::get<ValuesSpec>(units.decls[2].spec), lvls({1.0, 2.0, std::string("x")}));
  const auto& trts = std::get<TrtsBlock>(ast.blocks[1]);
  EXPECT_EQ(std::get<ValuesSpec>(trts.decls[0].spec), values(std::vector<double>{1, 2, 3}));
  const auto& assign = std::get<AssignBlock>(ast.blocks[3]);
  EXPECT_EQ(assign.seed, std::optional<std::uint64_t>(4));
  ASSERT_EQ(assign.constrain.size(), 1u);
  EXPECT_EQ(assign.constrain[0].factors, std::vector<std::string>{"site"});
  EXPECT_TRUE(std::get<OutputBlock>(ast.blocks[4]).label_nested_all);
  EXPECT_EQ(parse_spec(unparse(ast)), ast);
}

TEST(Dsl, Expect) {
  const auto ast = parse_spec(
      "design \"x\"\nunits:\n  plot = 2\nrcrds:\n  y, g of plot\nexpect:\n  y >= 0\n  y < 1.5\n  g in [lo, hi]\n");
  const auto& e = std::get<ExpectBlock>(ast.blocks[2]);
  ASSERT_EQ(e.decls.size(), 3u);
  EXPECT_EQ(std::get<BoundExpr>(e.decls[0].rule), rcrd("y") >= 0);
  EXPECT_EQ(std::get<BoundExpr>(e.decls[1].rule), rcrd("y") < 1.5);
  EXPECT_EQ(std::get<LevelsExpr>(e.decls[2].rule), factor_levels("g", {"lo", "hi"}));
}

TEST(Dsl, EmptyInput) {
  const auto e = spec_error("");
  EXPECT_EQ(e.kind(), SpecError::Kind::Syntax);
  EXPECT_NE(std::string(e.what()).find("expected 'design'"), std::string::npos);
  EXPECT_EQ(e.line(), 1);
}

TEST(Dsl, SemanticErrors) {
  const std::string calf = support::slurp(support::data_path("calf.des"));
  auto undeclared = calf;
  undeclared.replace(undeclared.find("nested_in(pen"), 13, "nested_in(pig");
  auto e = spec_error(undeclared);
  EXPECT_EQ(e.kind(), SpecError::Kind::Semantic);
  EXPECT_EQ(e.line(), 5);
  EXPECT_NE(std::string(e.what()).find("pig"), std::string::npos);

  e = spec_error("design\nunits:\n  u = 2\ntrts:\n  t = 2\nallot:\n  u ~ t\n");
  EXPECT_EQ(e.kind(), SpecError::Kind::Semantic);
  EXPECT_EQ(e.line(), 7);
  e = spec_error("design\nunits:\n  u = 2\n  u = 3\n");
  EXPECT_EQ(e.line(), 4);
  e = spec_error("design\nunits:\n  u = 2\nrcrds:\n  y of v\n");
  EXPECT_NE(std::string(e.what()).find("'v'"), std::string::npos);
}

TEST(Dsl, GoldenRoundTrip) {
  for (const char* name : kGolden) {
    const auto ast = parse_spec(support::slurp(support::data_path(name)));
    const auto text = unparse(ast);
    EXPECT_EQ(parse_spec(text), ast) << name;
    EXPECT_EQ(unparse(parse_spec(text)), text) << name;
  }
}

TEST(Dsl, CorruptionReportedAtLine) {
  for (const char* name : kGolden) {
    const std::string src = support::slurp(support::data_path(name));
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i] == '\n') starts.push_back(i + 1);
    }
    for (std::size_t l = 0; l + 1 < starts.size(); ++l) {
      const std::size_t at = src.find_first_of("=~(", starts[l]);
      if (at == std::string::npos || at >= starts[l + 1]) continue;
      std::string bad = src;
      bad.insert(at, "% ");
      const auto e = spec_error(bad);
      EXPECT_EQ(e.kind(), SpecError::Kind::Syntax) << name;
      EXPECT_EQ(e.line(), static_cast<int>(l + 1)) << name << ": " << e.what();
      EXPECT_EQ(e.column(), static_cast<int>(at - starts[l] + 1)) << name;
    }
  }
}

TEST(Dsl, BuildMatchesLibrary) {
  Design d("Calf feeding");
  set_units(d, {{"pen", count(8)}, {"calf", nested_in("pen", 10)}});
  set_rcrds(d, {{"weight", "calf"}});
  set_trts(d, {{"hay", count(2)}, {"antiscour", count(2)}});
  allot_trts(d, {formula("hay ~ pen"), formula("antiscour ~ calf")});
  AssignOptions o;
  o.seed = 42;
  assign_trts(d, o);
  const auto built = build_spec(parse_spec(support::slurp(support::data_path("calf.des"))));
  EXPECT_EQ(serve_table(built.design), serve_table(d));
  EXPECT_EQ(print_tree(built.design), print_tree(d));
  EXPECT_EQ(built.seed, std::optional<std::uint64_t>(42));
  EXPECT_EQ(build_spec(parse_spec(support::slurp(support::data_path("calf.des"))), BuildOptions{7}).seed,
            std::optional<std::uint64_t>(7));
}

TEST(Dsl, RunSpecStreams) {
  const auto ast = parse_spec(support::slurp(support::data_path("calf.des")));
  std::ostringstream out, err;
  RunFlags flags;
  flags.tree = true;
  EXPECT_EQ(run_spec(ast, flags, out, err), 0);
  EXPECT_EQ(out.str().rfind("Calf feeding\n", 0), 0u);
  std::ostringstream out2, err2;
  auto missing = parse_spec("design\nunits:\n  u = 2\ntrts:\n  t = 2\nallot:\n  t ~ u\n");
  EXPECT_EQ(run_spec(missing, {}, out2, err2), 1);
  EXPECT_NE(err2.str().find("error[UnassignedTreatments]"), std::string::npos);
}
