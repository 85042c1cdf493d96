#include <gtest/gtest.h>

#include "json.hpp"
#include "support.hpp"

using namespace desgraph;

namespace {

Design complexd() {
  Design d("Complex structure with different dimensions");
  set_units(d, {{"site", values(std::vector<std::string>{"Narrabri", "Horsham", "Parkes", "Roseworthy"})},
                {"col", nested_in("site", {when({"Narrabri", "Roseworthy"}, count(9)), otherwise(count(6))})},
                {"row", nested_in("site", 3)},
                {"plot", nested_in("site", crossed_by({"row", "col"}))}});
  return d;
}

Design factrtc() {
  Design d("Factorial treatment with control");
  set_trts(d, {{"variety", values(std::vector<std::string>{"a", "b"})},
               {"fertilizer", values(std::vector<std::string>{"none", "A", "B"})},
               {"amount", conditioned_on("fertilizer", {when({"none"}, values(std::vector<double>{0})),
                                                        otherwise(values(std::vector<double>{0.5, 1, 2}))})}});
  return d;
}

}  // namespace

TEST(Design, KeepsTitle) {
  Design d("Wheat field trial");
  EXPECT_EQ(d.title(), "Wheat field trial");
  EXPECT_TRUE(d.factors().empty());
}

TEST(Design, DefaultTitle) {
  Design d;
  EXPECT_EQ(d.title(), "An edibble design");
  EXPECT_EQ(print_tree(d), "An edibble design\n");
}

TEST(Design, DemoTree) {
  Design d("Demo for defining units");
  set_units(d, {{"site", count(4)}});
  EXPECT_EQ(print_tree(d), "Demo for defining units\n\\-site (4 levels)\n");
}

TEST(Design, CombinedTree) {
  const Design d = complexd() + factrtc();
  EXPECT_EQ(print_tree(d),
            "Complex structure with different dimensions\n"
            "+-site (4 levels)\n"
            "| +-col (30 levels)\n"
            "| | \\-plot (90 levels)\n"
            "| +-row (12 levels)\n"
            "| | \\-plot (90 levels)\n"
            "| \\-plot (90 levels)\n"
            "+-variety (2 levels)\n"
            "+-fertilizer (3 levels)\n"
            "\\-amount (4 levels)\n");
}

TEST(Design, CombineEmpty) {
  const Design d = combine(Design(), Design());
  EXPECT_TRUE(d.factors().empty());
}

TEST(Design, CombineSelfCollides) {
  const Design d = complexd();
  try {
    combine(d, d);
    FAIL() << "expected DuplicateFactor";
  } catch (const DesignError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateFactor);
  }
}

TEST(Design, DuplicateNameRejected) {
  Design d;
  set_units(d, {{"site", count(4)}});
  EXPECT_THROW(set_units(d, {{"site", count(2)}}), DesignError);
  EXPECT_THROW(set_trts(d, {{"site", count(2)}}), DesignError);
}

TEST(Design, CycleRejected) {
  Design d;
  const auto a = d.add_factor("a", Role::Unit);
  const auto b = d.add_factor("b", Role::Unit);
  d.add_factor_edge(a, b, EdgeKind::Nests);
  try {
    d.add_factor_edge(b, a, EdgeKind::Nests);
    FAIL() << "expected CycleDetected";
  } catch (const DesignError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CycleDetected);
  }
  EXPECT_TRUE(factor_graph_acyclic(d));
}

TEST(GraphExport, CalfFactorsDot) {
  auto built = support::build_file("calf.des");
  const std::string dot = graph_export(built.design, GraphWhich::Factors, GraphFormat::Dot);
  EXPECT_EQ(dot,
            "digraph design {\n"
            "  n0 [label=\"pen (8)\", role=\"unit\"];\n"
            "  n1 [label=\"calf (80)\", role=\"unit\"];\n"
            "  n2 [label=\"weight (0)\", role=\"rcrd\"];\n"
            "  n3 [label=\"hay (2)\", role=\"trt\"];\n"
            "  n4 [label=\"antiscour (2)\", role=\"trt\"];\n"
            "  n0 -> n1 [kind=\"nests\"];\n"
            "  n1 -> n2 [kind=\"records\"];\n"
            "  n3 -> n0 [kind=\"allots\"];\n"
            "  n4 -> n1 [kind=\"allots\"];\n"
            "}\n");
}

TEST(GraphExport, EmptyDesign) {
  const std::string dot = graph_export(Design(), GraphWhich::Factors, GraphFormat::Dot);
  EXPECT_EQ(dot, "digraph design {\n}\n");
  const auto json = nlohmann::json::parse(graph_export(Design(), GraphWhich::Levels, GraphFormat::Json));
  EXPECT_TRUE(json["nodes"].empty());
}

TEST(GraphExport, UnlinkedDemo) {
  Design d;
  set_units(d, {{"site", count(4)}, {"plot", count(72)}});
  const auto json = nlohmann::json::parse(graph_export(d, GraphWhich::Factors, GraphFormat::Json));
  EXPECT_EQ(json["nodes"].size(), 2u);
  EXPECT_EQ(json["edges"].size(), 0u);
}

TEST(GraphExport, LevelJsonCountsCalf) {
  auto built = support::build_file("calf.des");
  const auto json = nlohmann::json::parse(graph_export(built.design, GraphWhich::Levels, GraphFormat::Json));
  EXPECT_EQ(json["nodes"].size(), 8u + 80u + 2u + 2u);
  // 80 calf->pen nesting edges, 8 hay->pen and 80 antiscour->calf assignment edges
  EXPECT_EQ(json["edges"].size(), 80u + 8u + 80u);
  EXPECT_TRUE(level_graph_acyclic(built.design));
}
