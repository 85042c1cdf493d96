#include <gtest/gtest.h>

#include "support.hpp"

using namespace desgraph;
using support::strings;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DesignError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidSpec;
}

DesignTable units_only(const FactorSpecs& specs, ServeOptions opts = {}) {
  Design d("units");
  set_units(d, specs);
  return serve_table(d, opts);
}

}  // namespace

TEST(SetUnits, CountLabels) {
  const auto t = units_only({{"site", count(4)}});
  EXPECT_EQ(strings(t, "site"), (std::vector<std::string>{"site1", "site2", "site3", "site4"}));
  EXPECT_EQ(t.column("site").type, ValueType::Text);
}

TEST(SetUnits, PaddedLabels) {
  const auto t = units_only({{"pen", count(8)}, {"calf", nested_in("pen", 10)}});
  EXPECT_EQ(t.rows(), 80u);
  EXPECT_EQ(strings(t, "calf").front(), "calf01");
  EXPECT_EQ(strings(t, "calf").back(), "calf80");
}

TEST(SetUnits, TextValues) {
  const auto t = units_only({{"site", values(std::vector<std::string>{"Narrabri", "Horsham", "Parkes", "Roseworthy"})}});
  EXPECT_EQ(strings(t, "site"), (std::vector<std::string>{"Narrabri", "Horsham", "Parkes", "Roseworthy"}));
}

TEST(SetUnits, NumericValuesKeepType) {
  const auto t = units_only({{"site", values(std::vector<double>{1, 2, 3, 4})}});
  EXPECT_EQ(t.rows(), 4u);
  EXPECT_EQ(t.column("site").type, ValueType::Numeric);
}

TEST(SetUnits, SingleLevel) {
  const auto t = units_only({{"site", lvls({4.0})}});
  EXPECT_EQ(t.rows(), 1u);
  EXPECT_EQ(strings(t, "site"), (std::vector<std::string>{"4"}));
}

TEST(SetUnits, NestedCount) {
  Design d;
  set_units(d, {{"site", count(4)}, {"plot", nested_in("site", 18)}});
  const auto plots = d.levels_of(d.require("plot"));
  ASSERT_EQ(plots.size(), 72u);
  const auto site = d.require("site");
  for (LevelId p : plots) {
    std::size_t parents = 0;
    for (LevelId q : d.level_parents(p)) parents += d.level(q).factor == site;
    EXPECT_EQ(parents, 1u);
  }
}

TEST(SetUnits, Crossed) {
  const auto t = units_only({{"row", count(6)}, {"col", count(3)}, {"plot", crossed_by({"row", "col"})}});
  EXPECT_EQ(t.rows(), 18u);
  EXPECT_EQ(t.cols(), 3u);
}

TEST(SetUnits, NestedCrossedLabels) {
  ServeOptions opts;
  opts.label_nested = {"row", "col"};
  const auto t = units_only({{"site", values(std::vector<std::string>{"Narrabri", "Horsham", "Parkes", "Roseworthy"})},
                             {"col", nested_in("site", 6)},
                             {"row", nested_in("site", 3)},
                             {"plot", nested_in("site", crossed_by({"row", "col"}))}},
                            opts);
  ASSERT_EQ(t.rows(), 72u);
  const auto col = strings(t, "col"), row = strings(t, "row"), plot = strings(t, "plot");
  EXPECT_EQ(col[0], "col1");
  EXPECT_EQ(row[0], "row1");
  EXPECT_EQ(row[1], "row2");
  EXPECT_EQ(col[3], "col2");
  EXPECT_EQ(plot[0], "plot01");
  EXPECT_EQ(strings(t, "site")[18], "Horsham");
  EXPECT_EQ(col[18], "col1");
  EXPECT_EQ(plot[18], "plot19");
}

TEST(SetUnits, DistinctLabelsAreGlobal) {
  const auto t = units_only({{"site", count(4)}, {"col", nested_in("site", 6)}, {"row", nested_in("site", 3)},
                             {"plot", nested_in("site", crossed_by({"row", "col"}))}});
  EXPECT_EQ(strings(t, "col")[18], "col07");
  EXPECT_EQ(strings(t, "row")[18], "row04");
  EXPECT_EQ(t.column("col").level_count, 24u);
  EXPECT_EQ(t.column("row").level_count, 12u);
}

TEST(SetUnits, Errors) {
  EXPECT_EQ(kind_of([] { units_only({{"plot", nested_in("site", 3)}}); }), ErrorKind::UnknownParent);
  EXPECT_EQ(kind_of([] { units_only({{"plot", count(0)}}); }), ErrorKind::EmptySpec);
  EXPECT_EQ(kind_of([] { units_only({{"row", count(3)}, {"plot", crossed_by({"row"})}}); }),
            ErrorKind::FewerThanTwoParents);
  EXPECT_EQ(kind_of([] {
              units_only({{"site", values(std::vector<std::string>{"a", "b"})},
                          {"plot", nested_in("site", {when({"a"}, count(2))})}});
            }),
            ErrorKind::IncompleteRules);
}

TEST(SetUnits, WildcardBindsAfterExplicit) {
  Design d;
  set_units(d, {{"site", values(std::vector<std::string>{"a", "b", "c"})},
                {"plot", nested_in("site", {otherwise(count(2)), when({"b"}, count(5))})}});
  EXPECT_EQ(d.levels_of(d.require("plot")).size(), 9u);
}

TEST(SetTrts, Crossed) {
  Design d;
  set_trts(d, {{"variety", values(std::vector<std::string>{"a", "b"})},
               {"fertilizer", values(std::vector<std::string>{"A", "B"})},
               {"amount", values(std::vector<double>{0.5, 1, 2})}});
  const auto t = as_table(d, trts_table(d));
  ASSERT_EQ(t.rows(), 12u);
  ASSERT_EQ(t.cols(), 3u);
  EXPECT_EQ(strings(t, "variety"), (std::vector<std::string>{"a", "b", "a", "b", "a", "b", "a", "b", "a", "b", "a", "b"}));
  EXPECT_EQ(strings(t, "fertilizer"),
            (std::vector<std::string>{"A", "A", "B", "B", "A", "A", "B", "B", "A", "A", "B", "B"}));
  EXPECT_EQ(strings(t, "amount"),
            (std::vector<std::string>{"0.5", "0.5", "0.5", "0.5", "1", "1", "1", "1", "2", "2", "2", "2"}));
}

TEST(SetTrts, CountLabels) {
  Design d;
  set_trts(d, {{"feed", count(4)}});
  const auto t = as_table(d, trts_table(d));
  EXPECT_EQ(strings(t, "feed"), (std::vector<std::string>{"feed1", "feed2", "feed3", "feed4"}));
}

TEST(SetTrts, RepeatedCallsEqualSingleCall) {
  Design a, b;
  set_trts(a, {{"hay", count(2)}});
  set_trts(a, {{"antiscour", count(2)}});
  set_trts(b, {{"hay", count(2)}, {"antiscour", count(2)}});
  EXPECT_EQ(print_tree(a), print_tree(b));
  EXPECT_EQ(graph_export(a, GraphWhich::Levels, GraphFormat::Json), graph_export(b, GraphWhich::Levels, GraphFormat::Json));
}

TEST(SetTrts, Conditioned) {
  Design d;
  set_trts(d, {{"variety", values(std::vector<std::string>{"a", "b"})},
               {"fertilizer", values(std::vector<std::string>{"none", "A", "B"})},
               {"amount", conditioned_on("fertilizer", {when({"none"}, values(std::vector<double>{0})),
                                                        otherwise(values(std::vector<double>{0.5, 1, 2}))})}});
  EXPECT_EQ(d.levels_of(d.require("amount")).size(), 4u);
  const auto t = as_table(d, trts_table(d));
  ASSERT_EQ(t.rows(), 14u);
  EXPECT_EQ(strings(t, "fertilizer"),
            (std::vector<std::string>{"none", "none", "A", "A", "A", "A", "A", "A", "B", "B", "B", "B", "B", "B"}));
  EXPECT_EQ(strings(t, "amount"),
            (std::vector<std::string>{"0", "0", "0.5", "0.5", "1", "1", "2", "2", "0.5", "0.5", "1", "1", "2", "2"}));
  EXPECT_EQ(strings(t, "variety")[0], "a");
  EXPECT_EQ(strings(t, "variety")[1], "b");
}

TEST(SetTrts, ConditionedIncomplete) {
  Design d;
  set_trts(d, {{"fertilizer", values(std::vector<std::string>{"none", "A"})}});
  EXPECT_EQ(kind_of([&] {
              set_trts(d, {{"amount", conditioned_on("fertilizer", {when({"none"}, values(std::vector<double>{0}))})}});
            }),
            ErrorKind::IncompleteRules);
}

TEST(TrtsTable, SingleAndEmpty) {
  Design d;
  EXPECT_EQ(kind_of([&] { trts_table(d); }), ErrorKind::NoTreatments);
  set_trts(d, {{"trt", count(3)}});
  EXPECT_EQ(trts_table(d).rows.size(), 3u);
}

TEST(SetRcrds, OnUnit) {
  const auto t = support::serve_file("calf.des");
  const auto& w = t.column("weight");
  EXPECT_EQ(w.role, Role::Record);
  EXPECT_EQ(w.level_count, 80u);
  EXPECT_FALSE(w.filled);
}

TEST(SetRcrds, EquivalentForms) {
  auto base = [] {
    Design d;
    set_units(d, {{"site", count(4)}, {"plot", nested_in("site", 3)}});
    return d;
  };
  Design a = base(), b = base();
  set_rcrds(a, {{"biomass", "plot"}, {"yield", "plot"}, {"rainfall", "site"}});
  set_rcrds_of(b, {{"plot", {"biomass", "yield"}}, {"site", {"rainfall"}}});
  EXPECT_EQ(a.factors_with_role(Role::Record).size(), 3u);
  EXPECT_EQ(graph_export(a, GraphWhich::Factors, GraphFormat::Json), graph_export(b, GraphWhich::Factors, GraphFormat::Json));
  Design c = base();
  set_rcrds_of(c, {{"plot", {}}});
  EXPECT_TRUE(c.factors_with_role(Role::Record).empty());
}

TEST(SetRcrds, Errors) {
  Design d;
  set_units(d, {{"calf", count(4)}});
  set_trts(d, {{"hay", count(2)}});
  EXPECT_EQ(kind_of([&] { set_rcrds(d, {{"weight", "hay"}}); }), ErrorKind::TargetNotAUnit);
  EXPECT_EQ(kind_of([&] { set_rcrds(d, {{"weight", "pen"}}); }), ErrorKind::UnknownUnit);
}

TEST(SetRcrds, ManyOnOneUnit) {
  const auto t = support::serve_file("composition.des");
  for (const auto& r : {"accuracy", "structure", "context", "richness", "overall"}) {
    EXPECT_EQ(t.column(r).role, Role::Record);
  }
}
