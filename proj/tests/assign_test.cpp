#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace desgraph;
using support::by_group;
using support::strings;
using support::tally;

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

std::vector<std::string> trt_for(const std::string& order, std::uint64_t seed = 1) {
  Design d;
  set_units(d, {{"unit", count(10)}});
  set_trts(d, {{"trt", count(3)}});
  allot_trts(d, {formula("trt ~ unit")});
  AssignOptions o;
  o.order = {order};
  o.seed = seed;
  assign_trts(d, o);
  return strings(serve_table(d), "trt");
}

std::vector<std::string> labels(std::initializer_list<int> idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back("trt" + std::to_string(i));
  return out;
}

Design site_plot() {
  Design d;
  set_units(d, {{"site", count(4)}, {"plot", count(72)}});
  allot_units(d, {formula("site ~ plot")});
  return d;
}

}  // namespace

TEST(Formula, Parses) {
  const auto f = formula("amount:variety ~ plot");
  EXPECT_EQ(f.lhs, (std::vector<std::string>{"amount", "variety"}));
  EXPECT_EQ(f.rhs, "plot");
}

TEST(Allot, Kinds) {
  auto built = support::build_file("field.des");
  const auto& a = built.design.allotments();
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].lhs.size(), 2u);
  EXPECT_EQ(a[0].kind, AllotKind::TrtsToUnit);
  Design g = site_plot();
  ASSERT_EQ(g.allotments().size(), 1u);
  EXPECT_EQ(g.allotments()[0].kind, AllotKind::UnitToUnit);
}

TEST(Allot, Errors) {
  Design d;
  set_units(d, {{"plot", count(4)}, {"pen", count(2)}});
  set_trts(d, {{"trt", count(2)}});
  EXPECT_EQ(kind_of([&] { allot_trts(d, {formula("dose ~ plot")}); }), ErrorKind::UnknownFactor);
  EXPECT_EQ(kind_of([&] { allot_trts(d, {formula("pen ~ plot")}); }), ErrorKind::RoleMismatch);
  EXPECT_EQ(kind_of([&] { allot_trts(d, {formula("trt ~ trt")}); }), ErrorKind::RoleMismatch);
  allot_trts(d, {formula("trt ~ plot")});
  EXPECT_EQ(kind_of([&] { allot_trts(d, {formula("trt ~ pen")}); }), ErrorKind::DuplicateAllotment);
  EXPECT_EQ(kind_of([&] { allot_units(d, {formula("plot ~ plot")}); }), ErrorKind::SelfAllotment);
}

TEST(Assign, SystematicFastest) {
  EXPECT_EQ(trt_for("systematic-fastest"), labels({1, 2, 3, 1, 2, 3, 1, 2, 3, 1}));
  EXPECT_EQ(trt_for("systematic"), trt_for("systematic-fastest"));
  EXPECT_EQ(trt_for("systematic-fastest", 1), trt_for("systematic-fastest", 99));
}

TEST(Assign, SystematicSlowest) {
  EXPECT_EQ(trt_for("systematic-slowest"), labels({1, 1, 1, 1, 2, 2, 2, 3, 3, 3}));
  auto fast = trt_for("systematic-fastest");
  std::sort(fast.begin(), fast.end());
  EXPECT_EQ(trt_for("systematic-slowest"), fast);
}

TEST(Assign, SystematicRandomIsShuffledFastest) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto v = trt_for("systematic-random", seed);
    EXPECT_EQ(v, trt_for("systematic-random-fastest", seed));
    const std::set<std::string> head(v.begin(), v.begin() + 3);
    EXPECT_EQ(head.size(), 3u);
    for (std::size_t i = 3; i < v.size(); ++i) EXPECT_EQ(v[i], v[i % 3]);
    const auto s = trt_for("systematic-random-slowest", seed);
    EXPECT_EQ(s[0], s[3]);
    EXPECT_NE(s[3], s[4]);
  }
}

TEST(Assign, CalfHayConstantWithinPen) {
  const auto t = support::serve_file("calf.des", 5);
  for (const auto& [pen, hay] : by_group(strings(t, "pen"), strings(t, "hay"))) EXPECT_EQ(hay.size(), 1u);
}

TEST(Assign, UnitsFastestAndSlowest) {
  Design a = site_plot();
  AssignOptions o;
  o.order = {"systematic-fastest"};
  assign_units(a, o);
  const auto fast = strings(serve_table(a), "site");
  EXPECT_EQ(std::vector<std::string>(fast.begin(), fast.begin() + 6),
            (std::vector<std::string>{"site1", "site2", "site3", "site4", "site1", "site2"}));
  Design b = site_plot();
  o.order = {"systematic-slowest"};
  assign_units(b, o);
  const auto slow = strings(serve_table(b), "site");
  for (std::size_t i = 0; i < 18; ++i) EXPECT_EQ(slow[i], "site1");
  EXPECT_EQ(slow[18], "site2");
}

TEST(Assign, GardenBlocksRunOverFourRows) {
  auto built = support::build_file("garden.des");
  const auto t = serve_table(built.design, ServeOptions{{"row", "block"}, false});
  const auto row = strings(t, "row"), block = strings(t, "block");
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const int r = std::stoi(row[i].substr(3));
    EXPECT_EQ(block[i], r <= 4 ? "block1" : "block2");
  }
}

TEST(Assign, RandomBalancedWithinGroups) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Design d;
    set_units(d, {{"block", count(3)}, {"unit", nested_in("block", 7)}});
    set_trts(d, {{"trt", count(3)}});
    allot_trts(d, {formula("trt ~ unit")});
    AssignOptions o;
    o.seed = seed;
    assign_trts(d, o);
    const auto t = serve_table(d);
    for (const auto& [b, counts] : by_group(strings(t, "block"), strings(t, "trt"))) {
      ASSERT_EQ(counts.size(), 3u);
      for (const auto& [lvl, n] : counts) EXPECT_TRUE(n == 2 || n == 3);
    }
  }
}

TEST(Assign, InteractionBalancesJointLevels) {
  auto make = [](const std::vector<AllotFormula>& f, std::uint64_t seed) {
    Design d;
    set_units(d, {{"block", count(4)}, {"plot", nested_in("block", 6)}});
    set_trts(d, {{"amount", count(3)}, {"variety", count(2)}});
    allot_trts(d, f);
    AssignOptions o;
    o.seed = seed;
    assign_trts(d, o);
    return serve_table(d);
  };
  std::size_t unbalanced = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto joint = make({formula("amount:variety ~ plot")}, seed);
    std::vector<std::string> combo;
    const auto a = strings(joint, "amount"), v = strings(joint, "variety");
    for (std::size_t i = 0; i < a.size(); ++i) combo.push_back(a[i] + ":" + v[i]);
    for (const auto& [b, counts] : by_group(strings(joint, "block"), combo)) EXPECT_EQ(counts.size(), 6u);

    const auto sep = make({formula("amount ~ plot"), formula("variety ~ plot")}, seed);
    const auto sa = strings(sep, "amount"), sv = strings(sep, "variety"), blocks = strings(sep, "block");
    for (const auto& [b, counts] : by_group(blocks, sa)) {
      for (const auto& [lvl, n] : counts) EXPECT_EQ(n, 2u);
    }
    std::vector<std::string> scombo;
    for (std::size_t i = 0; i < sa.size(); ++i) scombo.push_back(sa[i] + ":" + sv[i]);
    for (const auto& [b, counts] : by_group(blocks, scombo)) unbalanced += counts.size() != 6;
  }
  EXPECT_GT(unbalanced, 0u);
}

TEST(Assign, ConstraintWithinRow) {
  auto ast = dsl::parse_spec(support::slurp(support::data_path("field.des")));
  for (auto& b : ast.blocks) {
    if (auto* a = std::get_if<dsl::AssignBlock>(&b)) {
      a->constrain = {{"row", {"site"}, {}}, {"plot", {"row"}, {}}};
    }
  }
  const auto built = dsl::build_spec(ast);
  const auto t = serve_table(built.design);
  const auto row = strings(t, "row"), a = strings(t, "amount"), v = strings(t, "variety");
  std::vector<std::string> combo;
  for (std::size_t i = 0; i < a.size(); ++i) combo.push_back(a[i] + ":" + v[i]);
  const auto fert = by_group(row, strings(t, "fertilizer"));
  for (const auto& [r, counts] : by_group(row, combo)) {
    const std::size_t classes = fert.at(r).begin()->first == "none" ? 2 : 6;
    std::size_t lo = 1000, hi = 0, total = 0;
    for (const auto& [c, n] : counts) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
      total += n;
    }
    if (counts.size() < classes) lo = 0;
    EXPECT_LE(hi - lo, 1u) << r;
    EXPECT_TRUE(total == 6 || total == 9);
  }
}

TEST(Assign, ConditionedAmountFollowsFertilizer) {
  const auto t = support::serve_file("field.des", 3);
  const auto f = strings(t, "fertilizer"), a = strings(t, "amount");
  for (std::size_t i = 0; i < t.rows(); ++i) EXPECT_EQ(f[i] == "none", a[i] == "0");
}

TEST(Assign, Errors) {
  Design d;
  set_units(d, {{"unit", count(4)}});
  set_trts(d, {{"trt", count(2)}});
  EXPECT_EQ(kind_of([&] { assign_trts(d); }), ErrorKind::NoAllotment);
  allot_trts(d, {formula("trt ~ unit")});
  AssignOptions o;
  o.order = {"no-such-order"};
  EXPECT_EQ(kind_of([&] { assign_trts(d, o); }), ErrorKind::UnknownOrdering);
  o.order = {"random"};
  o.constrain = {{"unit", {"unit"}}};
  EXPECT_EQ(kind_of([&] { assign_trts(d, o); }), ErrorKind::ConstraintRefersToNonAncestor);
}

TEST(Assign, SeedRecorded) {
  Design d;
  set_units(d, {{"unit", count(4)}});
  set_trts(d, {{"trt", count(2)}});
  allot_trts(d, {formula("trt ~ unit")});
  assign_trts(d);
  ASSERT_TRUE(d.seed().has_value());
  Design e;
  set_units(e, {{"unit", count(4)}});
  set_trts(e, {{"trt", count(2)}});
  allot_trts(e, {formula("trt ~ unit")});
  AssignOptions o;
  o.seed = d.seed();
  assign_trts(e, o);
  EXPECT_EQ(table_to_csv(serve_table(d)), table_to_csv(serve_table(e)));
}

TEST(Registry, ReservedAndDuplicate) {
  OrderingRegistry reg;
  auto fn = [](const OrderingContext& ctx) { return std::vector<std::size_t>(ctx.units.rows.size(), 0); };
  EXPECT_EQ(kind_of([&] { reg.add("random", fn); }), ErrorKind::ReservedName);
  EXPECT_EQ(kind_of([&] { reg.add("systematic", fn); }), ErrorKind::ReservedName);
  reg.add("zeros", fn);
  EXPECT_EQ(kind_of([&] { reg.add("zeros", fn); }), ErrorKind::DuplicateOrdering);
}

TEST(Registry, ContractViolations) {
  OrderingRegistry reg;
  reg.add("short", [](const OrderingContext&) { return std::vector<std::size_t>{0}; });
  reg.add("wild", [](const OrderingContext& ctx) { return std::vector<std::size_t>(ctx.units.rows.size(), 7); });
  reg.add("last", [](const OrderingContext& ctx) {
    return std::vector<std::size_t>(ctx.units.rows.size(), ctx.trts.rows.size() - 1);
  });
  auto run = [&](const std::string& name) {
    Design d;
    set_units(d, {{"unit", count(4)}});
    set_trts(d, {{"trt", count(2)}});
    allot_trts(d, {formula("trt ~ unit")});
    AssignOptions o;
    o.order = {name};
    o.registry = &reg;
    assign_trts(d, o);
    return serve_table(d);
  };
  EXPECT_EQ(kind_of([&] { run("short"); }), ErrorKind::LengthMismatch);
  EXPECT_EQ(kind_of([&] { run("wild"); }), ErrorKind::InvalidAssignment);
  EXPECT_EQ(strings(run("last"), "trt"), (std::vector<std::string>(4, "trt2")));
}

namespace {

std::map<std::pair<std::size_t, std::size_t>, std::size_t> carryover(const std::vector<std::vector<std::size_t>>& sq) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> out;
  for (std::size_t c = 0; c < sq.front().size(); ++c) {
    for (std::size_t r = 1; r < sq.size(); ++r) ++out[{sq[r - 1][c], sq[r][c]}];
  }
  return out;
}

}  // namespace

TEST(Williams, TwoByTwo) {
  EXPECT_EQ(williams_square(2), (std::vector<std::vector<std::size_t>>{{0, 1}, {1, 0}}));
}

TEST(Williams, EvenOrdersBalanced) {
  for (std::size_t t : {2u, 4u, 6u, 8u, 10u}) {
    const auto sq = williams_square(t);
    ASSERT_EQ(sq.size(), t);
    for (std::size_t i = 0; i < t; ++i) {
      std::set<std::size_t> row(sq[i].begin(), sq[i].end()), col;
      for (std::size_t r = 0; r < t; ++r) col.insert(sq[r][i]);
      EXPECT_EQ(row.size(), t);
      EXPECT_EQ(col.size(), t);
    }
    const auto pairs = carryover(sq);
    EXPECT_EQ(pairs.size(), t * (t - 1));
    for (const auto& [p, n] : pairs) {
      EXPECT_NE(p.first, p.second);
      EXPECT_EQ(n, 1u);
    }
  }
}

TEST(Williams, OddOrdersUseTwoSquares) {
  for (std::size_t t : {3u, 5u, 7u, 9u}) {
    const auto sq = williams_square(t);
    ASSERT_EQ(sq.front().size(), 2 * t);
    const auto pairs = carryover(sq);
    EXPECT_EQ(pairs.size(), t * (t - 1));
    for (const auto& [p, n] : pairs) EXPECT_EQ(n, 2u);
    for (std::size_t c = 0; c < 2 * t; ++c) {
      std::set<std::size_t> col;
      for (std::size_t r = 0; r < t; ++r) col.insert(sq[r][c]);
      EXPECT_EQ(col.size(), t);
    }
  }
}

namespace {

DesignTable williams_design(std::size_t raters, std::size_t orders, std::size_t trts, bool third = false) {
  OrderingRegistry reg;
  reg.add("williams", ordering_williams);
  Design d;
  FactorSpecs units = {{"rater", count(raters)}, {"order", count(orders)}};
  if (third) units.push_back({"session", count(2)});
  units.push_back({"assess", third ? crossed_by({"rater", "order", "session"}) : crossed_by({"rater", "order"})});
  set_units(d, units);
  set_trts(d, {{"comp", count(trts)}});
  allot_trts(d, {formula("comp ~ assess")});
  AssignOptions o;
  o.order = {"williams"};
  o.seed = 4;
  o.registry = &reg;
  assign_trts(d, o);
  return serve_table(d);
}

}  // namespace

TEST(Williams, ThreeFullTiles) {
  const auto t = williams_design(30, 10, 10);
  ASSERT_EQ(t.rows(), 300u);
  const auto rater = strings(t, "rater"), order = strings(t, "order"), comp = strings(t, "comp");
  std::map<std::string, std::map<std::string, std::string>> seq;
  for (std::size_t i = 0; i < t.rows(); ++i) seq[rater[i]][order[i]] = comp[i];
  for (std::size_t tile = 0; tile < 3; ++tile) {
    std::map<std::pair<std::string, std::string>, std::size_t> pairs;
    for (std::size_t r = tile * 10 + 1; r <= tile * 10 + 10; ++r) {
      const std::string name = "rater" + std::string(r < 10 ? "0" : "") + std::to_string(r);
      const auto& s = seq.at(name);
      std::vector<std::string> v;
      for (std::size_t k = 1; k <= 10; ++k) v.push_back(s.at("order" + std::string(k < 10 ? "0" : "") + std::to_string(k)));
      for (std::size_t k = 1; k < 10; ++k) ++pairs[{v[k - 1], v[k]}];
    }
    EXPECT_EQ(pairs.size(), 90u);
    for (const auto& [p, n] : pairs) EXPECT_EQ(n, 1u);
  }
}

TEST(Williams, ContractChecks) {
  EXPECT_EQ(kind_of([] { williams_design(4, 3, 3, true); }), ErrorKind::BadConstraintArity);
  EXPECT_EQ(kind_of([] { williams_design(12, 5, 4); }), ErrorKind::RowCountMismatch);
}
