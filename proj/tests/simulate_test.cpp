#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace desgraph;

namespace {

Design field() {
  auto built = support::build_file("field.des");
  return built.design;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DesignError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidSpec;
}

std::vector<double> numbers(const Column& c) {
  std::vector<double> out;
  for (const auto& v : c.values) out.push_back(std::holds_alternative<double>(v) ? std::get<double>(v) : NAN);
  return out;
}

SimProcess yield_process() {
  return {"yield", {{"mu", {5}}}, [](SimContext& ctx) -> SimOutput {
            std::vector<Value> out;
            for (std::size_t i = 0; i < ctx.n(); ++i) out.push_back(ctx.param("mu")[0] + 3 * ctx.rng().normal());
            return out;
          }};
}

SimProcess joint_process() {
  SimProcess p{".joint", {{"rho", {0.8}}}, [](SimContext& ctx) -> SimOutput {
                 SimColumns cols;
                 const double rho = ctx.param("rho")[0];
                 for (std::size_t i = 0; i < ctx.n(); ++i) {
                   const double z1 = ctx.rng().normal(), z2 = ctx.rng().normal();
                   cols["biomass"].push_back(2 * z1);
                   cols["yield"].push_back(5 + rho * z1 + std::sqrt(1 - rho * rho) * z2);
                 }
                 return cols;
               }};
  p.outputs = {"biomass", "yield"};
  return p;
}

}  // namespace

TEST(Simulate, NamesChecked) {
  auto d = field();
  auto bad = yield_process();
  bad.name = "variety";
  EXPECT_EQ(kind_of([&] { simulate_process(d, {bad}); }), ErrorKind::BadName);
  bad.name = "nothing";
  EXPECT_EQ(kind_of([&] { simulate_process(d, {bad}); }), ErrorKind::BadName);
  auto multi = joint_process();
  multi.outputs = {"biomass", "height"};
  EXPECT_EQ(kind_of([&] { simulate_process(d, {multi}); }), ErrorKind::UnknownRecordColumn);
}

TEST(Simulate, SingleDefaultCensorsToMissing) {
  auto d = field();
  simulate_process(d, {yield_process()});
  const auto t = simulate_rcrds(d, {{"yield", {}, {}}}, {std::uint64_t{7}, {}});
  const auto y = numbers(t.column("yield"));
  std::size_t missing = 0;
  for (double v : y) {
    if (std::isnan(v)) {
      ++missing;
    } else {
      EXPECT_GT(v, 0);
      EXPECT_LT(v, 10);
    }
  }
  EXPECT_GT(missing, 0u);
  EXPECT_LT(missing, y.size());
  EXPECT_FALSE(t.column("biomass").filled);
}

TEST(Simulate, ClampAndNone) {
  auto d = field();
  simulate_process(d, {yield_process()});
  const auto clamped = simulate_rcrds(d, {{"yield", {}, {{"yield", CensorClamp{0.5, 9.5}}}}}, {std::uint64_t{7}, {}});
  for (double v : numbers(clamped.column("yield"))) {
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 9.5);
  }
  const auto raw = simulate_rcrds(d, {{"yield", {}, {{"yield", CensorNone{}}}}}, {std::uint64_t{7}, {}});
  for (double v : numbers(raw.column("yield"))) EXPECT_FALSE(std::isnan(v));
  EXPECT_EQ(kind_of([&] {
              simulate_rcrds(d, {{"yield", {}, {{"yield", CensorClamp{-5.0, 9.0}}}}});
            }),
            ErrorKind::InconsistentCensor);
}

TEST(Simulate, MultiRecord) {
  auto d = field();
  simulate_process(d, {joint_process()});
  const auto t = simulate_rcrds(d, {{".joint", {}, {}}}, {std::uint64_t{11}, {}});
  const auto b = numbers(t.column("biomass"));
  const auto y = numbers(t.column("yield"));
  std::size_t missing = 0;
  for (double v : b) {
    if (std::isnan(v)) ++missing;
    else EXPECT_GE(v, 0);
  }
  EXPECT_GT(missing, 20u);
  double sb = 0, sy = 0, n = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (std::isnan(b[i]) || std::isnan(y[i])) continue;
    sb += b[i];
    sy += y[i];
    ++n;
  }
  double cov = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (std::isnan(b[i]) || std::isnan(y[i])) continue;
    cov += (b[i] - sb / n) * (y[i] - sy / n);
  }
  EXPECT_GT(cov, 0);
}

TEST(Simulate, ParamsAndShape) {
  auto d = field();
  simulate_process(d, {yield_process()});
  const auto lo = simulate_rcrds(d, {{"yield", {{"mu", {2}}}, {{"yield", CensorNone{}}}}}, {std::uint64_t{1}, {}});
  const auto hi = simulate_rcrds(d, {{"yield", {{"mu", {8}}}, {{"yield", CensorNone{}}}}}, {std::uint64_t{1}, {}});
  const auto a = numbers(lo.column("yield")), b = numbers(hi.column("yield"));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i] - a[i], 6, 1e-9);
  EXPECT_EQ(kind_of([&] { simulate_rcrds(d, {{"height", {}, {}}}); }), ErrorKind::UnknownProcess);
  EXPECT_EQ(kind_of([&] { simulate_rcrds(d, {{"yield", {{"sigma", {1}}}, {}}}); }), ErrorKind::InvalidParams);
  simulate_process(d, {{"yield", {}, [](SimContext&) -> SimOutput { return std::vector<Value>{1.0}; }}});
  EXPECT_EQ(kind_of([&] { simulate_rcrds(d, {{"yield", {}, {}}}); }), ErrorKind::ShapeMismatch);
}

TEST(Simulate, CoarserUnitBroadcast) {
  auto d = field();
  simulate_process(d, {{"rainfall", {}, [](SimContext& ctx) -> SimOutput {
                          std::vector<Value> out;
                          for (std::size_t i = 0; i < ctx.n(); ++i) out.push_back(ctx.rng().below(2) ? "high" : "low");
                          return out;
                        }}});
  const auto t = simulate_rcrds(d, {{"rainfall", {}, {}}}, {std::uint64_t{5}, {}});
  for (const auto& [site, seen] : support::by_group(support::strings(t, "site"), support::strings(t, "rainfall"))) {
    EXPECT_EQ(seen.size(), 1u) << site;
  }
}

TEST(Autofill, ValidAndDeterministic) {
  const auto d = field();
  const auto a = autofill_rcrds(d, {std::uint64_t{3}, {}});
  const auto b = autofill_rcrds(d, {std::uint64_t{3}, {}});
  EXPECT_EQ(a, b);
  for (const char* rec : {"biomass", "yield", "rainfall"}) {
    const auto& c = a.column(rec);
    EXPECT_TRUE(c.filled);
    for (auto v : validate_values(d, rec, c.values)) EXPECT_EQ(v, Verdict::Valid) << rec;
    for (const auto& v : c.values) EXPECT_FALSE(is_missing(v));
  }
  const auto other = autofill_rcrds(d, {std::uint64_t{4}, {}});
  EXPECT_NE(a, other);
}

TEST(Censor, Values) {
  const ValidationRule r{"y", RangeRule{0.0, 1.0, true, false}};
  EXPECT_TRUE(is_missing(censor_value(1.0, CensorToMissing{}, &r)));
  EXPECT_EQ(censor_value(0.0, CensorToMissing{}, &r), Value(0.0));
  EXPECT_EQ(censor_value(5.0, CensorClamp{std::nullopt, 2.0}, nullptr), Value(2.0));
  EXPECT_EQ(censor_value(5.0, CensorNone{}, &r), Value(5.0));
}
