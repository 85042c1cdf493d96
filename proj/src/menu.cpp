#include "desgraph/menu.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>

#include "desgraph/combinatorics.hpp"
#include "desgraph/dsl.hpp"
#include "desgraph/error.hpp"
#include "desgraph/serve.hpp"

namespace desgraph {

namespace {

const std::vector<MenuEntry> kCatalogue = {
    {"bibd", "t, k, r, seed", "Balanced Incomplete Block Design"},
    {"crd", "t, n, r, seed", "Completely Randomised Design"},
    {"factorial", "trt, r, design, seed", "Factorial Design"},
    {"graeco", "t, seed", "Graeco-Latin Square Design"},
    {"hyper_graeco", "t, seed", "Hyper-Graeco-Latin Square Design"},
    {"lsd", "t, seed", "Latin Square Design"},
    {"rcbd", "t, r, seed", "Randomised Complete Block Design"},
    {"split", "t1, t2, r, seed", "Split-Plot Design, Split-Unit Design"},
    {"strip", "t1, t2, r, seed", "Strip-Plot Design, Strip-Unit Design"},
    {"youden", "nc, t, seed", "Youden Square Design"},
};

const MenuEntry& entry(std::string_view kind) {
  for (const auto& e : kCatalogue) {
    if (e.name == kind) return e;
  }
  throw DesignError(ErrorKind::UnknownKind, "unknown recipe '" + std::string(kind) + "'");
}

std::vector<std::string> arg_names(const MenuEntry& e) {
  std::vector<std::string> out;
  std::stringstream ss(e.args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    out.push_back(item);
  }
  return out;
}

[[noreturn]] void invalid(const std::string& message) {
  throw DesignError(ErrorKind::InvalidParams, message);
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || p != text.data() + text.size()) {
    invalid("parameter '" + key + "' must be a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::size_t> to_uint_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    out.push_back(static_cast<std::size_t>(to_uint(key, item)));
  }
  if (out.empty()) invalid("parameter '" + key + "' needs at least one level count");
  return out;
}

bool mols_supported(std::size_t t, std::size_t count) {
  try {
    mols(t, count);
    return true;
  } catch (const DesignError&) {
    return false;
  }
}

struct Resolver {
  MenuParams given;
  Rng& draws;
  MenuParams resolved;

  std::size_t get(const std::string& key, std::int64_t lo, std::int64_t hi) {
    std::size_t v;
    if (auto it = given.find(key); it != given.end()) {
      v = static_cast<std::size_t>(to_uint(key, it->second));
    } else {
      v = static_cast<std::size_t>(draws.between(lo, hi));
    }
    resolved[key] = std::to_string(v);
    return v;
  }
  std::size_t pick(const std::string& key, const std::vector<std::size_t>& choices) {
    std::size_t v;
    if (auto it = given.find(key); it != given.end()) {
      v = static_cast<std::size_t>(to_uint(key, it->second));
    } else {
      v = choices[draws.below(choices.size())];
    }
    resolved[key] = std::to_string(v);
    return v;
  }
  bool has(const std::string& key) const { return given.count(key) > 0; }
};

void at_least(const std::string& key, std::size_t v, std::size_t lo) {
  if (v < lo) invalid("parameter '" + key + "' must be at least " + std::to_string(lo));
}

std::string header(const MenuEntry& e) { return "design \"" + e.name_full + "\"\n"; }

std::string assign_block(const std::string& order, std::uint64_t seed) {
  return "assign:\n  order = [" + order + "]\n  seed = " + std::to_string(seed) + "\n";
}

const std::vector<std::array<std::size_t, 3>> kBibdChoices = {
    {4, 2, 3}, {4, 3, 3}, {5, 2, 4}, {5, 3, 6}, {5, 4, 4}, {6, 2, 5},
    {6, 3, 5}, {6, 4, 10}, {6, 5, 5}, {7, 2, 6}, {7, 3, 3}, {7, 4, 4}};

}  // namespace

const std::vector<MenuEntry>& menu_catalogue() { return kCatalogue; }

Recipe menu(std::string_view kind, const MenuParams& params, Rng& draws) {
  const MenuEntry& e = entry(kind);
  const auto names = arg_names(e);
  for (const auto& [key, value] : params) {
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      invalid("recipe '" + e.name + "' takes " + e.args + "; got '" + key + "'");
    }
  }
  Resolver p{params, draws, {}};
  std::ostringstream src;
  src << header(e);
  std::string order = "random";

  if (e.name == "crd") {
    const std::size_t t = p.get("t", 2, 12);
    at_least("t", t, 1);
    std::size_t n;
    if (p.has("r")) {
      const std::size_t r = p.get("r", 1, 1);
      at_least("r", r, 1);
      n = t * r;
      if (p.has("n") && p.get("n", 0, 0) != n) invalid("crd needs n = t * r");
      p.resolved["n"] = std::to_string(n);
    } else {
      n = p.get("n", 2, 50);
    }
    at_least("n", n, 1);
    src << "units:\n  unit = " << n << "\ntrts:\n  trt = " << t << "\nallot:\n  trt ~ unit\n";
  } else if (e.name == "rcbd") {
    const std::size_t t = p.get("t", 2, 12), r = p.get("r", 2, 6);
    at_least("t", t, 1);
    at_least("r", r, 1);
    src << "units:\n  block = " << r << "\n  unit = nested_in(block, " << t << ")\ntrts:\n  trt = " << t
        << "\nallot:\n  trt ~ unit\n";
  } else if (e.name == "lsd" || e.name == "graeco" || e.name == "hyper_graeco") {
    const std::size_t count = e.name == "lsd" ? 1 : e.name == "graeco" ? 2 : 3;
    std::vector<std::size_t> choices;
    for (std::size_t t = 2; t <= 12; ++t) {
      if (mols_supported(t, count)) choices.push_back(t);
    }
    const std::size_t t = p.pick("t", choices);
    at_least("t", t, 2);
    if (!mols_supported(t, count)) {
      invalid("no construction of " + std::to_string(count) + " orthogonal Latin squares of order " +
              std::to_string(t));
    }
    src << "units:\n  row = " << t << "\n  col = " << t << "\n  unit = crossed_by(row, col)\ntrts:\n";
    if (count == 1) {
      src << "  trt = " << t << "\nallot:\n  trt ~ unit\n";
    } else {
      std::string lhs;
      for (std::size_t i = 1; i <= count; ++i) {
        src << "  trt" << i << " = " << t << "\n";
        lhs += (i > 1 ? ":" : "") + ("trt" + std::to_string(i));
      }
      src << "allot:\n  " << lhs << " ~ unit\n";
    }
    order = e.name == "lsd" ? "latin" : e.name == "graeco" ? "graeco" : "hyper-graeco";
  } else if (e.name == "bibd") {
    std::vector<std::array<std::size_t, 3>> fits;
    for (const auto& c : kBibdChoices) {
      if ((!p.has("t") || to_uint("t", params.at("t")) == c[0]) &&
          (!p.has("k") || to_uint("k", params.at("k")) == c[1]) &&
          (!p.has("r") || to_uint("r", params.at("r")) == c[2])) {
        fits.push_back(c);
      }
    }
    std::array<std::size_t, 3> c{};
    if (p.has("t") && p.has("k") && p.has("r")) {
      c = {static_cast<std::size_t>(to_uint("t", params.at("t"))),
           static_cast<std::size_t>(to_uint("k", params.at("k"))),
           static_cast<std::size_t>(to_uint("r", params.at("r")))};
    } else if (!fits.empty()) {
      c = fits[draws.below(fits.size())];
    } else {
      invalid("no balanced incomplete block design matches the given parameters");
    }
    p.resolved["t"] = std::to_string(c[0]);
    p.resolved["k"] = std::to_string(c[1]);
    p.resolved["r"] = std::to_string(c[2]);
    const auto bp = bibd_params(c[0], c[1], c[2]);
    if (!bp) {
      invalid("t = " + std::to_string(c[0]) + ", k = " + std::to_string(c[1]) + ", r = " + std::to_string(c[2]) +
              " fail the balanced incomplete block conditions");
    }
    src << "units:\n  block = " << bp->b << "\n  unit = nested_in(block, " << bp->k << ")\ntrts:\n  trt = " << bp->t
        << "\nallot:\n  trt ~ unit\n";
    order = "bibd";
  } else if (e.name == "youden") {
    const std::size_t t = p.get("t", 3, 12);
    at_least("t", t, 3);
    std::vector<std::size_t> choices;
    for (std::size_t nc = 2; nc < t; ++nc) {
      if (difference_set(t, nc)) choices.push_back(nc);
    }
    if (choices.empty()) invalid("no Youden square has " + std::to_string(t) + " treatments");
    const std::size_t nc = p.pick("nc", choices);
    if (nc < 2 || nc >= t || !difference_set(t, nc)) {
      invalid("no Youden square with " + std::to_string(t) + " treatments in " + std::to_string(nc) + " columns");
    }
    src << "units:\n  row = " << t << "\n  col = " << nc << "\n  unit = crossed_by(row, col)\ntrts:\n  trt = " << t
        << "\nallot:\n  trt ~ unit\n";
    order = "youden";
  } else if (e.name == "factorial") {
    std::vector<std::size_t> levels;
    if (p.has("trt")) {
      levels = to_uint_list("trt", params.at("trt"));
    } else {
      levels = {static_cast<std::size_t>(draws.between(2, 4)), static_cast<std::size_t>(draws.between(2, 4))};
    }
    std::string joined;
    std::size_t cells = 1;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      at_least("trt", levels[i], 1);
      joined += (i ? "," : "") + std::to_string(levels[i]);
      cells *= levels[i];
    }
    p.resolved["trt"] = joined;
    const std::size_t r = p.get("r", 2, 4);
    at_least("r", r, 1);
    const std::string structure = p.has("design") ? params.at("design") : "crd";
    if (structure != "crd" && structure != "rcbd") invalid("factorial design must be crd or rcbd, got '" + structure + "'");
    p.resolved["design"] = structure;
    if (structure == "crd") {
      src << "units:\n  unit = " << cells * r << "\n";
    } else {
      src << "units:\n  block = " << r << "\n  unit = nested_in(block, " << cells << ")\n";
    }
    src << "trts:\n";
    std::string lhs;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      src << "  trt" << i + 1 << " = " << levels[i] << "\n";
      lhs += (i ? ":" : "") + ("trt" + std::to_string(i + 1));
    }
    src << "allot:\n  " << lhs << " ~ unit\n";
  } else if (e.name == "split") {
    const std::size_t t1 = p.get("t1", 2, 6), t2 = p.get("t2", 2, 6), r = p.get("r", 2, 6);
    at_least("t1", t1, 1);
    at_least("t2", t2, 1);
    at_least("r", r, 1);
    src << "units:\n  block = " << r << "\n  mainplot = nested_in(block, " << t1
        << ")\n  subplot = nested_in(mainplot, " << t2 << ")\ntrts:\n  trt1 = " << t1 << "\n  trt2 = " << t2
        << "\nallot:\n  trt1 ~ mainplot\n  trt2 ~ subplot\n";
  } else {
    const std::size_t t1 = p.get("t1", 2, 6), t2 = p.get("t2", 2, 6), r = p.get("r", 2, 6);
    at_least("t1", t1, 1);
    at_least("t2", t2, 1);
    at_least("r", r, 1);
    src << "units:\n  block = " << r << "\n  row = nested_in(block, " << t1 << ")\n  col = nested_in(block, " << t2
        << ")\n  unit = nested_in(block, crossed_by(row, col))\ntrts:\n  trt1 = " << t1 << "\n  trt2 = " << t2
        << "\nallot:\n  trt1 ~ row\n  trt2 ~ col\n";
  }

  const std::uint64_t seed = p.get("seed", 1, 1000);
  src << assign_block(order, seed);
  return Recipe{e.name, p.resolved, seed, src.str()};
}

Recipe menu(std::string_view kind, const MenuParams& params) {
  Rng draws(entropy_seed());
  return menu(kind, params, draws);
}

Recipe random_recipe(Rng& draws) {
  return menu(kCatalogue[draws.below(kCatalogue.size())].name, {}, draws);
}

namespace {

std::vector<LevelId> unique_levels(const std::vector<LevelId>& column) {
  std::vector<LevelId> out;
  for (LevelId l : column) {
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return out;
}

std::size_t position(const std::vector<LevelId>& levels, LevelId l) {
  return static_cast<std::size_t>(std::find(levels.begin(), levels.end(), l) - levels.begin());
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  rng.shuffle(std::span<std::size_t>(p));
  return p;
}

void need_constraint(const OrderingContext& ctx, std::size_t n, const std::string& name) {
  if (ctx.constraint.size() != n) {
    throw DesignError(ErrorKind::BadConstraintArity, name + " needs " + std::to_string(n) +
                                                         " constraint factor" + (n == 1 ? "" : "s") + ", got " +
                                                         std::to_string(ctx.constraint.size()));
  }
}

/// Treatment-table row for each tuple of per-factor level positions.
std::map<std::vector<std::size_t>, std::size_t> combo_index(const OrderingContext& ctx) {
  std::map<std::vector<std::size_t>, std::size_t> out;
  for (std::size_t i = 0; i < ctx.trts.rows.size(); ++i) {
    std::vector<std::size_t> key;
    for (std::size_t f = 0; f < ctx.trts.factors.size(); ++f) {
      key.push_back(position(ctx.design.levels_of(ctx.trts.factors[f]), ctx.trts.rows[i][f]));
    }
    out.emplace(std::move(key), i);
  }
  return out;
}

std::vector<std::size_t> ordering_mols(const OrderingContext& ctx) {
  need_constraint(ctx, 2, "a Latin square ordering");
  const auto row_col = ctx.units.column(ctx.constraint[0]);
  const auto col_col = ctx.units.column(ctx.constraint[1]);
  const auto rows = unique_levels(row_col), cols = unique_levels(col_col);
  const std::size_t t = rows.size();
  const std::size_t count = ctx.trts.factors.size();
  if (cols.size() != t) invalid("a Latin square needs as many columns as rows");
  for (FactorId f : ctx.trts.factors) {
    if (ctx.design.levels_of(f).size() != t) {
      invalid("treatment '" + ctx.design.factor(f).name + "' needs " + std::to_string(t) + " levels");
    }
  }
  const auto squares = mols(t, count);
  const auto pr = permutation(t, ctx.rng), pc = permutation(t, ctx.rng);
  std::vector<std::vector<std::size_t>> symbols;
  for (std::size_t s = 0; s < count; ++s) symbols.push_back(permutation(t, ctx.rng));
  const auto index = combo_index(ctx);

  std::vector<std::size_t> out;
  out.reserve(row_col.size());
  for (std::size_t i = 0; i < row_col.size(); ++i) {
    const std::size_t r = pr[position(rows, row_col[i])], c = pc[position(cols, col_col[i])];
    std::vector<std::size_t> key;
    for (std::size_t s = 0; s < count; ++s) key.push_back(symbols[s][squares[s][r][c]]);
    out.push_back(index.at(key));
  }
  return out;
}

std::vector<std::size_t> ordering_bibd(const OrderingContext& ctx) {
  need_constraint(ctx, 1, "bibd");
  const auto block_col = ctx.units.column(ctx.constraint[0]);
  const auto blocks = unique_levels(block_col);
  const std::size_t t = ctx.trts.rows.size();
  const std::size_t k = block_col.size() / std::max<std::size_t>(blocks.size(), 1);
  if (k * blocks.size() != block_col.size()) invalid("bibd needs equal block sizes");
  if ((blocks.size() * k) % t != 0) invalid("bibd needs equal replication");
  const auto params = bibd_params(t, k, blocks.size() * k / t);
  if (!params || params->b != blocks.size()) invalid("the blocks do not admit a balanced incomplete block design");
  auto found = search_bibd(*params, ctx.rng);
  if (!found) invalid("no balanced incomplete block design was found");
  auto& design = *found;
  const auto block_perm = permutation(design.size(), ctx.rng);
  const auto relabel = permutation(t, ctx.rng);
  for (auto& b : design) ctx.rng.shuffle(std::span<std::size_t>(b));

  std::vector<std::size_t> filled(blocks.size(), 0);
  std::vector<std::size_t> out;
  out.reserve(block_col.size());
  for (LevelId l : block_col) {
    const std::size_t b = position(blocks, l);
    out.push_back(relabel[design[block_perm[b]][filled[b]++]]);
  }
  return out;
}

std::vector<std::size_t> ordering_youden(const OrderingContext& ctx) {
  need_constraint(ctx, 2, "youden");
  auto first = ctx.units.column(ctx.constraint[0]);
  auto second = ctx.units.column(ctx.constraint[1]);
  auto a = unique_levels(first), b = unique_levels(second);
  const std::size_t t = ctx.trts.rows.size();
  if (a.size() != t) {
    std::swap(first, second);
    std::swap(a, b);
  }
  if (a.size() != t) invalid("youden needs a row factor with one level per treatment");
  const auto square = youden_square(t, b.size());
  const auto pr = permutation(t, ctx.rng), pc = permutation(b.size(), ctx.rng), sym = permutation(t, ctx.rng);
  std::vector<std::size_t> out;
  out.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    out.push_back(sym[square[pr[position(a, first[i])]][pc[position(b, second[i])]]]);
  }
  return out;
}

}  // namespace

void register_menu_orderings(OrderingRegistry& registry) {
  const std::pair<const char*, OrderingFn> all[] = {{"latin", ordering_mols},
                                                    {"graeco", ordering_mols},
                                                    {"hyper-graeco", ordering_mols},
                                                    {"bibd", ordering_bibd},
                                                    {"youden", ordering_youden}};
  for (const auto& [name, fn] : all) {
    if (!registry.contains(name)) registry.add(name, fn);
  }
}

DesignTable takeout(const Recipe& recipe) {
  register_menu_orderings(default_registry());
  const auto ast = dsl::parse_spec(recipe.source);
  auto built = dsl::build_spec(ast);
  return serve_table(built.design, built.serve);
}

DesignTable takeout() {
  Rng draws(entropy_seed());
  return takeout(random_recipe(draws));
}

DesignTable scan_menu() {
  std::vector<Value> package, name, args, full;
  for (const auto& e : kCatalogue) {
    package.emplace_back(std::string("desgraph"));
    name.emplace_back(e.name);
    args.emplace_back(e.args);
    full.emplace_back(e.name_full);
  }
  auto col = [](std::string n, std::vector<Value> v) {
    Column c;
    c.name = std::move(n);
    c.level_count = v.size();
    c.values = std::move(v);
    return c;
  };
  return DesignTable("Menu", {col("package", package), col("name", name), col("args", args), col("name_full", full)});
}

}  // namespace desgraph
