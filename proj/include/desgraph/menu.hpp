#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "desgraph/assign.hpp"
#include "desgraph/rng.hpp"
#include "desgraph/table.hpp"

namespace desgraph {

/// Parameter values as written, e.g. {"t": "4"} or {"trt": "2,3"}.
using MenuParams = std::map<std::string, std::string>;

struct Recipe {
  std::string kind;
  /// Every parameter after defaults and random draws were resolved.
  MenuParams params;
  std::uint64_t seed = 0;
  /// Design-spec source that builds this recipe.
  std::string source;
};

struct MenuEntry {
  std::string name;
  std::string args;
  std::string name_full;
};

const std::vector<MenuEntry>& menu_catalogue();

/// Omitted parameters are drawn from `draws`.
Recipe menu(std::string_view kind, const MenuParams& params, Rng& draws);
Recipe menu(std::string_view kind, const MenuParams& params = {});
Recipe random_recipe(Rng& draws);

/// Orderings used by recipe sources: latin, graeco, hyper-graeco, bibd, youden.
/// Safe to call repeatedly.
void register_menu_orderings(OrderingRegistry& registry);

/// Build and serve a recipe's source.
DesignTable takeout(const Recipe& recipe);
DesignTable takeout();

/// package, name, args, name_full; one row per recipe.
DesignTable scan_menu();

}  // namespace desgraph
