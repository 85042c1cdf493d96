#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "desgraph/desgraph.hpp"

namespace {

using namespace desgraph;

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DesignError(ErrorKind::IoFailure, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// "--t 4", "--t=4" and "t=4" pairs after the recipe kind.
MenuParams menu_params(const std::vector<std::string>& args, std::size_t from) {
  MenuParams out;
  for (std::size_t i = from; i < args.size(); ++i) {
    std::string key = args[i];
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (auto eq = key.find('='); eq != std::string::npos) {
      out[key.substr(0, eq)] = key.substr(eq + 1);
      continue;
    }
    if (i + 1 >= args.size()) {
      throw DesignError(ErrorKind::InvalidParams, "parameter '" + key + "' needs a value");
    }
    out[key] = args[++i];
  }
  return out;
}

void print_recipe(const Recipe& recipe) { std::cout << recipe.source; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build experimental designs from a declarative spec"};
  app.require_subcommand(1);

  dsl::RunFlags flags;
  std::string spec_path;
  std::vector<std::string> graph;
  std::optional<std::uint64_t> seed;
  auto* build = app.add_subcommand("build", "Run a design spec");
  build->add_option("spec", spec_path, "Spec file")->required();
  build->add_option("--out", flags.out, "Write the design table as CSV");
  build->add_option("--export", flags.export_dir, "Write the data-collection bundle to a directory");
  build->add_flag("--overwrite", flags.overwrite, "Allow exporting into a non-empty directory");
  build->add_option("--graph", graph, "factors|levels and an optional output file")->expected(1, 2);
  build->add_option("--graph-format", flags.graph_format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  build->add_flag("--tree", flags.tree, "Print the unit and record tree");
  build->add_option("--seed", seed, "Override the spec seed");
  build->add_flag("--autofill", flags.autofill, "Fill records with values that pass their rules");
  build->add_option("--max-rows", flags.max_rows, "Rows shown when printing");

  std::string csv_path, units, trts, rcrds, title = "Ingested design";
  std::size_t ingest_rows = 6;
  auto* ingest = app.add_subcommand("ingest", "Attach roles to columns of a CSV file");
  ingest->add_option("csv", csv_path, "CSV file")->required();
  ingest->add_option("--units", units, "Comma separated unit columns");
  ingest->add_option("--trts", trts, "Comma separated treatment columns");
  ingest->add_option("--rcrds", rcrds, "Comma separated record columns");
  ingest->add_option("--title", title, "Design title");
  ingest->add_option("--max-rows", ingest_rows, "Rows shown when printing");

  auto* menu_cmd = app.add_subcommand("menu", "Print the spec of a recipe design");
  menu_cmd->allow_extras();
  auto* takeout_cmd = app.add_subcommand("takeout", "Run a recipe design");
  takeout_cmd->allow_extras();
  std::size_t takeout_rows = 6;
  takeout_cmd->add_option("--max-rows", takeout_rows, "Rows shown when printing");
  auto* scan = app.add_subcommand("scan-menu", "List the recipe designs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!default_registry().contains("williams")) default_registry().add("williams", ordering_williams);
  register_menu_orderings(default_registry());

  try {
    if (*build) {
      flags.seed = seed;
      if (!graph.empty()) {
        flags.graph_which = graph[0];
        if (graph.size() > 1) flags.graph_file = graph[1];
      }
      const auto ast = dsl::parse_spec(slurp(spec_path));
      return dsl::run_spec(ast, flags, std::cout, std::cerr);
    }
    if (*ingest) {
      const auto table = ingest_table(read_csv_file(csv_path),
                                      IngestSelectors{split_names(units), split_names(trts), split_names(rcrds)}, title);
      std::cout << render_table(table, RenderOptions{ingest_rows, "An edibble"});
      return 0;
    }
    if (*menu_cmd || *takeout_cmd) {
      const auto args = (*menu_cmd ? menu_cmd : takeout_cmd)->remaining();
      Recipe recipe;
      if (args.empty()) {
        if (*menu_cmd) throw DesignError(ErrorKind::UnknownKind, "menu needs a recipe kind");
        Rng draws(entropy_seed());
        recipe = random_recipe(draws);
      } else {
        recipe = menu(args[0], menu_params(args, 1));
      }
      print_recipe(recipe);
      if (*takeout_cmd) {
        std::cout << "\n" << render_table(takeout(recipe), RenderOptions{takeout_rows, "An edibble"});
      }
      return 0;
    }
    if (*scan) {
      std::cout << render_table(scan_menu(), RenderOptions{menu_catalogue().size(), "A tibble"});
      return 0;
    }
  } catch (const dsl::SpecError& e) {
    std::cerr << (e.kind() == dsl::SpecError::Kind::Syntax ? "syntax error: " : "semantic error: ") << e.what()
              << "\n";
    return 2;
  } catch (const DesignError& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
