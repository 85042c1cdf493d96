#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "desgraph/desgraph.hpp"

namespace support {

inline std::string data_path(const std::string& name) { return std::string(DESGRAPH_TEST_DATA) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void register_plugins() {
  auto& reg = desgraph::default_registry();
  if (!reg.contains("williams")) reg.add("williams", desgraph::ordering_williams);
  desgraph::register_menu_orderings(reg);
}

inline desgraph::dsl::BuiltSpec build_file(const std::string& name, std::optional<std::uint64_t> seed = {}) {
  register_plugins();
  const auto ast = desgraph::dsl::parse_spec(slurp(data_path(name)));
  return desgraph::dsl::build_spec(ast, desgraph::dsl::BuildOptions{seed});
}

inline desgraph::DesignTable serve_file(const std::string& name, std::optional<std::uint64_t> seed = {}) {
  auto built = build_file(name, seed);
  return desgraph::serve_table(built.design, built.serve);
}

inline std::vector<std::string> strings(const desgraph::DesignTable& t, const std::string& name) {
  std::vector<std::string> out;
  for (const auto& v : t.column(name).values) out.push_back(desgraph::value_to_string(v));
  return out;
}

inline std::map<std::string, std::size_t> tally(const std::vector<std::string>& values) {
  std::map<std::string, std::size_t> out;
  for (const auto& v : values) ++out[v];
  return out;
}

/// key -> set of values seen with it.
inline std::map<std::string, std::map<std::string, std::size_t>> by_group(const std::vector<std::string>& keys,
                                                                         const std::vector<std::string>& values) {
  std::map<std::string, std::map<std::string, std::size_t>> out;
  for (std::size_t i = 0; i < keys.size(); ++i) ++out[keys[i]][values[i]];
  return out;
}

}  // namespace support
