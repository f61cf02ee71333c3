// Command-line front end: one experiment per subcommand.

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coarse/experiment.hpp"

namespace {

using json = nlohmann::json;

// Flag name -> parameter key, per subcommand.
const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& named_flags() {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> flags{
      {"zk-cover", {{"--k", "k"}, {"--L", "L"}, {"--half-width", "half_width"}, {"--p", "p"}}},
      {"voronoi-check", {{"--n", "n"}, {"--samples", "samples"}, {"--box", "box"}, {"--denominator", "denominator"}}},
      {"cover-kernel",
       {{"--cover", "cover"}, {"--half-width", "half_width"}, {"--k", "k"}, {"--r", "r"}, {"--L", "L"}, {"--scale", "scale"},
        {"--p", "p"}, {"--pairs", "pairs"}}},
      {"tree-embed", {{"--valence", "valence"}, {"--depth", "depth"}, {"--S", "S"}, {"--p", "p"}, {"--kernel", "kernel"}}},
      {"lamplighter-metric",
       {{"--radius", "radius"}, {"--sandwich-m", "sandwich_m"}, {"--sandwich-radius", "sandwich_radius"},
        {"--sandwich-pairs", "sandwich_pairs"}}},
      {"lamplighter-cover", {{"--L", "L"}, {"--radius", "radius"}}},
      {"profile",
       {{"--p", "p"}, {"--S", "S"}, {"--grid-half-width", "grid_half_width"}, {"--tree-depth", "tree_depth"},
        {"--lamplighter-radius", "lamplighter_radius"}}},
      {"embed",
       {{"--kind", "kind"}, {"--depth", "depth"}, {"--breakpoints", "breakpoints"}, {"--u", "u"}, {"--a", "a"}, {"--p", "p"},
        {"--sample-points", "sample_points"}}},
      {"cp-check",
       {{"--u", "u"}, {"--a", "a"}, {"--p", "p"}, {"--c", "c"}, {"--log-T", "log_T"}, {"--grid-step", "grid_step"},
        {"--expect", "expect"}}},
  };
  return flags;
}

// "3" -> 3, "[1,2]" -> [1,2], "1,3" -> [1,3], anything else -> string.
json parse_value(const std::string& text) {
  auto parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  if (text.find(',') != std::string::npos) {
    json arr = json::array();
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find(',', start);
      if (end == std::string::npos) end = text.size();
      arr.push_back(parse_value(text.substr(start, end - start)));
      start = end + 1;
    }
    return arr;
  }
  return text;
}

const std::map<std::string, std::string> descriptions{
    {"zk-cover", "lattice-pullback covers of a Z^k window against the type bound"},
    {"voronoi-check", "membership, coverage and separation of the thickened A^{n-1} cover"},
    {"cover-kernel", "partition-of-unity kernel of a cover, or its pullback through iota"},
    {"tree-embed", "tent or flat ray kernels on a tree with an end"},
    {"lamplighter-metric", "word length of Z wr Z against BFS, and the j-embedding sandwich"},
    {"lamplighter-cover", "cover of a Z wr Z ball with its measured statistics"},
    {"profile", "upper epsilon profiles for Z^2, the tree and Z wr Z"},
    {"embed", "weighted kernel embedding of a tree, or the Mazur map check"},
    {"cp-check", "convergence diagnostic for a compression shape u"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse embedding and asymptotic dimension experiments"};
  app.require_subcommand(1);

  std::string config_path, output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
  std::vector<std::string> sets;
  std::map<std::string, std::map<std::string, std::string>> flag_values;

  for (const auto& name : coarse::experiment_names()) {
    auto* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "report prefix: writes <prefix>.json and <prefix>.<table>.csv");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--cap", cap, "point cap for constructed windows");
    sub->add_option("-P,--param", sets, "parameter override key=value (value parsed as JSON)");
    for (const auto& [flag, key] : named_flags().at(name)) {
      sub->add_option(flag, flag_values[name][key], "parameter '" + key + "'");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : coarse::kExitConfig;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  coarse::ExperimentConfig config;
  try {
    json file = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      file = json::parse(in, nullptr, false);
      if (file.is_discarded()) throw coarse::ConfigError("cannot parse " + config_path);
    }
    config = coarse::config_from_json(file);
    if (!config.name.empty() && config.name != name) {
      throw coarse::ConfigError("config is for experiment '" + config.name + "', not '" + name + "'");
    }
    config.name = name;
    for (const auto& [key, value] : flag_values[name]) {
      if (!value.empty()) config.params[key] = parse_value(value);
    }
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw coarse::ConfigError("--param expects key=value, got '" + s + "'");
      config.params[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
    }
    if (!output.empty()) config.output = output;
    if (seed) config.seed = *seed;
    if (cap) config.cap = *cap;
  } catch (const coarse::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return coarse::kExitConfig;
  }
  return coarse::run_and_emit(config, std::cout);
}
