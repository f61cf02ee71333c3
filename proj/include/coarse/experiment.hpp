#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarse/report.hpp"

namespace coarse {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path output;  // report prefix; empty means no files
  std::uint64_t seed = 1;
  std::optional<std::size_t> cap;
};

/// {"experiment": name, "seed": n, "output": prefix, "cap": n, "params": {...}}
ExperimentConfig config_from_json(const nlohmann::json& j);

const std::vector<std::string>& experiment_names();

/// Runs one experiment. Assertion failures land in Report::failures; bad
/// parameters throw ConfigError and oversized windows CapExceeded.
Report run_experiment(const ExperimentConfig& config);

enum ExitCode { kExitOk = 0, kExitAssertion = 1, kExitConfig = 2, kExitCap = 3 };

/// run_experiment plus report emission and the exit-status contract. Nothing
/// is written unless the experiment ran to completion.
int run_and_emit(const ExperimentConfig& config, std::ostream& log);

}  // namespace coarse
