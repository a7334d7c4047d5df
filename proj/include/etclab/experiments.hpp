#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace etclab {

struct RunOutput {
  std::string summary;  // one line with the key numbers
  std::vector<std::filesystem::path> files;
};

/// Parses and strictly validates a config file (unknown keys rejected).
nlohmann::json load_config(const std::filesystem::path& path);

/// Executes the experiment named by config["experiment"]. All outputs are
/// written atomically under out_dir; command-line overrides replace the
/// config's seed / output directory.
RunOutput run_experiment(const nlohmann::json& config,
                         const std::optional<std::filesystem::path>& out_dir_override,
                         const std::optional<std::uint64_t>& seed_override);

/// Config schema and reproduced quantities for one experiment kind.
/// Throws ConfigError for unknown kinds.
std::string describe(const std::string& kind);

std::vector<std::string> experiment_kinds();

}  // namespace etclab
