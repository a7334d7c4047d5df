#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "etclab/errors.hpp"
#include "etclab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"etclab: event-based control simulation and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--seed", seed, "override the config's seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--out", out_dir, "override the output directory")
      ->each([&](const std::string&) { out_set = true; });

  std::string kind;
  CLI::App* desc = app.add_subcommand("describe", "print an experiment schema");
  desc->add_option("kind", kind, "experiment kind")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      const auto config = etclab::load_config(config_path);
      std::optional<std::filesystem::path> out_override;
      if (out_set) out_override = out_dir;
      std::optional<std::uint64_t> seed_override;
      if (seed_set) seed_override = seed;
      const auto result =
          etclab::run_experiment(config, out_override, seed_override);
      std::cout << result.summary << "\n";
      return 0;
    }
    std::cout << etclab::describe(kind);
    return 0;
  } catch (const etclab::ConfigError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 2;
  } catch (const etclab::EtcError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
