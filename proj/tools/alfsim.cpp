#include <CLI11.hpp>
#include <iostream>

#include "alf/cli_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Augmented light field simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::size_t grid_scale = 1;
  std::string compare;
  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config, "Scenario config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--grid-scale", grid_scale, "Multiply both sample counts by k")
      ->check(CLI::PositiveNumber);
  run->add_option("--compare-oracle", compare, "Run the wave-optics oracle")
      ->check(CLI::IsMember({"on", "off"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : alf::io::kConfigError;
  }

  alf::io::RunOverrides overrides;
  overrides.grid_scale = grid_scale;
  if (!compare.empty()) overrides.compare_oracle = compare == "on";
  const auto outcome = alf::io::run(config, out_dir, overrides);
  if (outcome.exit_code != alf::io::kSuccess) {
    std::cerr << "alfsim: " << outcome.message << "\n";
  } else {
    std::cout << "wrote " << outcome.files.size() << " files to " << out_dir << "\n";
  }
  return outcome.exit_code;
}
