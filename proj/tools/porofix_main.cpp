// porofix: command-line driver for single runs, studies and config checks.
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "porofix/errors.hpp"
#include "porofix/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fixed-stress split solver for quasi-static Biot poroelasticity"};
  app.require_subcommand(1);

  std::string config;
  std::string out;

  CLI::App* run = app.add_subcommand("run", "Run the configured scenario and write its artifacts");
  run->add_option("--config", config, "Scenario JSON file")->required();
  run->add_option("--out", out, "Output directory (default: output.directory of the config)");

  CLI::App* study = app.add_subcommand("study", "Run the study section of the config");
  study->add_option("--config", config, "Scenario JSON file")->required();
  study->add_option("--out", out, "Output directory (default: output.directory of the config)");

  CLI::App* check = app.add_subcommand("check", "Validate a config without solving");
  check->add_option("--config", config, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const porofix::ScenarioConfig cfg = porofix::load_config(config);
    const std::string dir = out.empty() ? cfg.output.directory : out;
    if (*check) {
      std::cout << "config ok: L=" << cfg.resolved_L() << " delta0=" << cfg.resolved_delta0()
                << " study=" << porofix::to_string(cfg.study.kind) << '\n';
    } else if (*run) {
      porofix::run_scenario(cfg, dir);
      std::cout << "wrote " << dir << '\n';
    } else if (*study) {
      porofix::run_study(cfg, dir);
      std::cout << "wrote " << dir << '\n';
    }
  } catch (const porofix::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const porofix::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
