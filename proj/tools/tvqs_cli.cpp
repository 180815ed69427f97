#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tvqs/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kRuntimeError = 1, kInvalidConfig = 2 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational thermal-state preparation with a hybrid classical/quantum ansatz"};
  app.require_subcommand(1);

  std::string config_path;
  tvqs::commands::Overrides overrides;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "YAML experiment configuration")->required();
    cmd->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { overrides.seed = v; },
                                            "Master seed");
    cmd->add_option_function<std::string>("--out", [&](const std::string& v) { overrides.out = v; },
                                          "Output directory");
    cmd->add_option_function<std::string>("--mode", [&](const std::string& v) { overrides.mode = v; },
                                          "full_space or sample");
    cmd->add_option_function<std::string>("--grad", [&](const std::string& v) { overrides.grad = v; },
                                          "psr or spsa");
    cmd->add_option_function<long long>("--shots", [&](const long long& v) { overrides.shots = v; },
                                        "Shots per measurement setting (0 = exact)");
  };

  auto* train = app.add_subcommand("train", "Train one ensemble and write its artifacts");
  auto* sweep = app.add_subcommand("thermal-sweep", "Train per beta and estimate F, E, S");
  auto* scaling = app.add_subcommand("scaling", "Run a scaling campaign and fit its exponent");
  auto* exact = app.add_subcommand("exact", "Exact-diagonalization reference values");
  for (auto* cmd : {train, sweep, scaling, exact}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  tvqs::config::ExperimentConfig cfg;
  try {
    cfg = tvqs::commands::resolve(config_path, overrides);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }

  try {
    if (train->parsed()) return tvqs::commands::cmd_train(cfg);
    if (sweep->parsed()) return tvqs::commands::cmd_thermal_sweep(cfg);
    if (scaling->parsed()) return tvqs::commands::cmd_scaling(cfg);
    return tvqs::commands::cmd_exact(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
