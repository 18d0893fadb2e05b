// Command-line front end for the SOCO toolkit. Talks to the shared library
// exclusively through the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "soco/soco.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CLI::ValidationError("config", "cannot read '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int finish(soco_status status, soco_report* report) {
  if (status != SOCO_OK) {
    std::cerr << "error (" << soco_status_name(status)
              << "): " << soco_last_error() << "\n";
    soco_report_free(report);
    return status == SOCO_INVALID_ARGUMENT ? 2 : 3;
  }
  std::cout << soco_report_text(report);
  const bool passed = soco_report_passed(report) != 0;
  soco_report_free(report);
  if (!passed) {
    std::cerr << "one or more verdicts failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online Balanced Descent experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string sweep_param;
  std::string values_csv;
  std::vector<std::string> suite_names;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment from a config");
  run->add_option("config", config_path, "scenario config (JSON)")->required();
  add_seed(run);

  CLI::App* sweep =
      app.add_subcommand("sweep", "run an experiment per parameter value");
  sweep->add_option("config", config_path, "scenario config (JSON)")
      ->required();
  sweep->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")
      ->required();
  add_seed(sweep);

  CLI::App* verify =
      app.add_subcommand("verify", "run the property suites (all by default)");
  verify->add_option("suites", suite_names, "suite names");

  CLI::App* lqr =
      app.add_subcommand("lqr-sim", "simulate the OBD controller on an LQR "
                                    "scenario (family must be lqr)");
  lqr->add_option("config", config_path, "scenario config (JSON)")->required();
  add_seed(lqr);

  CLI11_PARSE(app, argc, argv);

  const std::uint64_t* seed_ptr = seed_set ? &seed : nullptr;
  soco_report* report = nullptr;

  try {
    if (run->parsed()) {
      const std::string config = read_file(config_path);
      return finish(soco_experiment_run(config.c_str(), seed_ptr, &report),
                    report);
    }
    if (sweep->parsed()) {
      const std::string config = read_file(config_path);
      std::vector<double> values;
      std::stringstream stream(values_csv);
      std::string token;
      while (std::getline(stream, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
      }
      if (values.empty()) {
        std::cerr << "error: --values is empty\n";
        return 2;
      }
      const soco_status status = soco_experiment_sweep(
          config.c_str(), sweep_param.c_str(), values.data(), values.size(),
          seed_ptr, &report);
      if (status == SOCO_OK) {
        std::cout << soco_report_csv(report);
      }
      return finish(status, report);
    }
    if (verify->parsed()) {
      std::vector<const char*> names;
      names.reserve(suite_names.size());
      for (const auto& name : suite_names) names.push_back(name.c_str());
      return finish(
          soco_verify_suites(names.empty() ? nullptr : names.data(),
                             names.size(), &report),
          report);
    }
    if (lqr->parsed()) {
      const std::string config = read_file(config_path);
      return finish(soco_lqr_simulate(config.c_str(), seed_ptr, &report),
                    report);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
