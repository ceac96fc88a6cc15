#include "diralg/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Dirac algebroid mechanics: structure checks and implicit dynamics"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::string sweep;
  auto* run = app.add_subcommand("run", "integrate a scenario and write CSV + report");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--sweep", sweep, "PARAM=a:b:n, one trajectory per value");

  bool as_json = false;
  auto* list = app.add_subcommand("list-systems", "print the built-in systems");
  list->add_flag("--json", as_json, "machine-readable catalog with the scenario schema");

  std::string check_path;
  auto* check = app.add_subcommand("check", "structure checks only, report on stdout");
  check->add_option("scenario", check_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : diralg::kExitMalformed;
  }

  if (*list) {
    if (as_json) {
      std::cout << diralg::list_systems_json().dump(2) << "\n";
    } else {
      std::cout << diralg::list_systems_text();
    }
    return 0;
  }

  if (*check) {
    std::string report;
    const int code = diralg::check_scenario_file(check_path, report);
    std::cout << report;
    return code;
  }

  try {
    if (!sweep.empty()) {
      const int code = diralg::run_sweep_file(scenario_path, out_dir, diralg::parse_sweep(sweep));
      if (code != 0) std::cerr << "sweep: at least one run exited with " << code << "\n";
      return code;
    }
    const diralg::RunOutcome out = diralg::run_scenario_file(scenario_path, out_dir);
    if (out.exit_code != 0) std::cerr << "error: " << out.message << "\n";
    return out.exit_code;
  } catch (const diralg::UnknownSystemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return diralg::kExitUnknownSystem;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return diralg::kExitMalformed;
  }
}
