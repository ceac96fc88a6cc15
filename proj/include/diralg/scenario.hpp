#pragma once

#include "diralg/probes.hpp"
#include "diralg/systems.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace diralg {

inline constexpr const char* kScenarioSchema = "diralg.scenario/1";

/// Exit codes of `run` and `check`.
enum ExitCode : int {
  kExitOk = 0,
  kExitDegenerate = 2,
  kExitStructure = 3,
  kExitUnknownSystem = 4,
  kExitMalformed = 5,
};

/// Malformed scenario document (exit 5).
class ScenarioError : public DiralgError {
 public:
  using DiralgError::DiralgError;
};

/// Valid document naming a system that does not exist (exit 4).
class UnknownSystemError : public DiralgError {
 public:
  using DiralgError::DiralgError;
};

struct TimeSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  Method method = Method::rk4;

  bool operator==(const TimeSpec&) const = default;
};

struct OutputSpec {
  std::string csv = "trajectory.csv";
  std::string report = "report.json";

  bool operator==(const OutputSpec&) const = default;
};

/// Structure checks a scenario may request.
const std::vector<std::string>& known_checks();

struct Scenario {
  std::string system;
  Params params;
  /// Explicit constraint. `unconstrained` records an explicit "none".
  std::optional<ConstraintSpec> constraint;
  bool unconstrained = false;
  Formalism formalism = Formalism::lagrangian;
  /// "closed_form" or "legendre" (Hamiltonian side only).
  std::string hamiltonian = "closed_form";
  std::vector<double> initial;
  TimeSpec time;
  std::vector<std::string> checks;
  int probes = 50;
  OutputSpec output;

  bool operator==(const Scenario&) const = default;
};

/// Throws ScenarioError or UnknownSystemError.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical document with every field spelled out.
nlohmann::json serialize_scenario(const Scenario& s);

BuildOptions build_options(const Scenario& s);

struct CheckOutcome {
  nlohmann::json report;
  bool all_passed = true;
};

/// Runs the requested checks (all applicable ones when the list is empty).
CheckOutcome run_checks(const Scenario& s, const System& sys, Execution exec);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  nlohmann::json report;
  std::string csv;
  std::optional<Trajectory> trajectory;
};

/// Builds, checks and integrates without touching the file system.
RunOutcome execute_scenario(const Scenario& s, Execution exec = Execution::parallel);

/// CSV text: t, state..., wrapped angles..., rates..., monitors...
std::string trajectory_csv(const System& sys, const Trajectory& traj);

/// `run`: executes and writes the CSV and report under out_dir.
RunOutcome run_scenario_file(const std::string& path, const std::string& out_dir);

struct SweepSpec {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int count = 1;
};

/// Parses PARAM=a:b:n.
SweepSpec parse_sweep(const std::string& text);

/// One trajectory per parameter value, in parallel; results land in
/// out_dir/sweep_<i>/ plus out_dir/sweep.json. Returns the largest exit code.
int run_sweep_file(const std::string& path, const std::string& out_dir, const SweepSpec& sweep);

/// `check`: structure checks only, report JSON on stdout.
int check_scenario_file(const std::string& path, std::string& report_text);

std::string list_systems_text();
nlohmann::json list_systems_json();

}  // namespace diralg
