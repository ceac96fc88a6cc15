#pragma once

#include "diralg/constraints.hpp"
#include "diralg/dynamics.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace diralg {

using Params = std::map<std::string, double>;

enum class Formalism { lagrangian, hamiltonian, pmp };

Formalism parse_formalism(const std::string& name);
std::string formalism_name(Formalism f);

struct ParamSpec {
  std::string name;
  double default_value;
  std::string description;
};

struct SystemInfo {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::vector<Formalism> formalisms;
  /// Accepted lengths of the scenario "initial" vector and what they mean.
  std::string initial;
};

/// The six built-in systems, in catalog order.
const std::vector<SystemInfo>& system_catalog();
const SystemInfo* find_system(const std::string& name);

/// Velocity-side constraint selectors as written in a scenario (0-based).
struct ConstraintSpec {
  bool affine = false;
  std::vector<int> base_selector;
  std::vector<int> fiber_selector;
  int unit_index = -1;

  bool operator==(const ConstraintSpec&) const = default;
};

struct BuildOptions {
  Formalism formalism = Formalism::lagrangian;
  Params params;
  /// Explicit constraint; rolling_disc uses y^2 = y^3 = 0 when absent.
  std::optional<ConstraintSpec> constraint;
  /// Drop the default constraint of rolling_disc.
  bool unconstrained = false;
  /// Hamiltonian side: numeric Legendre transform of L instead of the
  /// closed-form H.
  bool legendre_hamiltonian = false;
};

struct System {
  std::string name;
  Params params;
  Formalism formalism = Formalism::lagrangian;
  /// The unconstrained structure and, when a constraint is active, the
  /// induced one (equal otherwise).
  std::shared_ptr<const DiracAlgebroid> base;
  std::shared_ptr<const DiracAlgebroid> structure;
  std::optional<SkewAlgebroid> algebroid;
  std::optional<LagrangianDef> lagrangian;
  /// Closed-form (or Legendre-transformed) H; set for every formalism except
  /// pmp.
  std::optional<HamiltonianDef> hamiltonian;
  std::optional<ControlSystem> control;
  std::optional<ConstraintSpec> constraint;
  /// Only filled for linear constraints.
  std::optional<LinearConstraint> linear_constraint;
  /// Always set by build_system.
  std::optional<ImplicitProblem> problem;
  /// State indices holding angles (reported modulo 2 pi in extra columns).
  std::vector<int> angle_columns;
  /// Scenario "initial" vector (velocity variables, or (x, xi) / (x, u, xi)
  /// for pmp) and start time to a state guess for `problem`.
  std::function<Vector(const Vector&, double)> initial_map;

  Vector initial_state(const Vector& initial, double t0 = 0.0) const {
    return initial_map(initial, t0);
  }
};

/// Throws ContractError for unknown names, parameters or formalisms.
System build_system(const std::string& name, const BuildOptions& options);

/// Per-system parameter defaults merged with user values.
Params resolve_params(const SystemInfo& info, const Params& user);

// Direct constructors used by tests and benchmarks.
SkewAlgebroid tangent_algebroid(int n);
SkewAlgebroid rolling_disc_algebroid(double radius);
SkewAlgebroid so3_algebroid();
LagrangianDef rolling_disc_lagrangian(double mass, double radius, double j1, double j2);
HamiltonianDef rolling_disc_hamiltonian(double mass, double radius, double j1, double j2);
LagrangianDef euler_top_lagrangian(const Vector& inertia);
HamiltonianDef euler_top_hamiltonian(const Vector& inertia);
LagrangianDef oscillator_lagrangian(double mass, double spring, int dim = 1);
HamiltonianDef oscillator_hamiltonian(double mass, double spring, int dim = 1);

}  // namespace diralg
