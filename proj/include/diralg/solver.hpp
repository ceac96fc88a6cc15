#pragma once

#include "diralg/types.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace diralg {

/// Raw residual that is affine in the rate: R(rate) = a * rate + b.
struct AffineRows {
  Matrix a;
  Vector b;
};

struct Monitor {
  std::string name;
  std::function<double(double t, const Vector& state)> eval;
};

/// Residual system R(t, state, rate) = 0, square in the rate, with an
/// algebraic channel g(t, state) = 0.
class ImplicitProblem {
 public:
  using RateFunction = std::function<Vector(const Vector& rate)>;
  using ResidualFn = std::function<Vector(double, const Vector&, const Vector&)>;
  using StateFn = std::function<Vector(double, const Vector&)>;
  using AffineFn = std::function<AffineRows(double, const Vector&)>;

  ImplicitProblem(int state_dim, ResidualFn residual, StateFn algebraic = {});

  /// Builds the square system from raw rows that are affine in the rate.
  ///
  /// Combinations of rows that do not see the rate are state constraints
  /// h(t, s) = 0. They join the algebraic channel and are replaced in the
  /// square system by dh/dt = dh/ds * rate + dh/dt. `phase` adds further
  /// algebraic rows (phase-bundle membership) that stay out of the square
  /// system.
  static ImplicitProblem from_affine_rows(int state_dim, AffineFn raw, StateFn phase = {});

  int state_dim() const { return state_dim_; }

  /// Residual closure at a fixed state. State-dependent work happens once.
  RateFunction at(double t, const Vector& state) const { return at_(t, state); }
  Vector residual(double t, const Vector& state, const Vector& rate) const {
    return at_(t, state)(rate);
  }
  Vector algebraic(double t, const Vector& state) const;
  bool has_algebraic() const { return static_cast<bool>(algebraic_); }

  /// Entries project_initial may move (all when empty).
  const std::vector<bool>& projection_mask() const { return mask_; }
  void set_projection_mask(std::vector<bool> mask);

  const std::vector<std::string>& state_labels() const { return labels_; }
  void set_state_labels(std::vector<std::string> labels);

  const std::vector<Monitor>& monitors() const { return monitors_; }
  void add_monitor(Monitor m) { monitors_.push_back(std::move(m)); }

 private:
  int state_dim_;
  std::function<RateFunction(double, const Vector&)> at_;
  StateFn algebraic_;
  std::vector<bool> mask_;
  std::vector<std::string> labels_;
  std::vector<Monitor> monitors_;
};

enum class Method { rk4, implicit_midpoint };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> rates;
  std::map<std::string, std::vector<double>> monitors;
  std::vector<int> newton_iterations;
  std::vector<double> residual_norms;
  std::vector<std::string> monitor_order;
};

struct RateSolution {
  Vector rate;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Newton on the rate with a finite-difference Jacobian. Converged when
/// |R| <= 1e-10 or the relative step is <= 1e-12; a condition number above
/// 1e12 throws DegenerateDynamicsError with the singular values.
RateSolution solve_rate_detailed(const ImplicitProblem& prob, double t, const Vector& state,
                                 const Vector& rate_guess);
Vector solve_rate(const ImplicitProblem& prob, double t, const Vector& state,
                  const Vector& rate_guess);

/// Gauss-Newton least-squares projection onto {algebraic = 0}; moves only the
/// masked entries. Throws InitializationError if |g| > 1e-10 after 100
/// iterations.
Vector project_initial(const ImplicitProblem& prob, const Vector& guess, double t = 0.0);

/// Fixed-step integration with re-projection after every step.
Trajectory integrate(const ImplicitProblem& prob, const Vector& state0, double t0, double t1,
                     double dt, Method method);

}  // namespace diralg
