#pragma once

#include "diralg/dirac.hpp"
#include "diralg/solver.hpp"

#include <functional>
#include <optional>

namespace diralg {

using PairScalar = std::function<double(const Vector&, const Vector&)>;
using PairVector = std::function<Vector(const Vector&, const Vector&)>;
using PairMatrix = std::function<Matrix(const Vector&, const Vector&)>;

/// Optional analytic partials of a Lagrangian L(x, y).
struct LagrangianPartials {
  PairVector grad_x;   // dL/dx, length n
  PairVector grad_y;   // dL/dy, length m
  PairMatrix hess_yy;  // m x m
  PairMatrix hess_yx;  // m x n, entry (i, a) = d2L / dy^i dx^a
};

/// L : E -> R. Missing partials come from central differences; supplied ones
/// are checked against differences (1e-5 relative) on probe points.
class LagrangianDef {
 public:
  LagrangianDef(int base_dim, int fiber_dim, PairScalar value, LagrangianPartials partials = {});

  using TimeScalar = std::function<double(double, const Vector&, const Vector&)>;
  using TimeVector = std::function<Vector(double, const Vector&, const Vector&)>;
  using TimeMatrix = std::function<Matrix(double, const Vector&, const Vector&)>;
  struct TimePartials {
    TimeVector grad_x;
    TimeVector grad_y;
    TimeMatrix hess_yy;
    TimeMatrix hess_yx;
  };

  /// L(t, x, y) as a Lagrangian on the extended bundle whose first base
  /// coordinate is time. Time derivatives come from central differences.
  static LagrangianDef time_dependent(int base_dim, int fiber_dim, TimeScalar value,
                                      TimePartials partials = {});

  int base_dim() const { return n_; }
  int fiber_dim() const { return m_; }

  double value(const Vector& x, const Vector& y) const { return value_(x, y); }
  Vector grad_x(const Vector& x, const Vector& y) const;
  Vector grad_y(const Vector& x, const Vector& y) const;
  Matrix hess_yy(const Vector& x, const Vector& y) const;
  Matrix hess_yx(const Vector& x, const Vector& y) const;

 private:
  int n_;
  int m_;
  PairScalar value_;
  LagrangianPartials partials_;
};

struct HamiltonianPartials {
  PairVector grad_x;   // dH/dx
  PairVector grad_xi;  // dH/dxi
};

/// H : E* -> R, same partial conventions as LagrangianDef.
class HamiltonianDef {
 public:
  HamiltonianDef(int base_dim, int fiber_dim, PairScalar value, HamiltonianPartials partials = {},
                 bool validate = true);

  int base_dim() const { return n_; }
  int fiber_dim() const { return m_; }

  double value(const Vector& x, const Vector& xi) const { return value_(x, xi); }
  Vector grad_x(const Vector& x, const Vector& xi) const;
  Vector grad_xi(const Vector& x, const Vector& xi) const;

 private:
  int n_;
  int m_;
  PairScalar value_;
  HamiltonianPartials partials_;
};

struct ControlPartials {
  PairMatrix f_x;     // m x n
  PairMatrix f_u;     // m x q
  PairVector cost_x;  // n
  PairVector cost_u;  // q
};

/// Control-parametrized vakonomic data: y = f(x, u) with running cost L(x, u).
class ControlSystem {
 public:
  ControlSystem(int base_dim, int fiber_dim, int control_dim, PairVector f, PairScalar cost,
                ControlPartials partials = {});

  int base_dim() const { return n_; }
  int fiber_dim() const { return m_; }
  int control_dim() const { return q_; }

  Vector f(const Vector& x, const Vector& u) const { return f_(x, u); }
  double cost(const Vector& x, const Vector& u) const { return cost_(x, u); }
  Matrix f_x(const Vector& x, const Vector& u) const;
  Matrix f_u(const Vector& x, const Vector& u) const;
  Vector cost_x(const Vector& x, const Vector& u) const;
  Vector cost_u(const Vector& x, const Vector& u) const;

 private:
  int n_;
  int m_;
  int q_;
  PairVector f_;
  PairScalar cost_;
  ControlPartials partials_;
};

struct LegendreImage {
  Vector x;
  Vector xi;
  /// Filled when a structure was supplied: (x, xi) in Ph_D.
  std::optional<PhaseMembership> phase;
};

/// Vertical derivative (x, y) -> (x, dL/dy).
LegendreImage legendre_map(const LagrangianDef& l, const Vector& x, const Vector& y,
                           const DiracAlgebroid* d = nullptr);

struct DynamicsResidual {
  Vector residual;
  PhaseMembership phase;
};

/// Euler-Lagrange residual with xi = dL/dy, p = -dL/dx and
/// xidot = d2L/dydx xdot + d2L/dydy ydot.
DynamicsResidual el_residual(const DiracAlgebroid& d, const LagrangianDef& l, const Vector& x,
                             const Vector& y, const Vector& xdot, const Vector& ydot);

/// Hamilton residual with y = dH/dxi and p = dH/dx.
DynamicsResidual hamilton_residual(const DiracAlgebroid& d, const HamiltonianDef& h,
                                   const Vector& x, const Vector& xi, const Vector& xdot,
                                   const Vector& xidot);

struct LegendreSettings {
  int max_iterations = 50;
  double tolerance = 1e-12;
  int multistart = 4;
};

/// H(x, xi) = xi . y - L(x, y) with y solving dL/dy(x, y) = xi (Newton from
/// y = 0, then deterministic restarts). The partials use dH/dxi = y and
/// dH/dx = -dL/dx(x, y).
HamiltonianDef legendre_transform(const LagrangianDef& l, LegendreSettings settings = {});

/// Inverse vertical derivative; throws HyperregularityError on failure.
Vector inverse_legendre(const LagrangianDef& l, const Vector& x, const Vector& xi,
                        const LegendreSettings& settings = {});

struct NonholonomicResidual {
  /// xdot - rho y (n rows), constraint rows on y, then one row per free index
  /// kappa: d/dt(dL/dy^kappa) - c^j_{i kappa} y^i dL/dy^j - rho^a_kappa dL/dx^a.
  Vector residual;
  /// x^A on the support.
  Vector support;
};

/// Direct evaluation of the constrained Euler-Lagrange equations on a skew
/// algebroid with an adapted constraint.
NonholonomicResidual nonholonomic_el_residual(const SkewAlgebroid& a,
                                              const std::variant<LinearConstraint, AffineConstraint>& v,
                                              const LagrangianDef& l, const Vector& x,
                                              const Vector& y, const Vector& xdot,
                                              const Vector& ydot);

/// Extended structure on E x R over M x R; time is the first base coordinate.
DiracAlgebroid time_extend(const DiracAlgebroid& d);

/// Rows: velocity equations at y = f(x, u); momentum equations with
/// p = xi . df/dx - dL/dx; stationarity xi . df/du - dL/du.
Vector pmp_residual(const ControlSystem& sys, const DiracAlgebroid& d, const Vector& x,
                    const Vector& u, const Vector& xi, const Vector& xdot, const Vector& xidot);

/// Square problems. States: (x, y) for Lagrangian, (x, xi) for Hamiltonian,
/// (x, u, xi) for PMP. The phase equations of D form the extra algebraic rows.
ImplicitProblem lagrangian_problem(const DiracAlgebroid& d, const LagrangianDef& l);
ImplicitProblem hamiltonian_problem(const DiracAlgebroid& d, const HamiltonianDef& h);
ImplicitProblem pmp_problem(const ControlSystem& sys, const DiracAlgebroid& d);

/// E_L = y . dL/dy - L.
double energy_monitor(const LagrangianDef& l, const Vector& x, const Vector& y);

struct AdmissibilityReport {
  std::vector<double> norms;
  double max_norm = 0.0;
};

using VelocitySplit = std::function<VelocityPair(const Vector& state, const Vector& rate)>;

/// Velocity residual along a recorded trajectory.
AdmissibilityReport admissibility_report(const DiracAlgebroid& d, const Trajectory& traj,
                                         const VelocitySplit& split);
AdmissibilityReport admissibility_report(const DiracAlgebroid& d, const LagrangianDef& l,
                                         const Trajectory& traj);
AdmissibilityReport admissibility_report(const DiracAlgebroid& d, const HamiltonianDef& h,
                                         const Trajectory& traj);

}  // namespace diralg
