#include "diralg/solver.hpp"

#include "diralg/finite_diff.hpp"
#include "diralg/linalg.hpp"

#include <cmath>
#include <sstream>

namespace diralg {

namespace {

constexpr int kMaxNewton = 50;
constexpr double kResidualTol = 1e-10;
constexpr double kStepTol = 1e-12;
constexpr double kMaxCondition = 1e12;

std::string describe_point(double t, const Vector& state) {
  std::ostringstream os;
  os.precision(10);
  os << "(t=" << t << ", state=[";
  for (Eigen::Index i = 0; i < state.size(); ++i) os << (i ? ", " : "") << state(i);
  os << "])";
  return os.str();
}

/// Left-null / range split of the rate matrix: alpha spans the row
/// combinations that do not see the rate.
struct RowSplit {
  Matrix alpha;
  Matrix beta;
};

RowSplit split_rows(const Matrix& a) {
  RowSplit s;
  const auto rows = a.rows();
  if (rows == 0) {
    s.alpha = Matrix(0, 0);
    s.beta = Matrix(0, 0);
    return s;
  }
  if (a.cols() == 0) {
    s.alpha = Matrix::Identity(rows, rows);
    s.beta = Matrix(rows, 0);
    return s;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  const Vector sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kRankTolerance * sv(0)) ++r;
  }
  s.beta = svd.matrixU().leftCols(r);
  s.alpha = svd.matrixU().rightCols(rows - r);
  return s;
}

/// State-constraint values P(s) b(s), with P the projector onto the rows that
/// do not see the rate. Smooth wherever the rank of a is locally constant.
Vector state_constraint(const AffineRows& raw) {
  const RowSplit s = split_rows(raw.a);
  if (s.alpha.cols() == 0) return Vector::Zero(raw.b.size());
  return s.alpha * (s.alpha.transpose() * raw.b);
}

struct NewtonResult {
  Vector x;
  int iterations = 0;
  double residual_norm = 0.0;
};

NewtonResult newton(const std::function<Vector(const Vector&)>& f, const Vector& guess,
                    const std::function<std::string()>& where) {
  NewtonResult out;
  out.x = guess;
  Vector r = f(out.x);
  if (!r.allFinite()) throw EvaluationError("rate residual is not finite at " + where());
  Vector last_sv;
  for (int it = 0; it < kMaxNewton; ++it) {
    const double scale = std::max(1.0, out.x.norm());
    // The first Jacobian is always formed so that an exact guess still gets
    // its conditioning checked.
    if (it > 0 && r.norm() <= 1e-14 * scale) break;
    const Matrix jac = fd_jacobian(f, out.x);
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    last_sv = svd.singularValues();
    const double smax = last_sv.size() ? last_sv(0) : 0.0;
    const double smin = last_sv.size() ? last_sv(last_sv.size() - 1) : 0.0;
    if (last_sv.size() == 0 || !(smin > 0.0) || smax / smin > kMaxCondition) {
      throw DegenerateDynamicsError("degenerate implicit dynamics at " + where(), last_sv);
    }
    if (r.norm() <= 1e-14 * scale) break;
    const Vector step = svd.solve(-r);
    out.x += step;
    ++out.iterations;
    r = f(out.x);
    if (!r.allFinite()) throw EvaluationError("rate residual is not finite at " + where());
    if (step.norm() <= kStepTol * std::max(1.0, out.x.norm())) break;
  }
  out.residual_norm = r.norm();
  if (out.residual_norm > kResidualTol) {
    std::ostringstream os;
    os << "Newton did not converge (|R| = " << out.residual_norm << ") at " << where();
    throw DegenerateDynamicsError(os.str(), last_sv);
  }
  return out;
}

template <class Fn>
auto with_step_context(int step, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = "step " + std::to_string(step) + ": ";
  try {
    return fn();
  } catch (const DegenerateDynamicsError& e) {
    throw DegenerateDynamicsError(prefix + e.what(), e.singular_values());
  } catch (const InitializationError& e) {
    throw InitializationError(prefix + e.what());
  } catch (const EvaluationError& e) {
    throw EvaluationError(prefix + e.what());
  } catch (const HyperregularityError& e) {
    throw HyperregularityError(prefix + e.what(), e.x(), e.xi());
  } catch (const StructureError& e) {
    throw StructureError(prefix + e.what(), e.numeric_rank());
  } catch (const ConstraintError& e) {
    throw ConstraintError(prefix + e.what());
  }
}

}  // namespace

ImplicitProblem::ImplicitProblem(int state_dim, ResidualFn residual, StateFn algebraic)
    : state_dim_(state_dim), algebraic_(std::move(algebraic)) {
  if (!residual) throw ContractError("implicit problem requires a residual");
  at_ = [residual = std::move(residual)](double t, const Vector& s) -> RateFunction {
    return [residual, t, s](const Vector& r) { return residual(t, s, r); };
  };
}

ImplicitProblem ImplicitProblem::from_affine_rows(int state_dim, AffineFn raw, StateFn phase) {
  ImplicitProblem prob(state_dim, [](double, const Vector&, const Vector& r) { return r; });
  prob.at_ = [raw, state_dim](double t, const Vector& s) -> RateFunction {
    const AffineRows rows = raw(t, s);
    if (rows.a.rows() != state_dim || rows.a.cols() != state_dim || rows.b.size() != state_dim) {
      throw StructureError("raw residual rows are not square in the rate");
    }
    const RowSplit split = split_rows(rows.a);
    if (split.alpha.cols() == 0) {
      return [rows](const Vector& r) -> Vector { return rows.a * r + rows.b; };
    }
    const auto h = [&raw](double tt, const Vector& ss) { return state_constraint(raw(tt, ss)); };
    const Matrix grad = fd_jacobian([&](const Vector& ss) { return h(t, ss); }, s);
    const double ht = fd_step(t);
    const Vector dhdt = (h(t + ht, s) - h(t - ht, s)) / (2.0 * ht);
    const Matrix top_a = split.alpha.transpose() * grad;
    const Vector top_b = split.alpha.transpose() * dhdt;
    const Matrix bottom_a = split.beta.transpose() * rows.a;
    const Vector bottom_b = split.beta.transpose() * rows.b;
    Matrix a(state_dim, state_dim);
    a << top_a, bottom_a;
    Vector b(state_dim);
    b << top_b, bottom_b;
    return [a, b](const Vector& r) -> Vector { return a * r + b; };
  };
  prob.algebraic_ = [raw, phase](double t, const Vector& s) -> Vector {
    const Vector h = state_constraint(raw(t, s));
    if (!phase) return h;
    const Vector ph = phase(t, s);
    Vector out(h.size() + ph.size());
    out << h, ph;
    return out;
  };
  return prob;
}

Vector ImplicitProblem::algebraic(double t, const Vector& state) const {
  if (!algebraic_) return Vector(0);
  return algebraic_(t, state);
}

void ImplicitProblem::set_projection_mask(std::vector<bool> mask) {
  if (!mask.empty() && static_cast<int>(mask.size()) != state_dim_) {
    throw ContractError("projection mask size does not match the state dimension");
  }
  mask_ = std::move(mask);
}

void ImplicitProblem::set_state_labels(std::vector<std::string> labels) {
  if (static_cast<int>(labels.size()) != state_dim_) {
    throw ContractError("state label count does not match the state dimension");
  }
  labels_ = std::move(labels);
}

Method parse_method(const std::string& name) {
  if (name == "rk4") return Method::rk4;
  if (name == "implicit-midpoint" || name == "implicit_midpoint") return Method::implicit_midpoint;
  throw ContractError("unknown integration method '" + name + "'");
}

std::string method_name(Method m) { return m == Method::rk4 ? "rk4" : "implicit-midpoint"; }

RateSolution solve_rate_detailed(const ImplicitProblem& prob, double t, const Vector& state,
                                 const Vector& rate_guess) {
  if (state.size() != prob.state_dim() || rate_guess.size() != prob.state_dim()) {
    throw ContractError("solve_rate: state or rate guess has the wrong dimension");
  }
  const auto f = prob.at(t, state);
  const NewtonResult res = newton(f, rate_guess, [&] { return describe_point(t, state); });
  return RateSolution{res.x, res.iterations, res.residual_norm};
}

Vector solve_rate(const ImplicitProblem& prob, double t, const Vector& state,
                  const Vector& rate_guess) {
  return solve_rate_detailed(prob, t, state, rate_guess).rate;
}

Vector project_initial(const ImplicitProblem& prob, const Vector& guess, double t) {
  if (!prob.has_algebraic()) return guess;
  if (guess.size() != prob.state_dim()) throw ContractError("project_initial: wrong state size");
  std::vector<int> free;
  const auto& mask = prob.projection_mask();
  for (int i = 0; i < prob.state_dim(); ++i) {
    if (mask.empty() || mask[i]) free.push_back(i);
  }
  Vector s = guess;
  Vector g = prob.algebraic(t, s);
  if (g.size() == 0 || g.norm() <= 1e-13) return s;
  for (int it = 0; it < 100; ++it) {
    Vector sub(static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i) sub(static_cast<Eigen::Index>(i)) = s(free[i]);
    const auto restricted = [&](const Vector& z) {
      Vector full = s;
      for (std::size_t i = 0; i < free.size(); ++i) full(free[i]) = z(static_cast<Eigen::Index>(i));
      return prob.algebraic(t, full);
    };
    const Matrix jac = fd_jacobian(restricted, sub);
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTolerance);
    const Vector step = svd.solve(-g);
    for (std::size_t i = 0; i < free.size(); ++i) s(free[i]) += step(static_cast<Eigen::Index>(i));
    g = prob.algebraic(t, s);
    if (g.norm() <= 1e-13 || step.norm() <= 1e-15 * std::max(1.0, s.norm())) break;
  }
  if (!(g.norm() <= 1e-10)) {
    std::ostringstream os;
    os << "projection onto the algebraic constraints did not converge (|g| = " << g.norm() << ")";
    throw InitializationError(os.str());
  }
  return s;
}

Trajectory integrate(const ImplicitProblem& prob, const Vector& state0, double t0, double t1,
                     double dt, Method method) {
  if (!(dt > 0.0)) throw ContractError("integrate: dt must be positive");
  if (!(t1 >= t0)) throw ContractError("integrate: t1 must not precede t0");
  const int steps = std::max(0, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
  const double h = steps > 0 ? (t1 - t0) / steps : 0.0;

  Trajectory traj;
  for (const auto& m : prob.monitors()) {
    traj.monitor_order.push_back(m.name);
    traj.monitors[m.name] = {};
  }
  const auto record = [&](double t, const Vector& s, const RateSolution& sol, int iters,
                          double resid) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.rates.push_back(sol.rate);
    traj.newton_iterations.push_back(iters);
    traj.residual_norms.push_back(resid);
    for (const auto& m : prob.monitors()) traj.monitors[m.name].push_back(m.eval(t, s));
  };
  const auto reproject = [&](double t, const Vector& s) {
    if (!prob.has_algebraic()) return s;
    const Vector g = prob.algebraic(t, s);
    if (g.size() == 0 || g.norm() <= 1e-13) return s;
    return project_initial(prob, s, t);
  };

  Vector s = with_step_context(0, [&] { return project_initial(prob, state0, t0); });
  RateSolution current = with_step_context(
      0, [&] { return solve_rate_detailed(prob, t0, s, Vector::Zero(prob.state_dim())); });
  record(t0, s, current, current.iterations, current.residual_norm);

  for (int i = 1; i <= steps; ++i) {
    const double t = t0 + (i - 1) * h;
    const double t_next = i == steps ? t1 : t0 + i * h;
    with_step_context(i, [&] {
      int iters = 0;
      double resid = 0.0;
      const auto solve = [&](double ts, const Vector& ss, const Vector& guess) {
        const RateSolution sol = solve_rate_detailed(prob, ts, ss, guess);
        iters += sol.iterations;
        resid = std::max(resid, sol.residual_norm);
        return sol.rate;
      };
      Vector next;
      if (method == Method::rk4) {
        const Vector& k1 = current.rate;
        const Vector k2 = solve(t + 0.5 * h, s + 0.5 * h * k1, k1);
        const Vector k3 = solve(t + 0.5 * h, s + 0.5 * h * k2, k2);
        const Vector k4 = solve(t + h, s + h * k3, k3);
        next = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      } else {
        const auto g = [&](const Vector& r) {
          return prob.residual(t + 0.5 * h, s + 0.5 * h * r, r);
        };
        const NewtonResult mid =
            newton(g, current.rate, [&] { return describe_point(t + 0.5 * h, s); });
        iters += mid.iterations;
        resid = std::max(resid, mid.residual_norm);
        next = s + h * mid.x;
      }
      s = reproject(t_next, next);
      current = solve_rate_detailed(prob, t_next, s, current.rate);
      record(t_next, s, current, iters + current.iterations, std::max(resid, current.residual_norm));
      return 0;
    });
  }
  return traj;
}

}  // namespace diralg
