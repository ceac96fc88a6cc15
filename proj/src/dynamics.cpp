#include "diralg/dynamics.hpp"

#include "diralg/finite_diff.hpp"
#include "diralg/linalg.hpp"
#include "diralg/probe.hpp"

#include <cmath>
#include <sstream>

namespace diralg {

namespace {

constexpr int kPartialProbes = 10;
constexpr double kPartialTol = 1e-5;
// Residual accepted from the inverse Legendre map once Newton stops moving.
constexpr double kStallTolerance = 1e-8;

void check_partial(const char* what, const Matrix& analytic, const Matrix& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    std::ostringstream os;
    os << what << " has shape " << analytic.rows() << "x" << analytic.cols() << ", expected "
       << numeric.rows() << "x" << numeric.cols();
    throw EvaluationError(os.str());
  }
  if (!partials_agree(analytic, numeric, kPartialTol)) {
    std::ostringstream os;
    os << what << " disagrees with central differences";
    throw EvaluationError(os.str());
  }
}

Matrix as_column(const Vector& v) { return Matrix(v); }

struct Blocks {
  Matrix vel_x;
  Matrix vel_y;
  Matrix mom_p;
  Matrix mom_xi;
};

Blocks split_blocks(const LocalForm& f, int n) {
  const auto total = f.vel.cols();
  const auto m = total - n;
  return Blocks{f.vel.leftCols(n), f.vel.rightCols(m), f.mom.leftCols(n), f.mom.rightCols(m)};
}

void require_square(const LocalForm& f, int total) {
  if (f.rows() != total) {
    std::ostringstream os;
    os << "structure has " << f.rows() << " defining equations, expected " << total;
    throw StructureError(os.str(), f.rows());
  }
}

bool has_base_constraints(const DiracAlgebroid& d) {
  const PhaseForm f = phase_form(d, Vector::Zero(d.chart().base_dim()));
  for (Eigen::Index r = 0; r < f.xi_coeff.rows(); ++r) {
    if (f.xi_coeff.row(r).norm() == 0.0) return true;
  }
  return false;
}

std::vector<std::string> base_labels(const DiracAlgebroid& d) { return d.chart().base_labels(); }

void require_match(const DiracAlgebroid& d, int n, int m, const char* what) {
  if (d.chart().base_dim() != n || d.chart().fiber_dim() != m) {
    std::ostringstream os;
    os << what << " dimensions (" << n << ", " << m << ") do not match the structure ("
       << d.chart().base_dim() << ", " << d.chart().fiber_dim() << ")";
    throw ContractError(os.str());
  }
}

}  // namespace

LagrangianDef::LagrangianDef(int base_dim, int fiber_dim, PairScalar value,
                             LagrangianPartials partials)
    : n_(base_dim), m_(fiber_dim), value_(std::move(value)), partials_(std::move(partials)) {
  if (!value_) throw ContractError("Lagrangian requires a value function");
  ProbeSampler sampler(0x1a6eULL);
  for (int p = 0; p < kPartialProbes; ++p) {
    const Vector x = sampler.base_point(n_);
    const Vector y = sampler.fiber_point(m_);
    if (partials_.grad_x) {
      check_partial("dL/dx", as_column(partials_.grad_x(x, y)),
                    as_column(fd_gradient([&](const Vector& z) { return value_(z, y); }, x)));
    }
    if (partials_.grad_y) {
      check_partial("dL/dy", as_column(partials_.grad_y(x, y)),
                    as_column(fd_gradient([&](const Vector& z) { return value_(x, z); }, y)));
    }
    if (partials_.hess_yy) {
      check_partial("d2L/dydy", partials_.hess_yy(x, y),
                    fd_jacobian([&](const Vector& z) { return grad_y(x, z); }, y,
                                partials_.grad_y ? FdStep::first : FdStep::second));
    }
    if (partials_.hess_yx) {
      check_partial("d2L/dydx", partials_.hess_yx(x, y),
                    fd_jacobian([&](const Vector& z) { return grad_y(z, y); }, x,
                                partials_.grad_y ? FdStep::first : FdStep::second));
    }
  }
}

LagrangianDef LagrangianDef::time_dependent(int base_dim, int fiber_dim, TimeScalar value,
                                            TimePartials partials) {
  const auto split = [](const Vector& xe) { return std::make_pair(xe(0), Vector(xe.tail(xe.size() - 1))); };
  PairScalar ext_value = [value, split](const Vector& xe, const Vector& y) {
    const auto [t, x] = split(xe);
    return value(t, x, y);
  };
  LagrangianPartials ext;
  if (partials.grad_y) {
    ext.grad_y = [g = partials.grad_y, split](const Vector& xe, const Vector& y) {
      const auto [t, x] = split(xe);
      return g(t, x, y);
    };
  }
  if (partials.grad_x) {
    ext.grad_x = [g = partials.grad_x, value, split](const Vector& xe, const Vector& y) {
      const auto [t, x] = split(xe);
      const double h = fd_step(t);
      Vector out(xe.size());
      out(0) = (value(t + h, x, y) - value(t - h, x, y)) / (2.0 * h);
      out.tail(x.size()) = g(t, x, y);
      return out;
    };
  }
  if (partials.hess_yy) {
    ext.hess_yy = [g = partials.hess_yy, split](const Vector& xe, const Vector& y) {
      const auto [t, x] = split(xe);
      return g(t, x, y);
    };
  }
  if (partials.hess_yx && partials.grad_y) {
    ext.hess_yx = [g = partials.hess_yx, gy = partials.grad_y, split](const Vector& xe,
                                                                        const Vector& y) {
      const auto [t, x] = split(xe);
      const double h = fd_step(t);
      Matrix out(y.size(), xe.size());
      out.col(0) = (gy(t + h, x, y) - gy(t - h, x, y)) / (2.0 * h);
      out.rightCols(x.size()) = g(t, x, y);
      return out;
    };
  }
  return LagrangianDef(base_dim + 1, fiber_dim, ext_value, ext);
}

Vector LagrangianDef::grad_x(const Vector& x, const Vector& y) const {
  if (partials_.grad_x) return partials_.grad_x(x, y);
  return fd_gradient([&](const Vector& z) { return value_(z, y); }, x);
}

Vector LagrangianDef::grad_y(const Vector& x, const Vector& y) const {
  if (partials_.grad_y) return partials_.grad_y(x, y);
  return fd_gradient([&](const Vector& z) { return value_(x, z); }, y);
}

Matrix LagrangianDef::hess_yy(const Vector& x, const Vector& y) const {
  if (partials_.hess_yy) return partials_.hess_yy(x, y);
  return fd_jacobian([&](const Vector& z) { return grad_y(x, z); }, y,
                     partials_.grad_y ? FdStep::first : FdStep::second);
}

Matrix LagrangianDef::hess_yx(const Vector& x, const Vector& y) const {
  if (partials_.hess_yx) return partials_.hess_yx(x, y);
  if (x.size() == 0) return Matrix(y.size(), 0);
  return fd_jacobian([&](const Vector& z) { return grad_y(z, y); }, x,
                     partials_.grad_y ? FdStep::first : FdStep::second);
}

HamiltonianDef::HamiltonianDef(int base_dim, int fiber_dim, PairScalar value,
                               HamiltonianPartials partials, bool validate)
    : n_(base_dim), m_(fiber_dim), value_(std::move(value)), partials_(std::move(partials)) {
  if (!value_) throw ContractError("Hamiltonian requires a value function");
  if (!validate) return;
  ProbeSampler sampler(0x4a31ULL);
  for (int p = 0; p < kPartialProbes; ++p) {
    const Vector x = sampler.base_point(n_);
    const Vector xi = sampler.fiber_point(m_);
    if (partials_.grad_x) {
      check_partial("dH/dx", as_column(partials_.grad_x(x, xi)),
                    as_column(fd_gradient([&](const Vector& z) { return value_(z, xi); }, x)));
    }
    if (partials_.grad_xi) {
      check_partial("dH/dxi", as_column(partials_.grad_xi(x, xi)),
                    as_column(fd_gradient([&](const Vector& z) { return value_(x, z); }, xi)));
    }
  }
}

Vector HamiltonianDef::grad_x(const Vector& x, const Vector& xi) const {
  if (partials_.grad_x) return partials_.grad_x(x, xi);
  return fd_gradient([&](const Vector& z) { return value_(z, xi); }, x);
}

Vector HamiltonianDef::grad_xi(const Vector& x, const Vector& xi) const {
  if (partials_.grad_xi) return partials_.grad_xi(x, xi);
  return fd_gradient([&](const Vector& z) { return value_(x, z); }, xi);
}

ControlSystem::ControlSystem(int base_dim, int fiber_dim, int control_dim, PairVector f,
                             PairScalar cost, ControlPartials partials)
    : n_(base_dim),
      m_(fiber_dim),
      q_(control_dim),
      f_(std::move(f)),
      cost_(std::move(cost)),
      partials_(std::move(partials)) {
  if (q_ < 1) throw ContractError("control dimension must be >= 1");
  if (!f_ || !cost_) throw ContractError("control system requires f and a running cost");
  ProbeSampler sampler(0xc0417ULL);
  for (int p = 0; p < kPartialProbes; ++p) {
    const Vector x = sampler.base_point(n_);
    const Vector u = sampler.uniform(q_);
    if (f_(x, u).size() != m_) throw ContractError("f(x, u) must have fiber dimension");
    if (partials_.f_x) {
      check_partial("df/dx", partials_.f_x(x, u),
                    fd_jacobian([&](const Vector& z) { return f_(z, u); }, x));
    }
    if (partials_.f_u) {
      check_partial("df/du", partials_.f_u(x, u),
                    fd_jacobian([&](const Vector& z) { return f_(x, z); }, u));
    }
    if (partials_.cost_x) {
      check_partial("dL/dx", as_column(partials_.cost_x(x, u)),
                    as_column(fd_gradient([&](const Vector& z) { return cost_(z, u); }, x)));
    }
    if (partials_.cost_u) {
      check_partial("dL/du", as_column(partials_.cost_u(x, u)),
                    as_column(fd_gradient([&](const Vector& z) { return cost_(x, z); }, u)));
    }
  }
}

Matrix ControlSystem::f_x(const Vector& x, const Vector& u) const {
  if (partials_.f_x) return partials_.f_x(x, u);
  if (x.size() == 0) return Matrix(m_, 0);
  return fd_jacobian([&](const Vector& z) { return f_(z, u); }, x);
}

Matrix ControlSystem::f_u(const Vector& x, const Vector& u) const {
  if (partials_.f_u) return partials_.f_u(x, u);
  return fd_jacobian([&](const Vector& z) { return f_(x, z); }, u);
}

Vector ControlSystem::cost_x(const Vector& x, const Vector& u) const {
  if (partials_.cost_x) return partials_.cost_x(x, u);
  return fd_gradient([&](const Vector& z) { return cost_(z, u); }, x);
}

Vector ControlSystem::cost_u(const Vector& x, const Vector& u) const {
  if (partials_.cost_u) return partials_.cost_u(x, u);
  return fd_gradient([&](const Vector& z) { return cost_(x, z); }, u);
}

LegendreImage legendre_map(const LagrangianDef& l, const Vector& x, const Vector& y,
                           const DiracAlgebroid* d) {
  LegendreImage out{x, l.grad_y(x, y), std::nullopt};
  if (d != nullptr) out.phase = phase_membership(*d, x, out.xi);
  return out;
}

DynamicsResidual el_residual(const DiracAlgebroid& d, const LagrangianDef& l, const Vector& x,
                             const Vector& y, const Vector& xdot, const Vector& ydot) {
  require_match(d, l.base_dim(), l.fiber_dim(), "Lagrangian");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  if (x.size() != n || xdot.size() != n || y.size() != m || ydot.size() != m) {
    throw ContractError("el_residual: state or rate has the wrong size");
  }
  const LocalForm f = local_form(d, x);
  const Vector xi = l.grad_y(x, y);
  const Vector p = -l.grad_x(x, y);
  const Vector xidot = l.hess_yx(x, y) * xdot + l.hess_yy(x, y) * ydot;
  Vector v(n + m);
  v << xdot, y;
  Vector core(n + m);
  core << p, xidot;
  return DynamicsResidual{f.residual(v, core, xi), phase_membership(d, x, xi)};
}

DynamicsResidual hamilton_residual(const DiracAlgebroid& d, const HamiltonianDef& h,
                                   const Vector& x, const Vector& xi, const Vector& xdot,
                                   const Vector& xidot) {
  require_match(d, h.base_dim(), h.fiber_dim(), "Hamiltonian");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  if (x.size() != n || xdot.size() != n || xi.size() != m || xidot.size() != m) {
    throw ContractError("hamilton_residual: state or rate has the wrong size");
  }
  const LocalForm f = local_form(d, x);
  Vector v(n + m);
  v << xdot, h.grad_xi(x, xi);
  Vector core(n + m);
  core << h.grad_x(x, xi), xidot;
  return DynamicsResidual{f.residual(v, core, xi), phase_membership(d, x, xi)};
}

Vector inverse_legendre(const LagrangianDef& l, const Vector& x, const Vector& xi,
                        const LegendreSettings& settings) {
  const int m = l.fiber_dim();
  const double tol = settings.tolerance * std::max(1.0, xi.norm());
  std::vector<Vector> starts{Vector::Zero(m), xi};
  ProbeSampler sampler(0x1e6e7dULL, 2.0 * std::max(1.0, xi.lpNorm<Eigen::Infinity>()));
  for (int s = 0; s < settings.multistart; ++s) starts.push_back(sampler.fiber_point(m));

  for (const Vector& start : starts) {
    Vector y = start;
    bool ok = false;
    for (int it = 0; it < settings.max_iterations; ++it) {
      const Vector r = l.grad_y(x, y) - xi;
      if (!r.allFinite()) break;
      if (r.norm() <= tol) {
        ok = true;
        break;
      }
      const Matrix hess = l.hess_yy(x, y);
      Eigen::JacobiSVD<Matrix> svd(hess, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vector sv = svd.singularValues();
      if (sv.size() == 0 || !(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e12) break;
      const Vector step = svd.solve(r);
      y -= step;
      // Difference-based partials stall near 1e-10; a vanishing step with a
      // small residual is accepted as converged.
      if (step.norm() <= 1e-9 * std::max(1.0, y.norm()) &&
          (l.grad_y(x, y) - xi).norm() <= kStallTolerance * std::max(1.0, xi.norm())) {
        ok = true;
        break;
      }
    }
    if (ok) {
      // One polishing step keeps the inverse at roundoff level.
      const Vector r = l.grad_y(x, y) - xi;
      const Vector y2 = y - l.hess_yy(x, y).fullPivLu().solve(r);
      if ((l.grad_y(x, y2) - xi).norm() < r.norm()) y = y2;
      return y;
    }
  }
  throw HyperregularityError("inverse Legendre map failed to converge", x, xi);
}

HamiltonianDef legendre_transform(const LagrangianDef& l, LegendreSettings settings) {
  const auto lag = std::make_shared<const LagrangianDef>(l);
  PairScalar value = [lag, settings](const Vector& x, const Vector& xi) {
    const Vector y = inverse_legendre(*lag, x, xi, settings);
    return xi.dot(y) - lag->value(x, y);
  };
  HamiltonianPartials partials;
  partials.grad_xi = [lag, settings](const Vector& x, const Vector& xi) {
    return inverse_legendre(*lag, x, xi, settings);
  };
  partials.grad_x = [lag, settings](const Vector& x, const Vector& xi) {
    const Vector y = inverse_legendre(*lag, x, xi, settings);
    return Vector(-lag->grad_x(x, y));
  };
  return HamiltonianDef(l.base_dim(), l.fiber_dim(), value, partials, false);
}

NonholonomicResidual nonholonomic_el_residual(
    const SkewAlgebroid& a, const std::variant<LinearConstraint, AffineConstraint>& v,
    const LagrangianDef& l, const Vector& x, const Vector& y, const Vector& xdot,
    const Vector& ydot) {
  const int n = a.chart().base_dim();
  const int m = a.chart().fiber_dim();
  const bool affine = std::holds_alternative<AffineConstraint>(v);
  const LinearConstraint& model =
      affine ? std::get<AffineConstraint>(v).model() : std::get<LinearConstraint>(v);
  const int unit = affine ? std::get<AffineConstraint>(v).unit_index() : -1;
  if (!model.is_adapted()) {
    throw ConstraintError("nonholonomic_el_residual requires adapted selectors");
  }
  model.validate(n, m);
  const std::vector<int>& sel = model.fiber_selector();

  const Matrix rho = eval_anchor(a, x);
  const Tensor3 c = eval_structure(a, x);
  const Vector ly = l.grad_y(x, y);
  const Vector lx = l.grad_x(x, y);
  const Vector dt_ly = l.hess_yx(x, y) * xdot + l.hess_yy(x, y) * ydot;

  std::vector<int> free;
  for (int k = 0; k < m; ++k) {
    if (std::find(sel.begin(), sel.end(), k) == sel.end()) free.push_back(k);
  }
  NonholonomicResidual out;
  out.residual.resize(n + static_cast<Eigen::Index>(sel.size() + free.size()));
  out.residual.head(n) = xdot - rho * y;
  Eigen::Index row = n;
  for (int i : sel) out.residual(row++) = y(i) - (i == unit ? 1.0 : 0.0);
  for (int kappa : free) {
    double r = dt_ly(kappa);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) r -= c(i, kappa, j) * y(i) * ly(j);
    }
    for (int b = 0; b < n; ++b) r -= rho(b, kappa) * lx(b);
    out.residual(row++) = r;
  }
  out.support.resize(static_cast<Eigen::Index>(model.base_selector().size()));
  for (std::size_t k = 0; k < model.base_selector().size(); ++k) {
    out.support(static_cast<Eigen::Index>(k)) = x(model.base_selector()[k]);
  }
  return out;
}

DiracAlgebroid time_extend(const DiracAlgebroid& d) {
  std::vector<std::string> labels{"t"};
  for (const auto& s : d.chart().base_labels()) labels.push_back(s);
  Chart chart(d.chart().base_dim() + 1, d.chart().fiber_dim(), labels, d.chart().fiber_labels());
  return DiracAlgebroid(std::move(chart), TimeExtended{std::make_shared<const DiracAlgebroid>(d)});
}

Vector pmp_residual(const ControlSystem& sys, const DiracAlgebroid& d, const Vector& x,
                    const Vector& u, const Vector& xi, const Vector& xdot, const Vector& xidot) {
  require_match(d, sys.base_dim(), sys.fiber_dim(), "control system");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const LocalForm f = local_form(d, x);
  const Vector y = sys.f(x, u);
  Vector v(n + m);
  v << xdot, y;
  Vector core(n + m);
  core << sys.f_x(x, u).transpose() * xi - sys.cost_x(x, u), xidot;
  const Vector base = f.residual(v, core, xi);
  const Vector stat = sys.f_u(x, u).transpose() * xi - sys.cost_u(x, u);
  Vector out(base.size() + stat.size());
  out << base, stat;
  return out;
}

ImplicitProblem lagrangian_problem(const DiracAlgebroid& d, const LagrangianDef& l) {
  require_match(d, l.base_dim(), l.fiber_dim(), "Lagrangian");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const int total = n + m;
  const auto dd = std::make_shared<const DiracAlgebroid>(d);
  const auto ll = std::make_shared<const LagrangianDef>(l);

  auto raw = [dd, ll, n, m, total](double, const Vector& s) {
    const Vector x = s.head(n);
    const Vector y = s.tail(m);
    const LocalForm f = local_form(*dd, x);
    require_square(f, total);
    const Blocks b = split_blocks(f, n);
    const Vector xi = ll->grad_y(x, y);
    const Vector p = -ll->grad_x(x, y);
    const Matrix bm = f.bilinear_matrix(xi);
    const auto rv = f.vel.rows();
    const auto rz = f.mom.rows();
    AffineRows rows{Matrix::Zero(total, total), Vector(total)};
    rows.a.block(0, 0, rv, n) = b.vel_x;
    rows.b.head(rv) = b.vel_y * y - f.vel_offset;
    rows.a.block(rv, 0, rz, n) = b.mom_xi * ll->hess_yx(x, y) + bm.leftCols(n);
    rows.a.block(rv, n, rz, m) = b.mom_xi * ll->hess_yy(x, y);
    rows.b.tail(rz) = b.mom_p * p + bm.rightCols(m) * y;
    return rows;
  };
  auto phase = [dd, ll, n, m](double, const Vector& s) {
    const Vector x = s.head(n);
    return phase_form(*dd, x).residual(ll->grad_y(x, s.tail(m)));
  };
  ImplicitProblem prob = ImplicitProblem::from_affine_rows(total, raw, phase);
  std::vector<std::string> labels = base_labels(d);
  for (const auto& s : d.chart().fiber_labels()) labels.push_back(s);
  prob.set_state_labels(labels);
  prob.add_monitor({"energy", [ll, n, m](double, const Vector& s) {
                      return energy_monitor(*ll, s.head(n), s.tail(m));
                    }});
  return prob;
}

ImplicitProblem hamiltonian_problem(const DiracAlgebroid& d, const HamiltonianDef& h) {
  require_match(d, h.base_dim(), h.fiber_dim(), "Hamiltonian");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const int total = n + m;
  const auto dd = std::make_shared<const DiracAlgebroid>(d);
  const auto hh = std::make_shared<const HamiltonianDef>(h);

  auto raw = [dd, hh, n, m, total](double, const Vector& s) {
    const Vector x = s.head(n);
    const Vector xi = s.tail(m);
    const LocalForm f = local_form(*dd, x);
    require_square(f, total);
    const Blocks b = split_blocks(f, n);
    const Vector y = hh->grad_xi(x, xi);
    const Vector p = hh->grad_x(x, xi);
    const Matrix bm = f.bilinear_matrix(xi);
    const auto rv = f.vel.rows();
    const auto rz = f.mom.rows();
    AffineRows rows{Matrix::Zero(total, total), Vector(total)};
    rows.a.block(0, 0, rv, n) = b.vel_x;
    rows.b.head(rv) = b.vel_y * y - f.vel_offset;
    rows.a.block(rv, 0, rz, n) = bm.leftCols(n);
    rows.a.block(rv, n, rz, m) = b.mom_xi;
    rows.b.tail(rz) = b.mom_p * p + bm.rightCols(m) * y;
    return rows;
  };
  auto phase = [dd, n, m](double, const Vector& s) {
    return phase_form(*dd, s.head(n)).residual(s.tail(m));
  };
  ImplicitProblem prob = ImplicitProblem::from_affine_rows(total, raw, phase);
  std::vector<std::string> labels = base_labels(d);
  for (const auto& s : d.chart().fiber_labels()) labels.push_back("xi_" + s);
  prob.set_state_labels(labels);
  std::vector<bool> mask(total, true);
  if (!has_base_constraints(d)) {
    for (int a = 0; a < n; ++a) mask[a] = false;
  }
  prob.set_projection_mask(mask);
  prob.add_monitor({"hamiltonian", [hh, n, m](double, const Vector& s) {
                      return hh->value(s.head(n), s.tail(m));
                    }});
  return prob;
}

ImplicitProblem pmp_problem(const ControlSystem& sys, const DiracAlgebroid& d) {
  require_match(d, sys.base_dim(), sys.fiber_dim(), "control system");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const int q = sys.control_dim();
  const int total = n + m;
  const int dim = total + q;
  const auto dd = std::make_shared<const DiracAlgebroid>(d);
  const auto ss = std::make_shared<const ControlSystem>(sys);

  auto raw = [dd, ss, n, m, q, total, dim](double, const Vector& s) {
    const Vector x = s.head(n);
    const Vector u = s.segment(n, q);
    const Vector xi = s.tail(m);
    const LocalForm f = local_form(*dd, x);
    require_square(f, total);
    const Blocks b = split_blocks(f, n);
    const Vector y = ss->f(x, u);
    const Vector p = ss->f_x(x, u).transpose() * xi - ss->cost_x(x, u);
    const Matrix bm = f.bilinear_matrix(xi);
    const auto rv = f.vel.rows();
    const auto rz = f.mom.rows();
    AffineRows rows{Matrix::Zero(dim, dim), Vector(dim)};
    rows.a.block(0, 0, rv, n) = b.vel_x;
    rows.b.head(rv) = b.vel_y * y - f.vel_offset;
    rows.a.block(rv, 0, rz, n) = bm.leftCols(n);
    rows.a.block(rv, n + q, rz, m) = b.mom_xi;
    rows.b.segment(rv, rz) = b.mom_p * p + bm.rightCols(m) * y;
    rows.b.tail(q) = ss->f_u(x, u).transpose() * xi - ss->cost_u(x, u);
    return rows;
  };
  auto phase = [dd, n, m](double, const Vector& s) {
    return phase_form(*dd, s.head(n)).residual(s.tail(m));
  };
  ImplicitProblem prob = ImplicitProblem::from_affine_rows(dim, raw, phase);
  std::vector<std::string> labels = base_labels(d);
  for (int k = 0; k < q; ++k) labels.push_back("u" + std::to_string(k));
  for (const auto& s : d.chart().fiber_labels()) labels.push_back("xi_" + s);
  prob.set_state_labels(labels);
  std::vector<bool> mask(dim, false);
  for (int k = 0; k < q; ++k) mask[n + k] = true;
  prob.set_projection_mask(mask);
  prob.add_monitor({"hamiltonian", [ss, n, m, q](double, const Vector& s) {
                      const Vector x = s.head(n);
                      const Vector u = s.segment(n, q);
                      return s.tail(m).dot(ss->f(x, u)) - ss->cost(x, u);
                    }});
  prob.add_monitor({"stationarity", [ss, n, m, q](double, const Vector& s) {
                      const Vector x = s.head(n);
                      const Vector u = s.segment(n, q);
                      return (ss->f_u(x, u).transpose() * s.tail(m) - ss->cost_u(x, u)).norm();
                    }});
  return prob;
}

double energy_monitor(const LagrangianDef& l, const Vector& x, const Vector& y) {
  return y.dot(l.grad_y(x, y)) - l.value(x, y);
}

AdmissibilityReport admissibility_report(const DiracAlgebroid& d, const Trajectory& traj,
                                         const VelocitySplit& split) {
  AdmissibilityReport rep;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double norm = velocity_residual(d, split(traj.states[i], traj.rates[i])).norm();
    rep.norms.push_back(norm);
    rep.max_norm = std::max(rep.max_norm, norm);
  }
  return rep;
}

AdmissibilityReport admissibility_report(const DiracAlgebroid& d, const LagrangianDef& l,
                                         const Trajectory& traj) {
  const int n = l.base_dim();
  const int m = l.fiber_dim();
  return admissibility_report(d, traj, [n, m](const Vector& s, const Vector& r) {
    return VelocityPair{s.head(n), r.head(n), s.tail(m)};
  });
}

AdmissibilityReport admissibility_report(const DiracAlgebroid& d, const HamiltonianDef& h,
                                         const Trajectory& traj) {
  const int n = h.base_dim();
  const int m = h.fiber_dim();
  return admissibility_report(d, traj, [&h, n, m](const Vector& s, const Vector& r) {
    const Vector x = s.head(n);
    return VelocityPair{x, r.head(n), h.grad_xi(x, s.tail(m))};
  });
}

}  // namespace diralg
