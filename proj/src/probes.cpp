#include "diralg/probes.hpp"

#include "diralg/linalg.hpp"

#include <cmath>
#include <exception>

namespace diralg {

namespace {

const std::vector<int>& base_selector_of(const DiracAlgebroid& d) {
  static const std::vector<int> none;
  if (!d.is<Induced>()) return none;
  const auto& c = d.as<Induced>().constraint;
  if (std::holds_alternative<LinearConstraint>(c)) {
    return std::get<LinearConstraint>(c).base_selector();
  }
  return std::get<AffineConstraint>(c).model().base_selector();
}

std::vector<Vector> base_points(const DiracAlgebroid& d, ProbeSampler& sampler, int probes) {
  std::vector<Vector> xs;
  xs.reserve(static_cast<std::size_t>(probes));
  for (int i = 0; i < probes; ++i) xs.push_back(probe_base_point(d, sampler));
  return xs;
}

std::vector<Vector> fiber_points(ProbeSampler& sampler, int m, int probes) {
  std::vector<Vector> out;
  for (int i = 0; i < probes; ++i) out.push_back(sampler.fiber_point(m));
  return out;
}

}  // namespace

SweepResult run_sweep(std::string name, double threshold, const std::vector<Vector>& points,
                      const std::function<double(std::size_t)>& eval, Execution exec) {
  const auto count = static_cast<long>(points.size());
  std::vector<double> values(points.size(), 0.0);
  if (exec == Execution::serial) {
    for (long i = 0; i < count; ++i) values[i] = eval(static_cast<std::size_t>(i));
  } else {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
      try {
        values[i] = eval(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(diralg_sweep_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }
  SweepResult out;
  out.name = std::move(name);
  out.threshold = threshold;
  out.probes = static_cast<int>(count);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // A NaN probe is reported, never hidden behind a larger value.
    if (std::isnan(out.max_value)) break;
    if (std::isnan(values[i]) || values[i] > out.max_value) {
      out.max_value = values[i];
      worst = i;
    }
  }
  if (!points.empty()) out.worst_x = points[worst];
  return out;
}

Vector probe_base_point(const DiracAlgebroid& d, ProbeSampler& sampler) {
  return support_point(sampler, d.chart().base_dim(), base_selector_of(d));
}

SweepResult isotropy_sweep(const DiracAlgebroid& d, int probes, std::uint64_t seed,
                           Execution exec) {
  ProbeSampler sampler(seed);
  const auto xs = base_points(d, sampler, probes);
  const auto xis = fiber_points(sampler, d.chart().fiber_dim(), probes);
  return run_sweep(
      "isotropy", 1e-10, xs,
      [&](std::size_t i) {
        const Matrix b = basis_at(d, xs[i], xis[i]);
        double worst = 0.0;
        for (Eigen::Index a = 0; a < b.cols(); ++a) {
          const auto pa = PontryaginPoint::from_fiber_coords(xs[i], xis[i], b.col(a));
          for (Eigen::Index c = a; c < b.cols(); ++c) {
            const auto pc = PontryaginPoint::from_fiber_coords(xs[i], xis[i], b.col(c));
            worst = std::max(worst, std::abs(pairing(pa, pc)));
          }
        }
        return worst;
      },
      exec);
}

SweepResult homothety_sweep(const DiracAlgebroid& d, int probes, std::uint64_t seed,
                            Execution exec) {
  ProbeSampler sampler(seed);
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const int total = n + m;
  const auto xs = base_points(d, sampler, probes);
  const auto xis = fiber_points(sampler, m, probes);
  std::vector<Vector> coeffs;
  for (int i = 0; i < probes; ++i) coeffs.push_back(sampler.uniform(total));
  const std::vector<double> factors{0.0, 0.5, 2.0, -1.0};
  const std::vector<double> t_factors =
      d.is_affine() ? std::vector<double>{1.0} : factors;

  return run_sweep(
      "homothety", 1e-10, xs,
      [&](std::size_t i) {
        const Vector& x = xs[i];
        const Vector& xi = xis[i];
        const Matrix b = basis_at(d, x, xi);
        const Matrix jac = residual_jacobian(d, x, xi);
        const Vector r0 =
            residual(d, PontryaginPoint::from_fiber_coords(x, xi, Vector::Zero(2 * total)));
        const Vector particular =
            jac.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-r0);
        const Vector z = particular + b * coeffs[i];
        const double scale = std::max(1.0, z.norm());
        double worst = residual(d, PontryaginPoint::from_fiber_coords(x, xi, z)).norm() / scale;
        for (double t : t_factors) {
          for (double s : factors) {
            PontryaginPoint pt = PontryaginPoint::from_fiber_coords(x, xi, z);
            pt.xi *= s;
            pt.xdot *= t;
            pt.y *= t;
            pt.xidot *= t * s;
            pt.p *= t * s;
            worst = std::max(worst, residual(d, pt).norm() / scale);
          }
        }
        return worst;
      },
      exec);
}

SweepResult core_annihilator_sweep(const DiracAlgebroid& d, int probes, std::uint64_t seed,
                                   Execution exec) {
  ProbeSampler sampler(seed);
  const auto xs = base_points(d, sampler, probes);
  return run_sweep(
      "core_annihilator", 1e-8, xs,
      [&](std::size_t i) {
        const LocalForm f = local_form(d, xs[i]);
        return max_principal_angle(null_space(f.mom), annihilator(null_space(f.vel)));
      },
      exec);
}

SweepResult jacobi_sweep(const SkewAlgebroid& a, int probes, std::uint64_t seed, Execution exec) {
  ProbeSampler sampler(seed);
  std::vector<Vector> xs;
  for (int i = 0; i < probes; ++i) xs.push_back(sampler.base_point(a.chart().base_dim()));
  return run_sweep(
      "jacobi", 1e-6, xs, [&](std::size_t i) { return max_basis_jacobiator(a, xs[i]); }, exec);
}

SweepResult induce_oracle_sweep(const DiracAlgebroid& d, const LinearConstraint& v, int probes,
                                std::uint64_t seed, Execution exec) {
  const DiracAlgebroid dv = induce(d, v);
  ProbeSampler sampler(seed);
  std::vector<Vector> xs;
  for (int i = 0; i < probes; ++i) {
    xs.push_back(support_point(sampler, d.chart().base_dim(), v.base_selector()));
  }
  const auto xis = fiber_points(sampler, d.chart().fiber_dim(), probes);
  return run_sweep(
      "induce_oracle", 1e-8, xs,
      [&](std::size_t i) {
        return max_principal_angle(basis_at(dv, xs[i], xis[i]),
                                   pointwise_induce(d, v, xs[i], xis[i]));
      },
      exec);
}

SweepResult legendre_equivalence_sweep(const DiracAlgebroid& d, const LagrangianDef& l,
                                       const HamiltonianDef& h, int probes, std::uint64_t seed,
                                       Execution exec) {
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const ImplicitProblem lp = lagrangian_problem(d, l);
  const ImplicitProblem hp = hamiltonian_problem(d, h);
  ProbeSampler sampler(seed);
  std::vector<Vector> states;
  for (int i = 0; i < probes; ++i) {
    Vector s(n + m);
    s << probe_base_point(d, sampler), sampler.fiber_point(m);
    states.push_back(s);
  }
  std::vector<Vector> xs;
  for (const auto& s : states) xs.push_back(s.head(n));

  return run_sweep(
      "legendre_equivalence", 1e-7, xs,
      [&](std::size_t i) {
        // Lagrangian side to Hamiltonian side.
        const Vector s = project_initial(lp, states[i]);
        const Vector x = s.head(n);
        const Vector y = s.tail(m);
        const Vector r = solve_rate(lp, 0.0, s, Vector::Zero(n + m));
        const Vector xdot = r.head(n);
        const Vector xi = l.grad_y(x, y);
        const Vector xidot = l.hess_yx(x, y) * xdot + l.hess_yy(x, y) * r.tail(m);
        double worst = hamilton_residual(d, h, x, xi, xdot, xidot).residual.norm();

        // Hamiltonian side back to the Lagrangian side.
        Vector hs(n + m);
        hs << x, xi;
        const Vector hr = solve_rate(hp, 0.0, hs, Vector::Zero(n + m));
        const Vector hxdot = hr.head(n);
        const Vector hy = h.grad_xi(x, xi);
        const Vector ydot =
            l.hess_yy(x, hy).fullPivLu().solve(hr.tail(m) - l.hess_yx(x, hy) * hxdot);
        worst = std::max(worst, el_residual(d, l, x, hy, hxdot, ydot).residual.norm());
        return worst;
      },
      exec);
}

}  // namespace diralg
