// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.
#include "diralg/linalg.hpp"
#include "diralg/probes.hpp"
#include "diralg/scenario.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace diralg;
using diralg::testing::random_algebroid;

namespace {

const std::filesystem::path kScenarios = std::filesystem::path(DIRALG_SOURCE_DIR) / "scenarios";

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  // Records `value <= limit` under `label`.
  void within(const std::string& label, double value, double limit) {
    const bool ok = value <= limit;
    pass = pass && ok;
    detail << label << "=" << value << (ok ? " " : "(>" + std::to_string(limit) + ") ");
  }
  void expect(const std::string& label, bool ok) {
    pass = pass && ok;
    if (!ok) detail << label << " FAILED ";
  }
};

Scenario scenario(const std::string& file) { return load_scenario((kScenarios / file).string()); }

RunOutcome run_ok(const Scenario& s) {
  RunOutcome out = execute_scenario(s);
  if (out.exit_code != kExitOk || !out.trajectory) {
    throw std::runtime_error(s.system + " run failed: " + out.message);
  }
  return out;
}

struct Disc {
  double m, r, j1, j2;
};

// H(phi, xi) of the reduced rolling disc, with partials worked out by hand.
HamiltonianDef disc_hamiltonian_by_hand(const Disc& q) {
  auto w = [q](const Vector& x, const Vector& xi) {
    return xi(1) - q.r * xi(2) * std::cos(x(0)) - q.r * xi(3) * std::sin(x(0));
  };
  HamiltonianPartials partials;
  partials.grad_xi = [q, w](const Vector& x, const Vector& xi) {
    const double s = w(x, xi) / q.j2;
    Vector g(4);
    g << xi(0) / q.j1, s, -q.r * std::cos(x(0)) * s + xi(2) / q.m,
        -q.r * std::sin(x(0)) * s + xi(3) / q.m;
    return g;
  };
  partials.grad_x = [q, w](const Vector& x, const Vector& xi) {
    Vector g(1);
    g(0) = w(x, xi) / q.j2 * (q.r * xi(2) * std::sin(x(0)) - q.r * xi(3) * std::cos(x(0)));
    return g;
  };
  return HamiltonianDef(
      1, 4,
      [q, w](const Vector& x, const Vector& xi) {
        const double s = w(x, xi);
        return xi(0) * xi(0) / (2 * q.j1) + s * s / (2 * q.j2) +
               (xi(2) * xi(2) + xi(3) * xi(3)) / (2 * q.m);
      },
      partials);
}

// dL/dy of L = 1/2 m (y2^2 + y3^2) + 1/2 J1 y0^2 + 1/2 (mR^2 + J2) y1^2
//            + m R y1 (y2 cos phi + y3 sin phi).
Vector disc_momentum_by_hand(const Disc& q, double phi, const Vector& y) {
  Vector xi(4);
  xi << q.j1 * y(0),
      (q.m * q.r * q.r + q.j2) * y(1) + q.m * q.r * (y(2) * std::cos(phi) + y(3) * std::sin(phi)),
      q.m * y(2) + q.m * q.r * y(1) * std::cos(phi), q.m * y(3) + q.m * q.r * y(1) * std::sin(phi);
  return xi;
}

DiracAlgebroid induced_disc(double r) {
  return induce(DiracAlgebroid::pi_graph(rolling_disc_algebroid(r)),
                LinearConstraint::adapted({}, {2, 3}));
}

void ac1(Verdict& v) {
  const Scenario s = scenario("rolling_disc.json");
  v.expect("m=R=J1=J2=1, initial (0,1,2), rk4 dt=1e-3 on [0,1]",
           s.params == Params{{"m", 1}, {"R", 1}, {"J1", 1}, {"J2", 1}} &&
               s.initial == std::vector<double>{0, 1, 2} && s.time.method == Method::rk4 &&
               s.time.dt == 1e-3 && s.time.t0 == 0 && s.time.t1 == 1);
  const auto start = std::chrono::steady_clock::now();
  const RunOutcome out = run_ok(s);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const Trajectory& traj = *out.trajectory;
  const Vector& last = traj.states.back();
  v.within("|t_end-1|", std::abs(traj.times.back() - 1.0), 1e-12);
  v.within("|phi(1)-1|", std::abs(last(0) - 1.0), 1e-7);
  v.within("|y1(1)-1|", std::abs(last(1) - 1.0), 1e-8);
  v.within("|y2(1)-2|", std::abs(last(2) - 2.0), 1e-8);
  // Original velocities: x1dot = y3 + R y2 cos phi, x2dot = y4 + R y2 sin phi.
  const double r = 1.0;
  double worst = 0.0;
  for (const Vector& st : traj.states) {
    const double phi = st(0);
    const double theta_dot = st(2);
    const double x1dot = st(3) + r * theta_dot * std::cos(phi);
    const double x2dot = st(4) + r * theta_dot * std::sin(phi);
    worst = std::max({worst, std::abs(x1dot - r * theta_dot * std::cos(phi)),
                      std::abs(x2dot - r * theta_dot * std::sin(phi))});
  }
  v.within("max|x1dot-R thetadot cos phi|", worst, 1e-7);
  v.within("runtime_s", seconds, 1.0);
}

void ac2(Verdict& v) {
  const Disc q{1.3, 0.7, 0.4, 0.9};
  const DiracAlgebroid dv = induced_disc(q.r);
  const HamiltonianDef h = disc_hamiltonian_by_hand(q);
  const double mu = q.m * q.r / (q.m * q.r * q.r + q.j2);
  ProbeSampler sampler(0xac2);
  double worst = 0.0;
  bool phase_ok = true;
  for (int i = 0; i < 100; ++i) {
    const double phi = 3.0 * sampler.scalar();
    const double a = sampler.scalar();
    const double b = sampler.scalar();
    // A point of the Lagrangian dynamics, parametrized by (phi, y1, y2).
    Vector xi(4);
    xi << q.j1 * a, (q.m * q.r * q.r + q.j2) * b, q.m * q.r * b * std::cos(phi),
        q.m * q.r * b * std::sin(phi);
    Vector xidot(4);
    xidot << 0.0, 0.0, -mu / q.j1 * xi(0) * xi(1) * std::sin(phi),
        mu / q.j1 * xi(0) * xi(1) * std::cos(phi);
    const Vector x = Vector::Constant(1, phi);
    const DynamicsResidual res = hamilton_residual(dv, h, x, xi, Vector::Constant(1, a), xidot);
    worst = std::max(worst, res.residual.norm());
    phase_ok = phase_ok && res.phase.member;
  }
  v.within("max_hamilton_residual(100 pts)", worst, 1e-9);
  v.expect("points in phase space", phase_ok);

  const RunOutcome lag = run_ok(scenario("rolling_disc.json"));
  const Scenario hs = scenario("rolling_disc_hamiltonian.json");
  const RunOutcome ham = run_ok(hs);
  const Disc unit{hs.params.at("m"), hs.params.at("R"), hs.params.at("J1"), hs.params.at("J2")};
  const auto& ls = lag.trajectory->states;
  const auto& hst = ham.trajectory->states;
  v.expect("same time grid", ls.size() == hst.size());
  double gap = 0.0;
  for (std::size_t i = 0; i < std::min(ls.size(), hst.size()); ++i) {
    const double phi = ls[i](0);
    gap = std::max(gap, std::abs(phi - hst[i](0)));
    gap = std::max(gap, (disc_momentum_by_hand(unit, phi, ls[i].tail(4)) - hst[i].tail(4)).norm());
  }
  v.within("max|legendre(lagrangian traj)-hamiltonian traj|", gap, 1e-6);
}

void ac3(Verdict& v) {
  const Disc q{1.3, 0.7, 0.4, 0.9};
  const double mu = q.m * q.r / (q.m * q.r * q.r + q.j2);
  BuildOptions o;
  o.formalism = Formalism::hamiltonian;
  o.params = {{"m", q.m}, {"R", q.r}, {"J1", q.j1}, {"J2", q.j2}};
  const System sys = build_system("rolling_disc", o);
  ProbeSampler sampler(0xac3);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    Vector guess(5);
    guess << 3.0 * sampler.scalar(), sampler.uniform(4);
    const Vector s = project_initial(*sys.problem, guess);
    const double phi = s(0);
    worst = std::max({worst, std::abs(s(3) - mu * std::cos(phi) * s(2)),
                      std::abs(s(4) - mu * std::sin(phi) * s(2))});
  }
  v.within("max phase relation error(20 guesses)", worst, 1e-10);
}

void ac4(Verdict& v) {
  const double r = 0.7;
  BuildOptions o;
  o.params = {{"R", r}};
  const System disc = build_system("rolling_disc", o);
  const IntegrabilityReport a = check_integrability(*disc.structure);
  const IntegrabilityReport b = check_integrability(*disc.structure);
  v.expect("disc not Dirac-Lie", !a.dirac_lie);
  v.expect("disc cond1 holds", a.cond1);
  v.expect("disc cond2 violated", !a.cond2);
  const IntegrabilityEntry* w = a.find("c^2_{01}");
  v.expect("witness c^2_{01} reported", w != nullptr);
  if (w) {
    const double s = std::abs(std::sin(w->x(0)));
    v.expect("witness at sin phi != 0", s > 1e-3);
    v.within("|witness-R|sin phi||", std::abs(w->value - r * s), 1e-12);
  }

  BuildOptions co;
  co.params = {{"dim", 3}};
  co.constraint = ConstraintSpec{false, {}, {2}, -1};
  const System canon = build_system("canonical_particle", co);
  const IntegrabilityReport c = check_integrability(*canon.structure);
  const IntegrabilityReport d = check_integrability(*canon.structure);
  v.expect("canonical with flat V0 is Dirac-Lie", c.dirac_lie && c.cond1 && c.cond2);

  auto same = [](const IntegrabilityReport& x, const IntegrabilityReport& y) {
    if (x.dirac_lie != y.dirac_lie || x.cond1_max != y.cond1_max || x.cond2_max != y.cond2_max ||
        x.cond2_entries.size() != y.cond2_entries.size()) {
      return false;
    }
    for (std::size_t i = 0; i < x.cond2_entries.size(); ++i) {
      if (x.cond2_entries[i].value != y.cond2_entries[i].value) return false;
    }
    return true;
  };
  v.expect("deterministic", same(a, b) && same(c, d));
  v.detail << "disc_dirac_lie=" << a.dirac_lie << " canonical_dirac_lie=" << c.dirac_lie;
}

void ac5(Verdict& v) {
  struct Case {
    std::string name;
    DiracAlgebroid d;
    LinearConstraint c;
  };
  std::vector<Case> cases;
  const DiracAlgebroid disc = DiracAlgebroid::pi_graph(rolling_disc_algebroid(0.7));
  cases.push_back({"disc", disc, LinearConstraint::adapted({}, {2, 3})});
  cases.push_back({"disc_support", disc, LinearConstraint::adapted({0}, {1})});
  cases.push_back({"canonical", DiracAlgebroid::canonical(3), LinearConstraint::adapted({}, {1})});
  cases.push_back(
      {"canonical_support", DiracAlgebroid::canonical(3), LinearConstraint::adapted({0}, {0, 2})});
  const DiracAlgebroid rnd = DiracAlgebroid::pi_graph(random_algebroid(0xac5));
  cases.push_back({"random", rnd, LinearConstraint::adapted({}, {1})});
  cases.push_back({"random_support", rnd, LinearConstraint::adapted({1}, {0, 2})});
  for (const Case& c : cases) {
    const SweepResult r = induce_oracle_sweep(c.d, c.c, 100, 0xac5, Execution::parallel);
    v.within(c.name, r.max_value, 1e-8);
  }
}

void ac6(Verdict& v) {
  const std::vector<std::pair<std::string, DiracAlgebroid>> structures{
      {"canonical", DiracAlgebroid::canonical(2)},
      {"disc", DiracAlgebroid::pi_graph(rolling_disc_algebroid(0.7))},
      {"disc_induced", induced_disc(0.7)},
      {"so3", DiracAlgebroid::pi_graph(so3_algebroid())},
      {"random", DiracAlgebroid::pi_graph(random_algebroid(0xac6))},
  };
  for (const auto& [name, d] : structures) {
    v.within(name + ".isotropy", isotropy_sweep(d, 50, 0xac6, Execution::parallel).max_value,
             1e-10);
    v.within(name + ".homothety", homothety_sweep(d, 50, 0xac6, Execution::parallel).max_value,
             1e-10);
    v.within(name + ".core",
             core_annihilator_sweep(d, 50, 0xac6, Execution::parallel).max_value, 1e-8);
  }
  const std::vector<std::pair<std::string, SkewAlgebroid>> lie{
      {"tangent3", tangent_algebroid(3)},
      {"disc", rolling_disc_algebroid(0.7)},
      {"so3", so3_algebroid()},
  };
  for (const auto& [name, a] : lie) {
    v.within(name + ".jacobi", jacobi_sweep(a, 50, 0xac6, Execution::parallel).max_value, 1e-6);
  }
}

void ac7(Verdict& v) {
  Scenario s = scenario("harmonic_oscillator.json");
  s.time = TimeSpec{0.0, M_PI, 1e-3, Method::rk4};
  s.initial = {1.0, 0.0};
  s.params = {{"mass", 1.0}, {"k", 1.0}};
  const RunOutcome out = run_ok(s);
  v.within("|t_end-pi|", std::abs(out.trajectory->times.back() - M_PI), 1e-12);
  v.within("|x(pi)-cos(pi)|", std::abs(out.trajectory->states.back()(0) - std::cos(M_PI)), 1e-6);

  const System sys = build_system("harmonic_oscillator", build_options(s));
  const Vector s0 = sys.initial_state(Vector::Unit(2, 0));
  std::vector<double> errors;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    const Trajectory t = integrate(*sys.problem, s0, 0.0, 10.0, dt, Method::rk4);
    errors.push_back(std::abs(t.states.back()(0) - std::cos(10.0)));
  }
  const double order = std::min(std::log2(errors[0] / errors[1]), std::log2(errors[1] / errors[2]));
  v.detail << "observed_order=" << order << " ";
  v.expect("order >= 3.7", order >= 3.7);
}

void ac8(Verdict& v) {
  struct Case {
    std::string name;
    LagrangianDef l;
    std::function<double(const Vector&, const Vector&)> h;
    DiracAlgebroid d;
  };
  const double mass = 1.7, spring = 0.6;
  const Disc q{1.3, 0.7, 0.4, 0.9};
  Vector inertia(3);
  inertia << 1.0, 2.0, 3.5;
  const HamiltonianDef disc_h = disc_hamiltonian_by_hand(q);
  std::vector<Case> cases{
      {"oscillator", oscillator_lagrangian(mass, spring),
       [=](const Vector& x, const Vector& xi) {
         return xi(0) * xi(0) / (2 * mass) + spring * x(0) * x(0) / 2;
       },
       DiracAlgebroid::canonical(1)},
      {"rolling_disc", rolling_disc_lagrangian(q.m, q.r, q.j1, q.j2),
       [&](const Vector& x, const Vector& xi) { return disc_h.value(x, xi); }, induced_disc(q.r)},
      {"euler_top", euler_top_lagrangian(inertia),
       [=](const Vector&, const Vector& xi) {
         return (xi.array().square() / (2 * inertia.array())).sum();
       },
       DiracAlgebroid::pi_graph(so3_algebroid())},
  };
  for (const Case& c : cases) {
    const HamiltonianDef h = legendre_transform(c.l);
    ProbeSampler sampler(0xac8);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vector x = sampler.base_point(c.l.base_dim());
      const Vector xi = sampler.fiber_point(c.l.fiber_dim());
      worst = std::max(worst, std::abs(h.value(x, xi) - c.h(x, xi)));
    }
    v.within(c.name + ".transform", worst, 1e-9);
    const SweepResult eq = legendre_equivalence_sweep(c.d, c.l, h, 50, 0xac8, Execution::parallel);
    v.within(c.name + ".bidirectional", eq.max_value, 1e-7);
  }
}

// Brute-force Euler top: J wdot = (J w) x w, classical RK4.
Vector euler_top_brute_force(const Vector& inertia, Vector w, double t1, double dt) {
  auto f = [&](const Vector& z) {
    const Eigen::Vector3d jw = (inertia.array() * z.array()).matrix();
    const Eigen::Vector3d rhs = jw.cross(Eigen::Vector3d(z));
    return Vector((rhs.array() / inertia.array()).matrix());
  };
  const int steps = static_cast<int>(std::llround(t1 / dt));
  for (int i = 0; i < steps; ++i) {
    const Vector k1 = f(w);
    const Vector k2 = f(w + 0.5 * dt * k1);
    const Vector k3 = f(w + 0.5 * dt * k2);
    const Vector k4 = f(w + dt * k3);
    w += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return w;
}

void ac9(Verdict& v) {
  for (const char* file : {"harmonic_oscillator.json", "rolling_disc.json"}) {
    Scenario s = scenario(file);
    s.time.t0 = 0.0;
    s.time.t1 = 10.0;
    const RunOutcome out = run_ok(s);
    const auto& e = out.trajectory->monitors.at("energy");
    double drift = 0.0;
    for (double x : e) drift = std::max(drift, std::abs(x - e.front()));
    v.within(s.system + ".energy_drift/(1+|E0|)", drift / (1.0 + std::abs(e.front())), 1e-6);
  }

  Scenario top = scenario("euler_top.json");
  top.time.t0 = 0.0;
  top.time.t1 = 10.0;
  top.initial = {0.3, 1.0, -0.4};
  const RunOutcome out = run_ok(top);
  Vector inertia(3);
  inertia << top.params.at("J1"), top.params.at("J2"), top.params.at("J3");
  const Vector w0 = Eigen::Map<const Vector>(top.initial.data(), 3);
  const double m0 = (inertia.array() * w0.array()).matrix().squaredNorm();
  double drift = 0.0;
  for (const Vector& w : out.trajectory->states) {
    drift = std::max(drift, std::abs((inertia.array() * w.array()).matrix().squaredNorm() - m0));
  }
  v.within("euler_top.|Jw|^2 drift", drift, 1e-5);
  const Vector reference = euler_top_brute_force(inertia, w0, 10.0, 1e-5);
  v.within("euler_top.|w(10)-brute force|", (out.trajectory->states.back() - reference).norm(),
           1e-5);
}

void ac10(Verdict& v) {
  const Scenario s = scenario("lqr_pmp.json");
  const RunOutcome out = run_ok(s);
  const Trajectory& traj = *out.trajectory;
  double stationarity = 0.0;
  for (double x : traj.monitors.at("stationarity")) stationarity = std::max(stationarity, std::abs(x));
  v.within("max stationarity", stationarity, 1e-9);
  // Hand-derived: u = xi, xdot = xi, xidot = x.
  const double a = s.initial[0];
  const double b = s.initial[1];
  double gap = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const Vector& st = traj.states[i];
    gap = std::max({gap, std::abs(st(0) - (a * std::cosh(t) + b * std::sinh(t))),
                    std::abs(st(2) - (a * std::sinh(t) + b * std::cosh(t)))});
  }
  v.within("max|traj-closed form|", gap, 1e-6);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"AC1 rolling-disc closed form", ac1},
      {"AC2 rolling-disc hamiltonian equivalence", ac2},
      {"AC3 phase-constraint recovery", ac3},
      {"AC4 integrability verdicts", ac4},
      {"AC5 induce oracle equivalence", ac5},
      {"AC6 structural properties", ac6},
      {"AC7 classical recovery", ac7},
      {"AC8 hyperregular equivalence", ac8},
      {"AC9 conservation", ac9},
      {"AC10 pmp toy", ac10},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      check(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "exception: " << e.what();
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.str().c_str());
    if (!v.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
