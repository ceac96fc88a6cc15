#include "diralg/systems.hpp"

#include <cmath>
#include <sstream>

namespace diralg {

namespace {

std::vector<std::string> indexed(const std::string& stem, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

int integer_param(const Params& p, const std::string& key, int lo, int hi) {
  const double v = p.at(key);
  if (v != std::floor(v) || v < lo || v > hi) {
    std::ostringstream os;
    os << "parameter " << key << " must be an integer in [" << lo << ", " << hi << "]";
    throw ContractError(os.str());
  }
  return static_cast<int>(v);
}

double positive_param(const Params& p, const std::string& key) {
  const double v = p.at(key);
  if (!(v > 0.0) || !std::isfinite(v)) throw ContractError("parameter " + key + " must be > 0");
  return v;
}

double nonnegative_param(const Params& p, const std::string& key) {
  const double v = p.at(key);
  if (!(v >= 0.0) || !std::isfinite(v)) throw ContractError("parameter " + key + " must be >= 0");
  return v;
}

void require_length(const Vector& v, std::initializer_list<int> allowed, const std::string& what) {
  for (int a : allowed) {
    if (v.size() == a) return;
  }
  std::ostringstream os;
  os << what << ": initial vector has " << v.size() << " entries, expected one of {";
  bool first = true;
  for (int a : allowed) {
    os << (first ? "" : ", ") << a;
    first = false;
  }
  os << "}";
  throw ContractError(os.str());
}

Vector concat(const Vector& a, const Vector& b) {
  Vector out(a.size() + b.size());
  out << a, b;
  return out;
}

std::shared_ptr<const DiracAlgebroid> share(DiracAlgebroid d) {
  return std::make_shared<const DiracAlgebroid>(std::move(d));
}

}  // namespace

Formalism parse_formalism(const std::string& name) {
  if (name == "lagrangian") return Formalism::lagrangian;
  if (name == "hamiltonian") return Formalism::hamiltonian;
  if (name == "pmp") return Formalism::pmp;
  throw ContractError("unknown formalism '" + name + "'");
}

std::string formalism_name(Formalism f) {
  switch (f) {
    case Formalism::lagrangian:
      return "lagrangian";
    case Formalism::hamiltonian:
      return "hamiltonian";
    case Formalism::pmp:
      return "pmp";
  }
  return "lagrangian";
}

const std::vector<SystemInfo>& system_catalog() {
  static const std::vector<SystemInfo> catalog = {
      {"canonical_particle",
       "free particle L = 1/2 mass |y|^2 on the canonical structure of T*R^dim; "
       "a constraint switches to the graph of the tangent algebroid",
       {{"mass", 1.0, "particle mass"}, {"dim", 1.0, "configuration dimension (1..6)"}},
       {Formalism::lagrangian, Formalism::hamiltonian},
       "(x, y), 2*dim entries"},
      {"harmonic_oscillator",
       "L = 1/2 mass |y|^2 - 1/2 k |x|^2 on the canonical structure",
       {{"mass", 1.0, "mass"}, {"k", 1.0, "spring constant"}, {"dim", 1.0, "dimension (1..6)"}},
       {Formalism::lagrangian, Formalism::hamiltonian},
       "(x, y), 2*dim entries"},
      {"rolling_disc",
       "vertical rolling disc reduced to a rank-4 Lie algebroid over the heading "
       "angle phi; rolling without slipping is the constraint y2 = y3 = 0",
       {{"m", 1.0, "disc mass"},
        {"R", 1.0, "disc radius"},
        {"J1", 1.0, "inertia about the vertical axis"},
        {"J2", 1.0, "inertia about the rolling axis"}},
       {Formalism::lagrangian, Formalism::hamiltonian},
       "(phi, y0, y1) with y2 = y3 = 0, or (phi, y0, y1, y2, y3)"},
      {"euler_top",
       "free rigid body on so(3), L = 1/2 y.Jy with c^k_{ij} = eps_{ijk}",
       {{"J1", 1.0, "principal inertia 1"},
        {"J2", 2.0, "principal inertia 2"},
        {"J3", 3.0, "principal inertia 3"}},
       {Formalism::lagrangian, Formalism::hamiltonian},
       "body angular velocity (y0, y1, y2)"},
      {"forced_oscillator_timedep",
       "oscillator with spring k(t) = spring (1 + amplitude sin(frequency t)); time "
       "is the first base coordinate of the extended structure",
       {{"mass", 1.0, "mass"},
        {"spring", 1.0, "mean spring constant"},
        {"amplitude", 0.1, "relative modulation amplitude"},
        {"frequency", 1.0, "modulation frequency"}},
       {Formalism::lagrangian, Formalism::hamiltonian},
       "(x, y), or (t, x, y) with t ignored in favour of time.t0"},
      {"lqr_pmp",
       "scalar optimal control y = f(x, u) = u with running cost "
       "1/2 (state_weight x^2 + control_weight u^2) on the canonical structure",
       {{"state_weight", 1.0, "weight of x^2"}, {"control_weight", 1.0, "weight of u^2"}},
       {Formalism::pmp},
       "(x, xi) with u from stationarity, or (x, u, xi)"},
  };
  return catalog;
}

const SystemInfo* find_system(const std::string& name) {
  for (const auto& s : system_catalog()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Params resolve_params(const SystemInfo& info, const Params& user) {
  Params out;
  for (const auto& p : info.params) out[p.name] = p.default_value;
  for (const auto& [key, value] : user) {
    if (out.find(key) == out.end()) {
      throw ContractError("system " + info.name + " has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw ContractError("parameter " + key + " must be finite");
    out[key] = value;
  }
  return out;
}

SkewAlgebroid tangent_algebroid(int n) {
  return SkewAlgebroid(
      Chart(n, n, indexed("x", n), indexed("y", n)),
      [n](const Vector&) { return Matrix(Matrix::Identity(n, n)); },
      [n](const Vector&) { return Tensor3(n, n, n); });
}

SkewAlgebroid rolling_disc_algebroid(double radius) {
  return SkewAlgebroid(
      Chart(1, 4, {"phi"}, indexed("y", 4)),
      [](const Vector&) {
        Matrix rho = Matrix::Zero(1, 4);
        rho(0, 0) = 1.0;
        return rho;
      },
      [radius](const Vector& x) {
        Tensor3 c(4, 4, 4);
        // [e0, e1] = R cos(phi) e3 - R sin(phi) e2
        c(0, 1, 3) = radius * std::cos(x(0));
        c(1, 0, 3) = -c(0, 1, 3);
        c(0, 1, 2) = -radius * std::sin(x(0));
        c(1, 0, 2) = -c(0, 1, 2);
        return c;
      });
}

SkewAlgebroid so3_algebroid() {
  return SkewAlgebroid(
      Chart(0, 3, {}, indexed("w", 3)), [](const Vector&) { return Matrix(0, 3); },
      [](const Vector&) {
        Tensor3 c(3, 3, 3);
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3;
          const int k = (i + 2) % 3;
          c(i, j, k) = 1.0;
          c(j, i, k) = -1.0;
        }
        return c;
      });
}

LagrangianDef rolling_disc_lagrangian(double mass, double radius, double j1, double j2) {
  const double mr = mass * radius;
  const double big = mass * radius * radius + j2;
  LagrangianPartials d;
  d.grad_x = [mr](const Vector& x, const Vector& y) {
    Vector g(1);
    g(0) = mr * y(1) * (-y(2) * std::sin(x(0)) + y(3) * std::cos(x(0)));
    return g;
  };
  d.grad_y = [=](const Vector& x, const Vector& y) {
    const double c = std::cos(x(0));
    const double s = std::sin(x(0));
    Vector g(4);
    g << j1 * y(0), big * y(1) + mr * (y(2) * c + y(3) * s), mass * y(2) + mr * y(1) * c,
        mass * y(3) + mr * y(1) * s;
    return g;
  };
  d.hess_yy = [=](const Vector& x, const Vector&) {
    const double c = std::cos(x(0));
    const double s = std::sin(x(0));
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = j1;
    h(1, 1) = big;
    h(2, 2) = mass;
    h(3, 3) = mass;
    h(1, 2) = h(2, 1) = mr * c;
    h(1, 3) = h(3, 1) = mr * s;
    return h;
  };
  d.hess_yx = [mr](const Vector& x, const Vector& y) {
    const double c = std::cos(x(0));
    const double s = std::sin(x(0));
    Matrix h(4, 1);
    h << 0.0, mr * (-y(2) * s + y(3) * c), -mr * y(1) * s, mr * y(1) * c;
    return h;
  };
  return LagrangianDef(
      1, 4,
      [=](const Vector& x, const Vector& y) {
        return 0.5 * mass * (y(2) * y(2) + y(3) * y(3)) + 0.5 * j1 * y(0) * y(0) +
               0.5 * big * y(1) * y(1) +
               mr * y(1) * (y(2) * std::cos(x(0)) + y(3) * std::sin(x(0)));
      },
      d);
}

HamiltonianDef rolling_disc_hamiltonian(double mass, double radius, double j1, double j2) {
  const auto w = [radius](const Vector& x, const Vector& xi) {
    return xi(1) - radius * xi(2) * std::cos(x(0)) - radius * xi(3) * std::sin(x(0));
  };
  HamiltonianPartials d;
  d.grad_x = [=](const Vector& x, const Vector& xi) {
    Vector g(1);
    g(0) = w(x, xi) / j2 * radius * (xi(2) * std::sin(x(0)) - xi(3) * std::cos(x(0)));
    return g;
  };
  d.grad_xi = [=](const Vector& x, const Vector& xi) {
    const double ww = w(x, xi) / j2;
    Vector g(4);
    g << xi(0) / j1, ww, -radius * std::cos(x(0)) * ww + xi(2) / mass,
        -radius * std::sin(x(0)) * ww + xi(3) / mass;
    return g;
  };
  return HamiltonianDef(
      1, 4,
      [=](const Vector& x, const Vector& xi) {
        const double ww = w(x, xi);
        return xi(0) * xi(0) / (2.0 * j1) + ww * ww / (2.0 * j2) +
               (xi(2) * xi(2) + xi(3) * xi(3)) / (2.0 * mass);
      },
      d);
}

LagrangianDef euler_top_lagrangian(const Vector& inertia) {
  LagrangianPartials d;
  d.grad_x = [](const Vector&, const Vector&) { return Vector(0); };
  d.grad_y = [inertia](const Vector&, const Vector& y) { return Vector(inertia.cwiseProduct(y)); };
  d.hess_yy = [inertia](const Vector&, const Vector&) { return Matrix(inertia.asDiagonal()); };
  d.hess_yx = [](const Vector&, const Vector&) { return Matrix(3, 0); };
  return LagrangianDef(
      0, 3,
      [inertia](const Vector&, const Vector& y) { return 0.5 * y.dot(inertia.cwiseProduct(y)); },
      d);
}

HamiltonianDef euler_top_hamiltonian(const Vector& inertia) {
  HamiltonianPartials d;
  d.grad_x = [](const Vector&, const Vector&) { return Vector(0); };
  d.grad_xi = [inertia](const Vector&, const Vector& xi) {
    return Vector(xi.cwiseQuotient(inertia));
  };
  return HamiltonianDef(
      0, 3,
      [inertia](const Vector&, const Vector& xi) { return 0.5 * xi.dot(xi.cwiseQuotient(inertia)); },
      d);
}

LagrangianDef oscillator_lagrangian(double mass, double spring, int dim) {
  LagrangianPartials d;
  d.grad_x = [spring](const Vector& x, const Vector&) { return Vector(-spring * x); };
  d.grad_y = [mass](const Vector&, const Vector& y) { return Vector(mass * y); };
  d.hess_yy = [mass, dim](const Vector&, const Vector&) {
    return Matrix(mass * Matrix::Identity(dim, dim));
  };
  d.hess_yx = [dim](const Vector&, const Vector&) { return Matrix(Matrix::Zero(dim, dim)); };
  return LagrangianDef(
      dim, dim,
      [mass, spring](const Vector& x, const Vector& y) {
        return 0.5 * mass * y.squaredNorm() - 0.5 * spring * x.squaredNorm();
      },
      d);
}

HamiltonianDef oscillator_hamiltonian(double mass, double spring, int dim) {
  HamiltonianPartials d;
  d.grad_x = [spring](const Vector& x, const Vector&) { return Vector(spring * x); };
  d.grad_xi = [mass](const Vector&, const Vector& xi) { return Vector(xi / mass); };
  return HamiltonianDef(
      dim, dim,
      [mass, spring](const Vector& x, const Vector& xi) {
        return 0.5 * xi.squaredNorm() / mass + 0.5 * spring * x.squaredNorm();
      },
      d);
}

namespace {

DiracAlgebroid canonical_structure(int n) {
  return DiracAlgebroid(Chart(n, n, indexed("x", n), indexed("y", n)), Canonical{});
}

DiracAlgebroid apply_constraint(const DiracAlgebroid& base, const ConstraintSpec& c,
                                std::optional<LinearConstraint>& linear) {
  if (c.affine) {
    return induce_affine(
        base, AffineConstraint::adapted(c.base_selector, c.fiber_selector, c.unit_index));
  }
  linear = LinearConstraint::adapted(c.base_selector, c.fiber_selector);
  return induce(base, *linear);
}

}  // namespace

System build_system(const std::string& name, const BuildOptions& options) {
  const SystemInfo* info = find_system(name);
  if (info == nullptr) throw ContractError("unknown system '" + name + "'");
  if (std::find(info->formalisms.begin(), info->formalisms.end(), options.formalism) ==
      info->formalisms.end()) {
    throw ContractError("system " + name + " does not support the " +
                        formalism_name(options.formalism) + " formalism");
  }

  System sys;
  sys.name = name;
  sys.params = resolve_params(*info, options.params);
  sys.formalism = options.formalism;
  const Params& p = sys.params;

  std::optional<ConstraintSpec> constraint = options.constraint;
  if (name == "rolling_disc" && !constraint && !options.unconstrained) {
    constraint = ConstraintSpec{false, {}, {2, 3}, -1};
  }
  if (constraint && (name == "forced_oscillator_timedep" || name == "lqr_pmp")) {
    throw ContractError("system " + name + " does not take a constraint");
  }
  sys.constraint = constraint;

  std::optional<HamiltonianDef> closed_h;
  int n = 0;
  int m = 0;

  if (name == "canonical_particle" || name == "harmonic_oscillator") {
    n = m = integer_param(p, "dim", 1, 6);
    // mass = 0 is a legal singular Lagrangian; the solver reports it.
    const double mass = nonnegative_param(p, "mass");
    const double spring = name == "harmonic_oscillator" ? p.at("k") : 0.0;
    sys.algebroid = tangent_algebroid(n);
    sys.base = constraint ? share(DiracAlgebroid::pi_graph(*sys.algebroid))
                          : share(canonical_structure(n));
    sys.lagrangian = oscillator_lagrangian(mass, spring, n);
    if (mass > 0.0) closed_h = oscillator_hamiltonian(mass, spring, n);
  } else if (name == "rolling_disc") {
    n = 1;
    m = 4;
    const double mass = positive_param(p, "m");
    const double radius = positive_param(p, "R");
    const double j1 = positive_param(p, "J1");
    const double j2 = positive_param(p, "J2");
    sys.algebroid = rolling_disc_algebroid(radius);
    sys.base = share(DiracAlgebroid::pi_graph(*sys.algebroid));
    sys.lagrangian = rolling_disc_lagrangian(mass, radius, j1, j2);
    closed_h = rolling_disc_hamiltonian(mass, radius, j1, j2);
    sys.angle_columns = {0};
  } else if (name == "euler_top") {
    n = 0;
    m = 3;
    Vector inertia(3);
    inertia << positive_param(p, "J1"), positive_param(p, "J2"), positive_param(p, "J3");
    sys.algebroid = so3_algebroid();
    sys.base = share(DiracAlgebroid::pi_graph(*sys.algebroid));
    sys.lagrangian = euler_top_lagrangian(inertia);
    closed_h = euler_top_hamiltonian(inertia);
  } else if (name == "forced_oscillator_timedep") {
    n = 2;
    m = 1;
    const double mass = positive_param(p, "mass");
    const double spring = p.at("spring");
    const double amp = p.at("amplitude");
    const double freq = p.at("frequency");
    const auto k = [=](double t) { return spring * (1.0 + amp * std::sin(freq * t)); };
    LagrangianDef::TimePartials d;
    d.grad_x = [k](double t, const Vector& x, const Vector&) { return Vector(-k(t) * x); };
    d.grad_y = [mass](double, const Vector&, const Vector& y) { return Vector(mass * y); };
    d.hess_yy = [mass](double, const Vector&, const Vector&) {
      return Matrix(Matrix::Constant(1, 1, mass));
    };
    d.hess_yx = [](double, const Vector&, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
    sys.lagrangian = LagrangianDef::time_dependent(
        1, 1,
        [mass, k](double t, const Vector& x, const Vector& y) {
          return 0.5 * mass * y.squaredNorm() - 0.5 * k(t) * x.squaredNorm();
        },
        d);
    HamiltonianPartials hd;
    hd.grad_x = [k, spring, amp, freq](const Vector& xe, const Vector&) {
      Vector g(2);
      g(0) = 0.5 * spring * amp * freq * std::cos(freq * xe(0)) * xe(1) * xe(1);
      g(1) = k(xe(0)) * xe(1);
      return g;
    };
    hd.grad_xi = [mass](const Vector&, const Vector& xi) { return Vector(xi / mass); };
    closed_h = HamiltonianDef(
        2, 1,
        [mass, k](const Vector& xe, const Vector& xi) {
          return 0.5 * xi.squaredNorm() / mass + 0.5 * k(xe(0)) * xe(1) * xe(1);
        },
        hd);
    sys.algebroid = tangent_algebroid(1);
    sys.base = share(time_extend(canonical_structure(1)));
  } else if (name == "lqr_pmp") {
    n = m = 1;
    const double qw = p.at("state_weight");
    const double rw = positive_param(p, "control_weight");
    ControlPartials d;
    d.f_x = [](const Vector&, const Vector&) { return Matrix(Matrix::Zero(1, 1)); };
    d.f_u = [](const Vector&, const Vector&) { return Matrix(Matrix::Identity(1, 1)); };
    d.cost_x = [qw](const Vector& x, const Vector&) { return Vector(qw * x); };
    d.cost_u = [rw](const Vector&, const Vector& u) { return Vector(rw * u); };
    sys.control = ControlSystem(
        1, 1, 1, [](const Vector&, const Vector& u) { return u; },
        [qw, rw](const Vector& x, const Vector& u) {
          return 0.5 * (qw * x.squaredNorm() + rw * u.squaredNorm());
        },
        d);
    sys.algebroid = tangent_algebroid(1);
    sys.base = share(canonical_structure(1));
  }

  sys.structure = constraint ? share(apply_constraint(*sys.base, *constraint, sys.linear_constraint))
                             : sys.base;

  if (sys.lagrangian) {
    if (options.legendre_hamiltonian) {
      sys.hamiltonian = legendre_transform(*sys.lagrangian);
    } else if (closed_h) {
      sys.hamiltonian = *closed_h;
    } else if (options.formalism == Formalism::hamiltonian) {
      throw HyperregularityError("the Lagrangian of " + name + " is singular; no Hamiltonian",
                                 Vector(0), Vector(0));
    }
  }

  switch (options.formalism) {
    case Formalism::lagrangian:
      sys.problem = lagrangian_problem(*sys.structure, *sys.lagrangian);
      break;
    case Formalism::hamiltonian:
      sys.problem = hamiltonian_problem(*sys.structure, *sys.hamiltonian);
      break;
    case Formalism::pmp:
      sys.problem = pmp_problem(*sys.control, *sys.structure);
      break;
  }
  if (name == "euler_top") {
    const Vector inertia = Vector(sys.lagrangian->hess_yy(Vector(0), Vector::Zero(3)).diagonal());
    const bool lag = options.formalism == Formalism::lagrangian;
    sys.problem->add_monitor({"momentum_norm_sq", [inertia, lag](double, const Vector& s) {
                                return lag ? inertia.cwiseProduct(s).squaredNorm()
                                           : s.squaredNorm();
                              }});
  }
  if (options.formalism == Formalism::hamiltonian) {
    const auto h = std::make_shared<const HamiltonianDef>(*sys.hamiltonian);
    // Same channel name as the Lagrangian side.
    sys.problem->add_monitor({"energy", [h, n](double, const Vector& s) {
                                return h->value(s.head(n), s.tail(s.size() - n));
                              }});
  }

  const std::string sname = name;
  const auto lag = sys.lagrangian ? std::make_shared<const LagrangianDef>(*sys.lagrangian)
                                  : std::shared_ptr<const LagrangianDef>();
  const Formalism formalism = options.formalism;
  sys.initial_map = [sname, lag, formalism, n, m](const Vector& init, double t0) -> Vector {
    if (formalism == Formalism::pmp) {
      require_length(init, {2, 3}, sname);
      if (init.size() == 3) return init;
      Vector s(3);
      s << init(0), init(1), init(1);
      return s;
    }
    Vector xy;
    if (sname == "rolling_disc") {
      require_length(init, {3, 5}, sname);
      xy = init.size() == 5 ? init : concat(init, Vector::Zero(2));
    } else if (sname == "forced_oscillator_timedep") {
      require_length(init, {2, 3}, sname);
      xy = Vector(3);
      xy << t0, init.tail(2);
    } else {
      require_length(init, {n + m}, sname);
      xy = init;
    }
    if (formalism == Formalism::lagrangian) return xy;
    const Vector x = xy.head(n);
    return concat(x, lag->grad_y(x, xy.tail(m)));
  };
  return sys;
}

}  // namespace diralg
