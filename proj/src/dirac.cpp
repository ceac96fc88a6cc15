#include "diralg/dirac.hpp"

#include "diralg/constraints.hpp"
#include "diralg/linalg.hpp"
#include "diralg/probe.hpp"

#include <cmath>
#include <sstream>

namespace diralg {

namespace {

Tensor3 antisymmetrize_first_two(const Tensor3& raw) {
  Tensor3 out(raw.dim0(), raw.dim1(), raw.dim2());
  for (int i = 0; i < raw.dim0(); ++i) {
    for (int k = 0; k < raw.dim1(); ++k) {
      for (int j = 0; j < raw.dim2(); ++j) out(i, k, j) = 0.5 * (raw(i, k, j) - raw(k, i, j));
    }
  }
  return out;
}

LocalForm pi_graph_form(const PiGraph& g, const Vector& x) {
  const int n = g.algebroid.chart().base_dim();
  const int m = g.algebroid.chart().fiber_dim();
  const Matrix rho = eval_anchor(g.algebroid, x);
  const Tensor3 c = eval_structure(g.algebroid, x);
  LocalForm f;
  f.vel.resize(n, n + m);
  f.vel << Matrix::Identity(n, n), -rho;
  f.vel_offset = Vector::Zero(n);
  f.mom.resize(m, n + m);
  f.mom << rho.transpose(), Matrix::Identity(m, m);
  f.bilinear = Tensor3(m, n + m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) f.bilinear(j, n + i, k) = -c(i, j, k);
    }
  }
  return f;
}

LocalForm omega_graph_form(const OmegaGraph& g, const Chart& chart, const Vector& x) {
  const int n = chart.base_dim();
  const int m = chart.fiber_dim();
  const Matrix rho = g.rho(x);
  if (rho.rows() != m || rho.cols() != n) throw StructureError("omega-graph rho must be m x n");
  const Tensor3 raw = g.cform(x);
  if (raw.dim0() != n || raw.dim1() != n || raw.dim2() != m) {
    throw StructureError("omega-graph cform must be n x n x m");
  }
  const Tensor3 c = antisymmetrize_first_two(raw);
  LocalForm f;
  f.vel.resize(m, n + m);
  f.vel << -rho, Matrix::Identity(m, m);
  f.vel_offset = Vector::Zero(m);
  f.mom.resize(n, n + m);
  f.mom << Matrix::Identity(n, n), rho.transpose();
  f.bilinear = Tensor3(n, n + m, m);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int k = 0; k < m; ++k) f.bilinear(a, b, k) = -c(a, b, k);
    }
  }
  return f;
}

LocalForm canonical_form(const Chart& chart) {
  const int n = chart.base_dim();
  LocalForm f;
  f.vel.resize(n, 2 * n);
  f.vel << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  f.vel_offset = Vector::Zero(n);
  f.mom.resize(n, 2 * n);
  f.mom << Matrix::Identity(n, n), Matrix::Identity(n, n);
  f.bilinear = Tensor3(n, 2 * n, n);
  return f;
}

LocalForm general_local_form(const GeneralLocal& g, const Chart& chart, const Vector& x) {
  const int total = chart.total_dim();
  const int m = chart.fiber_dim();
  const Matrix eta = g.eta(x);
  const Matrix etahat = g.etahat(x);
  const Matrix zeta = g.zeta(x);
  const Eigen::Index r = eta.rows();
  if (eta.cols() != total || etahat.cols() != total || zeta.cols() != total ||
      etahat.rows() != total - r || zeta.rows() != r) {
    throw StructureError("general local form: matrix shapes are inconsistent with n + m");
  }
  const Tensor3 raw = g.c(x);
  if (raw.dim0() != r || raw.dim1() != r || raw.dim2() != m) {
    throw StructureError("general local form: c must be r x r x m");
  }
  const Tensor3 c = antisymmetrize_first_two(raw);
  LocalForm f;
  f.vel = etahat;
  f.vel_offset = Vector::Zero(etahat.rows());
  f.mom = zeta;
  f.bilinear = Tensor3(static_cast<int>(r), total, m);
  for (int i = 0; i < r; ++i) {
    for (int k = 0; k < r; ++k) {
      for (int j = 0; j < m; ++j) {
        const double cij = c(i, k, j);
        if (cij == 0.0) continue;
        for (int col = 0; col < total; ++col) f.bilinear(i, col, j) += cij * eta(k, col);
      }
    }
  }
  return f;
}

LocalForm time_extended_form(const TimeExtended& t, const Vector& x) {
  const LocalForm b = local_form(*t.base, x.tail(x.size() - 1));
  const auto rv = b.vel.rows();
  const auto rz = b.mom.rows();
  const auto total = b.vel.cols();
  const int m = b.bilinear.dim2();
  LocalForm f;
  f.vel = Matrix::Zero(rv + 1, total + 1);
  f.vel(0, 0) = 1.0;
  f.vel.bottomRightCorner(rv, total) = b.vel;
  f.vel_offset.resize(rv + 1);
  f.vel_offset << 1.0, b.vel_offset;
  f.mom = Matrix::Zero(rz, total + 1);
  f.mom.rightCols(total) = b.mom;
  f.bilinear = Tensor3(static_cast<int>(rz), static_cast<int>(total) + 1, m);
  for (int r = 0; r < rz; ++r) {
    for (int c = 0; c < total; ++c) {
      for (int j = 0; j < m; ++j) f.bilinear(r, c + 1, j) = b.bilinear(r, c, j);
    }
  }
  return f;
}

void require_dims(const Chart& chart, const Vector& x, const Vector& xi, const char* what) {
  if (x.size() != chart.base_dim() || xi.size() != chart.fiber_dim()) {
    std::ostringstream os;
    os << what << ": point dimensions (" << x.size() << ", " << xi.size()
       << ") do not match the chart (" << chart.base_dim() << ", " << chart.fiber_dim() << ")";
    throw ContractError(os.str());
  }
}

}  // namespace

Vector PontryaginPoint::fiber_coords() const {
  Vector out(xdot.size() + xidot.size() + p.size() + y.size());
  out << xdot, xidot, p, y;
  return out;
}

PontryaginPoint PontryaginPoint::from_fiber_coords(const Vector& x, const Vector& xi,
                                                   const Vector& coords) {
  const auto n = x.size();
  const auto m = xi.size();
  if (coords.size() != 2 * (n + m)) throw ContractError("fiber coordinate vector has wrong size");
  PontryaginPoint pt;
  pt.x = x;
  pt.xi = xi;
  pt.xdot = coords.segment(0, n);
  pt.xidot = coords.segment(n, m);
  pt.p = coords.segment(n + m, n);
  pt.y = coords.segment(2 * n + m, m);
  return pt;
}

Vector LocalForm::residual(const Vector& v, const Vector& core, const Vector& xi) const {
  Vector out(rows());
  out.head(vel.rows()) = vel * v - vel_offset;
  out.tail(mom.rows()) = mom * core + bilinear_matrix(xi) * v;
  return out;
}

Matrix LocalForm::bilinear_matrix(const Vector& xi) const {
  Matrix out = Matrix::Zero(bilinear.dim0(), bilinear.dim1());
  for (int r = 0; r < bilinear.dim0(); ++r) {
    for (int c = 0; c < bilinear.dim1(); ++c) {
      double s = 0.0;
      for (int j = 0; j < bilinear.dim2(); ++j) s += bilinear(r, c, j) * xi(j);
      out(r, c) = s;
    }
  }
  return out;
}

DiracAlgebroid::DiracAlgebroid(Chart chart, DiracRepresentation rep)
    : chart_(std::move(chart)), rep_(std::move(rep)) {
  if (is<Canonical>() && chart_.base_dim() != chart_.fiber_dim()) {
    throw StructureError("canonical structure requires n = m");
  }
  if (is<PiGraph>()) {
    const Chart& a = as<PiGraph>().algebroid.chart();
    if (a.base_dim() != chart_.base_dim() || a.fiber_dim() != chart_.fiber_dim()) {
      throw StructureError("pi-graph chart does not match its algebroid");
    }
  }
  if (is<GeneralLocal>()) {
    const GeneralLocal& g = as<GeneralLocal>();
    if (!g.eta || !g.etahat || !g.zeta || !g.zetahat || !g.c) {
      throw StructureError("general local form requires eta, etahat, zeta, zetahat and c");
    }
    ProbeSampler sampler(0x9e11ULL);
    const Vector x = sampler.base_point(chart_.base_dim());
    general_local_form(g, chart_, x);
    const Matrix zh = g.zetahat(x);
    if (zh.rows() != g.etahat(x).rows() || zh.cols() != chart_.total_dim()) {
      throw StructureError("general local form: zetahat must match etahat in shape");
    }
  }
}

DiracAlgebroid DiracAlgebroid::pi_graph(SkewAlgebroid algebroid) {
  Chart chart = algebroid.chart();
  return DiracAlgebroid(std::move(chart), PiGraph{std::move(algebroid)});
}

DiracAlgebroid DiracAlgebroid::omega_graph(Chart chart, MatrixField rho, Tensor3Field cform) {
  return DiracAlgebroid(std::move(chart), OmegaGraph{std::move(rho), std::move(cform)});
}

DiracAlgebroid DiracAlgebroid::canonical(int n) {
  std::vector<std::string> base;
  std::vector<std::string> fiber;
  for (int a = 0; a < n; ++a) {
    base.push_back("q" + std::to_string(a));
    fiber.push_back("v" + std::to_string(a));
  }
  return DiracAlgebroid(Chart(n, n, base, fiber), Canonical{});
}

DiracAlgebroid DiracAlgebroid::general_local(Chart chart, GeneralLocal form) {
  return DiracAlgebroid(std::move(chart), std::move(form));
}

std::string DiracAlgebroid::kind() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiGraph>) return "pi_graph";
        if constexpr (std::is_same_v<T, OmegaGraph>) return "omega_graph";
        if constexpr (std::is_same_v<T, Canonical>) return "canonical";
        if constexpr (std::is_same_v<T, GeneralLocal>) return "general_local";
        if constexpr (std::is_same_v<T, Induced>) return "induced";
        if constexpr (std::is_same_v<T, TimeExtended>) return "time_extended";
      },
      rep_);
}

bool DiracAlgebroid::is_affine() const {
  if (is<TimeExtended>()) return true;
  if (is<Induced>()) {
    const Induced& ind = as<Induced>();
    return std::holds_alternative<AffineConstraint>(ind.constraint) || ind.base->is_affine();
  }
  return false;
}

LocalForm local_form(const DiracAlgebroid& d, const Vector& x) {
  if (x.size() != d.chart().base_dim()) throw ContractError("local_form: base point has wrong size");
  return std::visit(
      [&](const auto& r) -> LocalForm {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PiGraph>) return pi_graph_form(r, x);
        if constexpr (std::is_same_v<T, OmegaGraph>) return omega_graph_form(r, d.chart(), x);
        if constexpr (std::is_same_v<T, Canonical>) return canonical_form(d.chart());
        if constexpr (std::is_same_v<T, GeneralLocal>) return general_local_form(r, d.chart(), x);
        if constexpr (std::is_same_v<T, Induced>) return induced_local_form(r, d.chart(), x);
        if constexpr (std::is_same_v<T, TimeExtended>) return time_extended_form(r, x);
      },
      d.representation());
}

PhaseForm phase_form(const DiracAlgebroid& d, const Vector& x) {
  const int m = d.chart().fiber_dim();
  const PhaseForm empty{Vector(0), Matrix(0, m)};
  if (d.is<GeneralLocal>()) {
    const GeneralLocal& g = d.as<GeneralLocal>();
    if (!g.phase) return empty;
    PhaseForm f = g.phase(x);
    if (f.xi_coeff.cols() != m || f.xi_coeff.rows() != f.offset.size()) {
      throw StructureError("phase equations have inconsistent shapes");
    }
    return f;
  }
  if (d.is<Induced>()) return induced_phase_form(d.as<Induced>(), d.chart(), x);
  if (d.is<TimeExtended>()) return phase_form(*d.as<TimeExtended>().base, x.tail(x.size() - 1));
  return empty;
}

double pairing(const PontryaginPoint& a, const PontryaginPoint& b) {
  const auto close = [](const Vector& u, const Vector& v) {
    if (u.size() != v.size()) return false;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (std::abs(u(i) - v(i)) > 1e-12 * std::max(1.0, std::abs(u(i)))) return false;
    }
    return true;
  };
  if (!close(a.x, b.x) || !close(a.xi, b.xi)) {
    throw ContractError("pairing: points lie over different base points");
  }
  return 0.5 * (a.p.dot(b.xdot) + a.y.dot(b.xidot) + b.p.dot(a.xdot) + b.y.dot(a.xidot));
}

Vector residual(const DiracAlgebroid& d, const PontryaginPoint& pt) {
  const Chart& chart = d.chart();
  require_dims(chart, pt.x, pt.xi, "residual");
  const int n = chart.base_dim();
  const int m = chart.fiber_dim();
  if (pt.xdot.size() != n || pt.p.size() != n || pt.y.size() != m || pt.xidot.size() != m) {
    throw ContractError("residual: Pontryagin point blocks have wrong sizes");
  }
  const LocalForm f = local_form(d, pt.x);
  Vector v(n + m);
  v << pt.xdot, pt.y;
  Vector core(n + m);
  core << pt.p, pt.xidot;
  return f.residual(v, core, pt.xi);
}

Matrix residual_jacobian(const DiracAlgebroid& d, const Vector& x, const Vector& xi) {
  require_dims(d.chart(), x, xi, "residual_jacobian");
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  const int total = n + m;
  const LocalForm f = local_form(d, x);
  const Matrix bm = f.bilinear_matrix(xi);
  const auto rv = f.vel.rows();
  const auto rz = f.mom.rows();
  Matrix jac = Matrix::Zero(rv + rz, 2 * total);
  // Column blocks: xdot [0, n), xidot [n, n+m), p [n+m, 2n+m), y [2n+m, 2N).
  jac.block(0, 0, rv, n) = f.vel.leftCols(n);
  jac.block(0, 2 * n + m, rv, m) = f.vel.rightCols(m);
  jac.block(rv, n + m, rz, n) = f.mom.leftCols(n);
  jac.block(rv, n, rz, m) = f.mom.rightCols(m);
  jac.block(rv, 0, rz, n) += bm.leftCols(n);
  jac.block(rv, 2 * n + m, rz, m) += bm.rightCols(m);
  return jac;
}

Matrix basis_at(const DiracAlgebroid& d, const Vector& x, const Vector& xi) {
  const Matrix jac = residual_jacobian(d, x, xi);
  const int total = d.chart().total_dim();
  const Matrix basis = null_space(jac);
  if (basis.cols() != total) {
    std::ostringstream os;
    os << "pointwise subspace has dimension " << basis.cols() << ", expected " << total;
    throw StructureError(os.str(), numeric_rank(jac));
  }
  return basis;
}

Vector velocity_residual(const DiracAlgebroid& d, const VelocityPair& v) {
  const int n = d.chart().base_dim();
  const int m = d.chart().fiber_dim();
  if (v.x.size() != n || v.xdot.size() != n || v.y.size() != m) {
    throw ContractError("velocity_residual: velocity pair has wrong sizes");
  }
  const LocalForm f = local_form(d, v.x);
  Vector vv(n + m);
  vv << v.xdot, v.y;
  return f.vel * vv - f.vel_offset;
}

Matrix core_at(const DiracAlgebroid& d, const Vector& x) {
  const LocalForm f = local_form(d, x);
  const Matrix core = null_space(f.mom);
  const Matrix vel_model = null_space(f.vel);
  const Matrix ann = annihilator(vel_model);
  if (core.cols() != ann.cols()) {
    std::ostringstream os;
    os << "core has dimension " << core.cols() << " but the annihilator of Vel_D has dimension "
       << ann.cols();
    throw StructureError(os.str(), numeric_rank(f.mom));
  }
  const double angle = max_principal_angle(core, ann);
  if (angle > 1e-8) {
    std::ostringstream os;
    os << "core differs from the annihilator of Vel_D (angle " << angle << ")";
    throw StructureError(os.str());
  }
  return core;
}

PhaseMembership phase_membership(const DiracAlgebroid& d, const Vector& x, const Vector& xi) {
  require_dims(d.chart(), x, xi, "phase_membership");
  const PhaseForm f = phase_form(d, x);
  PhaseMembership out;
  out.residual = f.residual(xi);
  out.member = out.residual.size() == 0 || out.residual.lpNorm<Eigen::Infinity>() <= 1e-9;
  return out;
}

}  // namespace diralg
