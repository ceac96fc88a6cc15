#include "diralg/algebroid.hpp"

#include "diralg/probe.hpp"

#include <cmath>
#include <sstream>

namespace diralg {

namespace {

void require_point(const Vector& x, int n, const char* what) {
  if (x.size() != n) {
    std::ostringstream os;
    os << what << ": expected base point of dimension " << n << ", got " << x.size();
    throw ContractError(os.str());
  }
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    if (!std::isfinite(x(a))) {
      std::ostringstream os;
      os << what << ": base coordinate " << a << " is not finite";
      throw EvaluationError(os.str());
    }
  }
}

constexpr int kValidationProbes = 8;

}  // namespace

Chart::Chart(int base_dim, int fiber_dim, std::vector<std::string> base_labels,
             std::vector<std::string> fiber_labels)
    : base_dim_(base_dim),
      fiber_dim_(fiber_dim),
      base_labels_(std::move(base_labels)),
      fiber_labels_(std::move(fiber_labels)) {
  if (base_dim_ < 0) throw ContractError("chart base dimension must be >= 0");
  if (fiber_dim_ < 1) throw ContractError("chart fiber dimension must be >= 1");
  if (base_labels_.empty()) {
    for (int a = 0; a < base_dim_; ++a) base_labels_.push_back("x" + std::to_string(a));
  }
  if (fiber_labels_.empty()) {
    for (int i = 0; i < fiber_dim_; ++i) fiber_labels_.push_back("y" + std::to_string(i));
  }
  if (static_cast<int>(base_labels_.size()) != base_dim_ ||
      static_cast<int>(fiber_labels_.size()) != fiber_dim_) {
    throw ContractError("chart label count does not match dimensions");
  }
}

SkewAlgebroid::SkewAlgebroid(Chart chart, AnchorFn anchor, StructureFn structure)
    : chart_(std::move(chart)), anchor_(std::move(anchor)), structure_(std::move(structure)) {
  const int n = chart_.base_dim();
  const int m = chart_.fiber_dim();
  ProbeSampler sampler(0x5eedULL);
  for (int p = 0; p < kValidationProbes; ++p) {
    const Vector x = sampler.base_point(n);
    const Matrix rho = anchor_(x);
    if (rho.rows() != n || rho.cols() != m) {
      throw StructureError("anchor must return an n x m matrix");
    }
    const Tensor3 c = structure_(x);
    if (c.dim0() != m || c.dim1() != m || c.dim2() != m) {
      throw StructureError("structure functions must form an m x m x m array");
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
          const double s = c(i, j, k) + c(j, i, k);
          const double scale = std::max({1.0, std::abs(c(i, j, k)), std::abs(c(j, i, k))});
          if (std::abs(s) > 1e-12 * scale) {
            std::ostringstream os;
            os << "structure functions are not antisymmetric: c^" << k << "_{" << i << j
               << "} + c^" << k << "_{" << j << i << "} = " << s;
            throw StructureError(os.str());
          }
        }
      }
    }
  }
}

SkewAlgebroid SkewAlgebroid::from_morphism(Chart chart, AnchorFn anchor, AnchorFn sigma,
                                           StructureFn structure) {
  ProbeSampler sampler(0xa11ceULL);
  for (int p = 0; p < kValidationProbes; ++p) {
    const Vector x = sampler.base_point(chart.base_dim());
    const Matrix r = anchor(x);
    const Matrix s = sigma(x);
    if (r.rows() != s.rows() || r.cols() != s.cols() ||
        (r - s).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff())) {
      throw StructureError("sigma differs from the anchor: the algebroid is not skew");
    }
  }
  return SkewAlgebroid(std::move(chart), std::move(anchor), std::move(structure));
}

Matrix SkewAlgebroid::anchor(const Vector& x) const { return anchor_(x); }

Tensor3 SkewAlgebroid::structure(const Vector& x) const { return structure_(x); }

SectionField::SectionField(int base_dim, VectorField value, JacobianFn jacobian)
    : base_dim_(base_dim), value_(std::move(value)), jacobian_(std::move(jacobian)) {
  if (!jacobian_ || base_dim_ == 0) return;
  ProbeSampler sampler(0x5ec7ULL);
  for (int p = 0; p < 5; ++p) {
    const Vector x = sampler.base_point(base_dim_);
    const Matrix analytic = jacobian_(x);
    const Matrix numeric = fd_jacobian(value_, x);
    if (!partials_agree(analytic, numeric, 1e-6)) {
      throw EvaluationError("section Jacobian disagrees with central differences");
    }
  }
}

SectionField SectionField::constant(int base_dim, Vector value) {
  const auto m = value.size();
  return SectionField(
      base_dim, [value](const Vector&) { return value; },
      [m, base_dim](const Vector&) { return Matrix::Zero(m, base_dim).eval(); });
}

SectionField SectionField::basis(int base_dim, int fiber_dim, int i) {
  Vector e = Vector::Zero(fiber_dim);
  e(i) = 1.0;
  return constant(base_dim, e);
}

Matrix SectionField::jacobian(const Vector& x, FdStep step) const {
  if (jacobian_) return jacobian_(x);
  return fd_jacobian(value_, x, step);
}

Matrix eval_anchor(const SkewAlgebroid& a, const Vector& x) {
  require_point(x, a.chart().base_dim(), "eval_anchor");
  Matrix rho = a.anchor(x);
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
      if (!std::isfinite(rho(r, c))) {
        std::ostringstream os;
        os << "anchor entry rho^" << r << "_" << c << " is not finite";
        throw EvaluationError(os.str());
      }
    }
  }
  return rho;
}

Tensor3 eval_structure(const SkewAlgebroid& a, const Vector& x) {
  require_point(x, a.chart().base_dim(), "eval_structure");
  const Tensor3 raw = a.structure(x);
  const int m = a.chart().fiber_dim();
  Tensor3 c(m, m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double v = raw(i, j, k);
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "structure entry c^" << k << "_{" << i << j << "} is not finite";
          throw EvaluationError(os.str());
        }
        c(i, j, k) = 0.5 * (v - raw(j, i, k));
      }
    }
  }
  return c;
}

Vector bracket(const SkewAlgebroid& a, const SectionField& x_field, const SectionField& y_field,
               const Vector& x, FdStep step) {
  const int m = a.chart().fiber_dim();
  const Matrix rho = eval_anchor(a, x);
  const Tensor3 c = eval_structure(a, x);
  const Vector xv = x_field.value(x);
  const Vector yv = y_field.value(x);
  const Matrix jx = x_field.jacobian(x, step);
  const Matrix jy = y_field.jacobian(x, step);

  Vector out = jy * (rho * xv) - jx * (rho * yv);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double w = xv(i) * yv(j);
      if (w == 0.0) continue;
      for (int k = 0; k < m; ++k) out(k) += c(i, j, k) * w;
    }
  }
  if (!out.allFinite()) throw EvaluationError("bracket evaluation produced a non-finite value");
  return out;
}

SectionField bracket_field(const SkewAlgebroid& a, const SectionField& x_field,
                           const SectionField& y_field, FdStep step) {
  return SectionField(a.chart().base_dim(), [a, x_field, y_field, step](const Vector& x) {
    return bracket(a, x_field, y_field, x, step);
  });
}

Vector jacobiator(const SkewAlgebroid& a, const SectionField& x_field, const SectionField& y_field,
                  const SectionField& z_field, const Vector& x) {
  constexpr FdStep nested = FdStep::second;
  const SectionField yz = bracket_field(a, y_field, z_field, nested);
  const SectionField zx = bracket_field(a, z_field, x_field, nested);
  const SectionField xy = bracket_field(a, x_field, y_field, nested);
  return bracket(a, x_field, yz, x, nested) + bracket(a, y_field, zx, x, nested) +
         bracket(a, z_field, xy, x, nested);
}

Matrix eval_linear_bivector(const SkewAlgebroid& a, const Vector& x, const Vector& xi) {
  const int n = a.chart().base_dim();
  const int m = a.chart().fiber_dim();
  if (xi.size() != m) throw ContractError("eval_linear_bivector: xi has wrong dimension");
  const Matrix rho = eval_anchor(a, x);
  const Tensor3 c = eval_structure(a, x);
  Matrix pi = Matrix::Zero(n + m, n + m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = 0.0;
      for (int k = 0; k < m; ++k) v += c(i, j, k) * xi(k);
      pi(n + i, n + j) = v;
    }
    for (int b = 0; b < n; ++b) {
      pi(n + i, b) = rho(b, i);
      pi(b, n + i) = -rho(b, i);
    }
  }
  return pi;
}

double max_basis_jacobiator(const SkewAlgebroid& a, const Vector& x) {
  const int n = a.chart().base_dim();
  const int m = a.chart().fiber_dim();
  std::vector<SectionField> basis;
  for (int i = 0; i < m; ++i) basis.push_back(SectionField::basis(n, m, i));
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      for (int k = j + 1; k < m; ++k) {
        worst = std::max(worst, jacobiator(a, basis[i], basis[j], basis[k], x).norm());
      }
    }
  }
  return worst;
}

}  // namespace diralg
