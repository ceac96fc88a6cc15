#include "diralg/finite_diff.hpp"

#include <algorithm>
#include <cmath>

namespace diralg {

double fd_step(double coordinate, FdStep kind) {
  const double base = kind == FdStep::first ? 1e-6 : 1e-4;
  return base * std::max(1.0, std::abs(coordinate));
}

Vector fd_gradient(const ScalarField& f, const Vector& x, FdStep kind) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x(i), kind);
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Matrix fd_jacobian(const VectorField& f, const Vector& x, FdStep kind) {
  Vector probe = x;
  Matrix jac;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x(i), kind);
    probe(i) = x(i) + h;
    const Vector fp = f(probe);
    probe(i) = x(i) - h;
    const Vector fm = f(probe);
    probe(i) = x(i);
    if (i == 0) jac.resize(fp.size(), x.size());
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  if (x.size() == 0) jac.resize(f(x).size(), 0);
  return jac;
}

bool partials_agree(const Matrix& analytic, const Matrix& numeric, double tol) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) return false;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      const double a = analytic(i, j);
      if (!(std::abs(a - numeric(i, j)) <= tol * std::max(1.0, std::abs(a)))) return false;
    }
  }
  return true;
}

}  // namespace diralg
