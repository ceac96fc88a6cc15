#include "diralg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace diralg {

namespace {

int rank_from_singular_values(const Vector& sv, double rel_tol) {
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (smax <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * smax) ++r;
  }
  return r;
}

}  // namespace

int numeric_rank(const Matrix& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return rank_from_singular_values(svd.singularValues(), rel_tol);
}

Matrix null_space(const Matrix& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  if (n == 0) return Matrix(0, 0);
  // Pad with zero rows so that the full V is square even for wide matrices.
  Matrix padded = a;
  if (a.rows() < n) {
    padded = Matrix::Zero(n, n);
    padded.topRows(a.rows()) = a;
  }
  Eigen::JacobiSVD<Matrix> svd(padded, Eigen::ComputeFullV);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixV().rightCols(n - r);
}

Matrix orthonormal_columns(const Matrix& cols, double rel_tol) {
  if (cols.cols() == 0 || cols.rows() == 0) return Matrix(cols.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  const int r = rank_from_singular_values(svd.singularValues(), rel_tol);
  return svd.matrixU().leftCols(r);
}

Matrix annihilator(const Matrix& cols, double rel_tol) {
  if (cols.cols() == 0) return Matrix::Identity(cols.rows(), cols.rows());
  return null_space(cols.transpose(), rel_tol);
}

Vector principal_angles(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormal_columns(a);
  const Matrix qb = orthonormal_columns(b);
  const Eigen::Index ka = qa.cols();
  const Eigen::Index kb = qb.cols();
  const Eigen::Index kmax = std::max(ka, kb);
  const Eigen::Index kmin = std::min(ka, kb);
  Vector angles = Vector::Constant(kmax, std::numbers::pi / 2);
  if (kmin == 0) return angles;

  // Let the smaller space be "s", the larger "l".
  const Matrix& s = ka <= kb ? qa : qb;
  const Matrix& l = ka <= kb ? qb : qa;
  const Matrix cross = l.transpose() * s;
  Eigen::JacobiSVD<Matrix> cos_svd(cross);
  Vector cosines = cos_svd.singularValues();  // descending
  const Matrix residual = s - l * cross;
  Eigen::JacobiSVD<Matrix> sin_svd(residual);
  Vector sines = sin_svd.singularValues();  // descending

  for (Eigen::Index i = 0; i < kmin; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double sn = std::clamp(sines(kmin - 1 - i), 0.0, 1.0);
    angles(i) = c > std::sqrt(0.5) ? std::asin(sn) : std::acos(c);
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
  const Vector angles = principal_angles(a, b);
  if (angles.size() == 0) return 0.0;
  return angles.maxCoeff();
}

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Vector(0);
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace diralg
