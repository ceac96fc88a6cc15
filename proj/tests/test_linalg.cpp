#include "diralg/finite_diff.hpp"
#include "diralg/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace diralg;

TEST(Linalg, NullSpaceOfRankDeficientMatrix) {
  Matrix a(2, 4);
  a << 1, 2, 3, 4,
       2, 4, 6, 8;
  EXPECT_EQ(numeric_rank(a), 1);
  const Matrix k = null_space(a);
  EXPECT_EQ(k.cols(), 3);
  EXPECT_LT((a * k).norm(), 1e-12);
  EXPECT_LT((k.transpose() * k - Matrix::Identity(3, 3)).norm(), 1e-12);
}

TEST(Linalg, NullSpaceOfEmptyRowsIsEverything) {
  EXPECT_EQ(null_space(Matrix(0, 3)).cols(), 3);
}

TEST(Linalg, AnnihilatorIsOrthogonalComplement) {
  Matrix cols(3, 1);
  cols << 1, 1, 0;
  const Matrix ann = annihilator(cols);
  EXPECT_EQ(ann.cols(), 2);
  EXPECT_LT((cols.transpose() * ann).norm(), 1e-14);
}

TEST(Linalg, PrincipalAngleOfRotatedLine) {
  const double theta = 0.3;
  Matrix a(2, 1), b(2, 1);
  a << 1, 0;
  b << std::cos(theta), std::sin(theta);
  EXPECT_NEAR(max_principal_angle(a, b), theta, 1e-14);
  // Tiny angles are resolved at roundoff, not at sqrt(roundoff).
  b << 1, 1e-12;
  EXPECT_NEAR(max_principal_angle(a, b), 1e-12, 1e-20);
}

TEST(Linalg, PrincipalAnglesOfDifferentDimensionsArePiOverTwo) {
  const Matrix a = Matrix::Identity(3, 1);
  const Matrix b = Matrix::Identity(3, 2);
  EXPECT_NEAR(max_principal_angle(a, b), M_PI / 2, 1e-15);
}

TEST(FiniteDiff, GradientAndJacobianOfPolynomials) {
  const auto f = [](const Vector& x) { return x(0) * x(0) * x(1) + std::sin(x(1)); };
  Vector x(2);
  x << 1.5, -0.7;
  const Vector g = fd_gradient(f, x);
  EXPECT_NEAR(g(0), 2 * 1.5 * -0.7, 1e-8);
  EXPECT_NEAR(g(1), 1.5 * 1.5 + std::cos(-0.7), 1e-8);

  const auto v = [](const Vector& z) {
    Vector out(2);
    out << z(0) * z(1), z(0) - z(1);
    return out;
  };
  const Matrix j = fd_jacobian(v, x);
  EXPECT_NEAR(j(0, 0), -0.7, 1e-8);
  EXPECT_NEAR(j(0, 1), 1.5, 1e-8);
  EXPECT_NEAR(j(1, 0), 1.0, 1e-8);
  EXPECT_NEAR(j(1, 1), -1.0, 1e-8);
}

TEST(FiniteDiff, StepFollowsCoordinateScale) {
  EXPECT_DOUBLE_EQ(fd_step(0.0), 1e-6);
  EXPECT_DOUBLE_EQ(fd_step(100.0), 1e-4);
  EXPECT_DOUBLE_EQ(fd_step(0.5, FdStep::second), 1e-4);
}
