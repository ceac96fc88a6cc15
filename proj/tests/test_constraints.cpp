#include "diralg/constraints.hpp"
#include "diralg/dynamics.hpp"
#include "diralg/linalg.hpp"
#include "diralg/probe.hpp"
#include "diralg/systems.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace diralg;
using diralg::testing::RowBuilder;
using diralg::testing::vec;

namespace {

DiracAlgebroid disc(double r = 1.0) { return DiracAlgebroid::pi_graph(rolling_disc_algebroid(r)); }

LinearConstraint no_slip() { return LinearConstraint::adapted({}, {2, 3}); }

// phidot - y0, y2, y3 on (phidot, y0..y3): the no-slip constraint written as a
// general matrix whose kernel lies inside the velocity bundle.
Matrix no_slip_rows(const Vector&) {
  Matrix w = Matrix::Zero(3, 5);
  w(0, 0) = 1;
  w(0, 1) = -1;
  w(1, 3) = 1;
  w(2, 4) = 1;
  return w;
}

// Product of the rolling-disc pi-graph with T(time line), written as a
// general local form on the chart (t, phi; y0..y3). Velocity: phidot = y0 with
// tdot free; momentum rows p_t = 0 and the pi-graph rows.
DiracAlgebroid disc_times_time_line(double r) {
  const SkewAlgebroid a = rolling_disc_algebroid(r);
  GeneralLocal g;
  // Columns of (xdot, y): tdot, phidot, y0, y1, y2, y3.
  g.etahat = [](const Vector&) {
    Matrix e = Matrix::Zero(1, 6);
    e(0, 1) = 1;
    e(0, 2) = -1;
    return e;
  };
  g.eta = [](const Vector&) {
    Matrix e = Matrix::Zero(5, 6);
    e(0, 0) = 1;
    for (int i = 0; i < 4; ++i) e(1 + i, 2 + i) = 1;
    return e;
  };
  // Columns of (p, xidot): p_t, p_phi, xidot0..3.
  g.zeta = [a](const Vector& x) {
    const Matrix rho = a.anchor(x.tail(1));
    Matrix z = Matrix::Zero(5, 6);
    z(0, 0) = 1;
    for (int j = 0; j < 4; ++j) {
      z(1 + j, 2 + j) = 1;
      z(1 + j, 1) = rho(0, j);
    }
    return z;
  };
  g.zetahat = [](const Vector&) { return Matrix(Matrix::Identity(1, 6)); };
  // Row 1+j carries -c^k_{ij} y^i xi_k, i.e. C(1+j, 1+i, k) = c(j, i, k).
  g.c = [a](const Vector& x) {
    const Tensor3 c = a.structure(x.tail(1));
    Tensor3 out(5, 5, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) out(1 + j, 1 + i, k) = c(j, i, k);
    return out;
  };
  return DiracAlgebroid::general_local(Chart(2, 4), g);
}

Matrix fiber_solutions(const DiracAlgebroid& d, const Vector& x, const Vector& xi, Vector* particular) {
  const int total = d.chart().total_dim();
  const Vector r0 = residual(d, PontryaginPoint::from_fiber_coords(x, xi, Vector::Zero(2 * total)));
  *particular = residual_jacobian(d, x, xi)
                    .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                    .solve(-r0);
  return basis_at(d, x, xi);
}

}  // namespace

TEST(Induce, RollingDiscMatchesClosedFormEquations) {
  const double r = 1.25;
  const DiracAlgebroid dv = induce(disc(r), no_slip());
  EXPECT_EQ(dv.kind(), "induced");
  ProbeSampler s(31);
  for (int probe = 0; probe < 30; ++probe) {
    const double phi = s.scalar();
    const Vector xi = s.fiber_point(4);
    // y^2 = y^3 = 0, phidot = y^0,
    // xidot_0 = R y^1 (xi_2 sin phi - xi_3 cos phi) - p,
    // xidot_1 = -R y^0 (xi_2 sin phi - xi_3 cos phi).
    RowBuilder b(1, 4);
    const double w = xi(2) * std::sin(phi) - xi(3) * std::cos(phi);
    auto row = b.add();
    b.rows(row, b.y(2)) = 1;
    row = b.add();
    b.rows(row, b.y(3)) = 1;
    row = b.add();
    b.rows(row, b.xdot(0)) = 1;
    b.rows(row, b.y(0)) = -1;
    row = b.add();
    b.rows(row, b.xidot(0)) = 1;
    b.rows(row, b.y(1)) = -r * w;
    b.rows(row, b.p(0)) = 1;
    row = b.add();
    b.rows(row, b.xidot(1)) = 1;
    b.rows(row, b.y(0)) = r * w;
    EXPECT_LT(max_principal_angle(basis_at(dv, vec({phi}), xi), null_space(b.rows)), 1e-10);
  }
}

TEST(Induce, EmptySelectorsKeepTheStructure) {
  const DiracAlgebroid d = disc(0.8);
  const DiracAlgebroid dv = induce(d, LinearConstraint::adapted({}, {}));
  ProbeSampler s(32);
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = s.base_point(1);
    const Vector xi = s.fiber_point(4);
    EXPECT_LE(max_principal_angle(basis_at(d, x, xi), basis_at(dv, x, xi)), 1e-10);
    EXPECT_LE(max_principal_angle(basis_at(d, x, xi), pointwise_induce(d, LinearConstraint::adapted({}, {}), x, xi)),
              1e-10);
  }
}

TEST(Induce, CanonicalWithOneDirectionMatchesDistributionForm) {
  // Canonical structure on T*R^2 with V_0 = span{d/dx^0}: the induced
  // structure is xdot = y in V_0, and p + xidot annihilating V_0.
  const DiracAlgebroid d = DiracAlgebroid::canonical(2);
  const LinearConstraint v = LinearConstraint::adapted({}, {1});
  const DiracAlgebroid dv = induce(d, v);
  RowBuilder b(2, 2);
  for (int a = 0; a < 2; ++a) {
    const auto row = b.add();
    b.rows(row, b.xdot(a)) = 1;
    b.rows(row, b.y(a)) = -1;
  }
  auto row = b.add();
  b.rows(row, b.y(1)) = 1;
  row = b.add();
  b.rows(row, b.p(0)) = 1;
  b.rows(row, b.xidot(0)) = 1;
  const Matrix oracle = null_space(b.rows);
  ASSERT_EQ(oracle.cols(), 4);
  ProbeSampler s(33);
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = s.base_point(2);
    const Vector xi = s.fiber_point(2);
    EXPECT_LE(max_principal_angle(basis_at(dv, x, xi), oracle), 1e-10);
    EXPECT_LE(max_principal_angle(pointwise_induce(d, v, x, xi), oracle), 1e-10);
  }
}

TEST(Induce, ClosedFormAgreesWithPointwiseOracle) {
  for (double r : {0.5, 2.0}) {
    const DiracAlgebroid d = disc(r);
    const DiracAlgebroid dv = induce(d, no_slip());
    ProbeSampler s(34);
    for (int probe = 0; probe < 100; ++probe) {
      const Vector x = s.base_point(1);
      const Vector xi = s.fiber_point(4);
      EXPECT_LE(max_principal_angle(basis_at(dv, x, xi), pointwise_induce(d, no_slip(), x, xi)),
                1e-9);
    }
  }
}

TEST(Induce, GeneralMatrixFormAgreesWithSelectors) {
  const DiracAlgebroid d = disc(1.5);
  const DiracAlgebroid adapted = induce(d, no_slip());
  const DiracAlgebroid general = induce(d, LinearConstraint::general(no_slip_rows));
  ProbeSampler s(35);
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = s.base_point(1);
    const Vector xi = s.fiber_point(4);
    EXPECT_LE(max_principal_angle(basis_at(adapted, x, xi), basis_at(general, x, xi)), 1e-9);
  }
}

TEST(Induce, TrivialConstraintInOneDimension) {
  // Canonical n = m = 1 with V_0 = {0}: the induced fiber is
  // {xdot = y = 0} with (p, xidot) free.
  const DiracAlgebroid d = DiracAlgebroid::canonical(1);
  const Matrix b = pointwise_induce(d, LinearConstraint::adapted({}, {0}), vec({0.3}), vec({1}));
  EXPECT_EQ(b.cols(), 2);
  Matrix oracle = Matrix::Zero(4, 2);
  oracle(1, 0) = 1;  // xidot
  oracle(2, 1) = 1;  // p
  EXPECT_LE(max_principal_angle(b, oracle), 1e-12);
}

TEST(Induce, ConstraintOutsideVelocityBundleIsRejected) {
  const auto loose = [](const Vector&) {
    Matrix w = Matrix::Zero(2, 5);
    w(0, 3) = 1;
    w(1, 4) = 1;
    return w;
  };
  EXPECT_THROW(induce(disc(), LinearConstraint::general(loose)), ConstraintError);
}

TEST(Induce, BadSelectorsAreRejected) {
  EXPECT_THROW(induce(disc(), LinearConstraint::adapted({}, {4})), ConstraintError);
  EXPECT_THROW(induce(disc(), LinearConstraint::adapted({}, {2, 2})), ConstraintError);
  EXPECT_THROW(induce(disc(), LinearConstraint::adapted({1}, {})), ConstraintError);
}

TEST(Induce, RankChangeOnSupportIsAStructureError) {
  const DiracAlgebroid d = DiracAlgebroid::pi_graph(tangent_algebroid(1));
  const auto w = [](const Vector& x) {
    Matrix out(2, 2);
    out << 1, -1, std::max(0.0, x(0)), 0;
    return out;
  };
  EXPECT_THROW(induce(d, LinearConstraint::general(w)), StructureError);
}

TEST(Induce, PointwiseOffSupportIsAContractViolation) {
  const DiracAlgebroid d = DiracAlgebroid::pi_graph(tangent_algebroid(2));
  EXPECT_THROW(pointwise_induce(d, LinearConstraint::adapted({1}, {1}), vec({0, 0.5}), vec({0, 0})),
               ContractError);
}

TEST(Induce, Idempotent) {
  const DiracAlgebroid dv = induce(disc(0.7), no_slip());
  const DiracAlgebroid dvv = induce(dv, no_slip());
  ProbeSampler s(36);
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = s.base_point(1);
    const Vector xi = s.fiber_point(4);
    EXPECT_LE(max_principal_angle(basis_at(dv, x, xi), basis_at(dvv, x, xi)), 1e-9);
  }
}

TEST(Induce, ProjectsOntoConstraintAndPhaseBundle) {
  const DiracAlgebroid dv = induce(disc(1.1), no_slip());
  // V = {phidot = y0, y2 = y3 = 0} on (phidot, y0..y3).
  Matrix v = Matrix::Zero(5, 2);
  v(0, 0) = 1;
  v(1, 0) = 1;
  v(2, 1) = 1;
  ProbeSampler s(37);
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = s.base_point(1);
    const Vector xi = s.fiber_point(4);
    EXPECT_TRUE(phase_membership(dv, x, xi).member);
    const Matrix b = basis_at(dv, x, xi);
    // (xdot, y) block of each basis vector.
    Matrix proj(5, b.cols());
    proj << b.row(0), b.bottomRows(4);
    EXPECT_EQ(numeric_rank(proj), 2);
    EXPECT_LE(max_principal_angle(orthonormal_columns(proj), v), 1e-10);
  }
}

TEST(Induce, DimensionAndIsotropyOnProbes) {
  const DiracAlgebroid dv = induce(disc(1.9), no_slip());
  ProbeSampler s(38);
  for (int probe = 0; probe < 30; ++probe) {
    const Vector x = s.base_point(1);
    const Vector xi = s.fiber_point(4);
    const Matrix b = basis_at(dv, x, xi);
    ASSERT_EQ(b.cols(), 5);
    for (int i = 0; i < 5; ++i)
      for (int j = i; j < 5; ++j)
        EXPECT_LE(std::abs(pairing(PontryaginPoint::from_fiber_coords(x, xi, b.col(i)),
                                   PontryaginPoint::from_fiber_coords(x, xi, b.col(j)))),
                  1e-10);
  }
}

TEST(InduceAffine, AdaptedUnitComponent) {
  const DiracAlgebroid da = induce_affine(disc(), AffineConstraint::adapted({}, {2, 3}, 0));
  EXPECT_TRUE(da.is_affine());
  EXPECT_LT(velocity_residual(da, {vec({0.2}), vec({1}), vec({1, -0.4, 0, 0})}).norm(), 1e-14);
  EXPECT_GT(velocity_residual(da, {vec({0.2}), vec({2}), vec({2, -0.4, 0, 0})}).norm(), 0.5);
}

TEST(InduceAffine, ZeroOffsetGivesTheLinearStructure) {
  const DiracAlgebroid d = disc(1.3);
  const DiracAlgebroid da = induce_affine(
      d, AffineConstraint::general(no_slip_rows, [](const Vector&) { return Vector(Vector::Zero(3)); }));
  const DiracAlgebroid dv = induce(d, LinearConstraint::general(no_slip_rows));
  ProbeSampler s(39);
  for (int probe = 0; probe < 20; ++probe) {
    const Vector x = s.base_point(1);
    const Vector xi = s.fiber_point(4);
    EXPECT_LE(max_principal_angle(basis_at(da, x, xi), basis_at(dv, x, xi)), 1e-10);
    const Vector r0 = residual(da, PontryaginPoint::from_fiber_coords(x, xi, Vector::Zero(10)));
    EXPECT_LT(r0.norm(), 1e-14);
  }
}

TEST(InduceAffine, TimeExtensionIsTheAffineUnitConstraint) {
  const double r = 0.9;
  const DiracAlgebroid ext = time_extend(disc(r));
  const DiracAlgebroid product = disc_times_time_line(r);
  const auto w = [](const Vector&) {
    Matrix out = Matrix::Zero(2, 6);
    out(0, 0) = 1;
    out(1, 1) = 1;
    out(1, 2) = -1;
    return out;
  };
  const DiracAlgebroid da = induce_affine(
      product, AffineConstraint::general(w, [](const Vector&) { return vec({1, 0}); }));
  ProbeSampler s(40);
  for (int probe = 0; probe < 30; ++probe) {
    const Vector x = s.base_point(2);
    const Vector xi = s.fiber_point(4);
    Vector pe, pa;
    const Matrix be = fiber_solutions(ext, x, xi, &pe);
    const Matrix ba = fiber_solutions(da, x, xi, &pa);
    EXPECT_LE(max_principal_angle(be, ba), 1e-10);
    // Each structure's particular point lies in the other's affine flat.
    EXPECT_LT(residual(da, PontryaginPoint::from_fiber_coords(x, xi, pe)).norm(), 1e-12);
    EXPECT_LT(residual(ext, PontryaginPoint::from_fiber_coords(x, xi, pa)).norm(), 1e-12);
    EXPECT_NEAR(pe(0), 1.0, 1e-12);
  }
}

TEST(InduceAffine, UnsolvableOffsetIsRejected) {
  // Asking for y2 = 1 when y2 is also forced to zero.
  const auto w = [](const Vector&) {
    Matrix out = Matrix::Zero(2, 5);
    out(0, 3) = 1;
    out(1, 3) = 1;
    return out;
  };
  EXPECT_THROW(induce_affine(disc(), AffineConstraint::general(w, [](const Vector&) { return vec({1, 0}); })),
               ConstraintError);
}

TEST(Integrability, RollingDiscIsNotDiracLie) {
  const double r = 1.6;
  const IntegrabilityReport rep = check_integrability(induce(disc(r), no_slip()));
  EXPECT_TRUE(rep.cond1);
  EXPECT_FALSE(rep.cond2);
  EXPECT_FALSE(rep.dirac_lie);
  EXPECT_TRUE(rep.base_is_lie);
  ASSERT_EQ(rep.cond2_entries.size(), 2u);
  const IntegrabilityEntry* c2 = rep.find("c^2_{01}");
  const IntegrabilityEntry* c3 = rep.find("c^3_{01}");
  ASSERT_NE(c2, nullptr);
  ASSERT_NE(c3, nullptr);
  // Witness values straight from the bracket table.
  EXPECT_NEAR(c2->value, r * std::abs(std::sin(c2->x(0))), 1e-14);
  EXPECT_NEAR(c3->value, r * std::abs(std::cos(c3->x(0))), 1e-14);
  EXPECT_GT(rep.cond2_max, 0.5 * r);
}

TEST(Integrability, NoConstraintOnLieAlgebroid) {
  const IntegrabilityReport rep = check_integrability(induce(disc(), LinearConstraint::adapted({}, {})));
  EXPECT_TRUE(rep.cond1);
  EXPECT_TRUE(rep.cond2);
  EXPECT_TRUE(rep.dirac_lie);
}

TEST(Integrability, FlatDistributionOnTangentBundle) {
  const DiracAlgebroid d = DiracAlgebroid::pi_graph(tangent_algebroid(3));
  const IntegrabilityReport rep = check_integrability(induce(d, LinearConstraint::adapted({}, {2})));
  EXPECT_TRUE(rep.cond1);
  EXPECT_TRUE(rep.cond2);
  EXPECT_TRUE(rep.dirac_lie);
}

TEST(Integrability, AnchorLeavingTheSupport) {
  // S = {x^1 = 0} with V = {y^0 = 0}: the free section e_1 has rho^1_1 = 1,
  // pointing off S.
  const DiracAlgebroid d = DiracAlgebroid::pi_graph(tangent_algebroid(2));
  const IntegrabilityReport off = check_integrability(induce(d, LinearConstraint::adapted({1}, {0})));
  EXPECT_FALSE(off.cond1);
  EXPECT_NEAR(off.cond1_max, 1.0, 1e-15);
  const IntegrabilityReport on = check_integrability(induce(d, LinearConstraint::adapted({1}, {1})));
  EXPECT_TRUE(on.cond1);
  EXPECT_TRUE(on.dirac_lie);
}

TEST(Integrability, RejectsUnsupportedInputs) {
  EXPECT_THROW(check_integrability(disc()), ConstraintError);
  EXPECT_THROW(check_integrability(induce(DiracAlgebroid::canonical(2), LinearConstraint::adapted({}, {1}))),
               ConstraintError);
}
