#pragma once

#include "diralg/algebroid.hpp"
#include "diralg/constraint_types.hpp"

#include <memory>
#include <string>
#include <variant>

namespace diralg {

/// A point of the Pontryagin bundle TE* (+) T*E* in adapted coordinates.
struct PontryaginPoint {
  Vector x;
  Vector xi;
  Vector xdot;
  Vector xidot;
  Vector p;
  Vector y;

  /// Fiber coordinates stacked as (xdot, xidot, p, y).
  Vector fiber_coords() const;
  static PontryaginPoint from_fiber_coords(const Vector& x, const Vector& xi, const Vector& coords);
};

/// An element (x, xdot, y) of TM (+) E.
struct VelocityPair {
  Vector x;
  Vector xdot;
  Vector y;
};

/// Pointwise data of a Dirac algebroid at a base point x. With N = n + m,
/// v = (xdot, y) and core = (p, xidot) the defining equations are
///
///   vel * v = vel_offset
///   mom * core + sum_{c,j} bilinear(r, c, j) v_c xi_j = 0.
///
/// Every representation reduces to this form.
struct LocalForm {
  Matrix vel;
  Vector vel_offset;
  Matrix mom;
  Tensor3 bilinear;

  int rows() const { return static_cast<int>(vel.rows() + mom.rows()); }
  Vector residual(const Vector& v, const Vector& core, const Vector& xi) const;
  /// The bilinear term as a matrix acting on v, for fixed xi.
  Matrix bilinear_matrix(const Vector& xi) const;
};

/// Phase bundle equations offset + xi_coeff * xi = 0 at a base point. Rows with
/// a zero xi_coeff row are base-support constraints.
struct PhaseForm {
  Vector offset;
  Matrix xi_coeff;

  int rows() const { return static_cast<int>(offset.size()); }
  Vector residual(const Vector& xi) const { return offset + xi_coeff * xi; }
};

using Tensor3Field = std::function<Tensor3(const Vector&)>;
using PhaseField = std::function<PhaseForm(const Vector&)>;

class DiracAlgebroid;

/// Graph of the linear bivector of a skew algebroid.
struct PiGraph {
  SkewAlgebroid algebroid;
};

/// Graph of a linear 2-form: rho(x) is m x n (entries rho^i_a) and cform(x)
/// is n x n x m (entries c^k_{ab}), antisymmetric in the first two slots.
struct OmegaGraph {
  MatrixField rho;
  Tensor3Field cform;
};

/// The canonical structure on T*M (n = m, identity anchor, zero bracket).
struct Canonical {};

/// Local normal form. With N = n + m: eta is r x N and etahat (N - r) x N on
/// (xdot, y); zeta is r x N and zetahat (N - r) x N on (p, xidot); c is
/// r x r x m with c(i, k, j) = c^j_{ik}. Residual rows are
///   etahat (xdot, y)   and   zeta (p, xidot) + c^j_{ik} (eta v)^k xi_j.
struct GeneralLocal {
  MatrixField eta;
  MatrixField etahat;
  MatrixField zeta;
  MatrixField zetahat;
  Tensor3Field c;
  PhaseField phase;  // may be empty: Ph_D = E*
};

/// Structure induced by a (linear or affine) velocity constraint.
struct Induced {
  std::shared_ptr<const DiracAlgebroid> base;
  std::variant<LinearConstraint, AffineConstraint> constraint;
  /// PiGraph base with adapted selectors: uses the closed-form equations.
  bool closed_form = false;
};

/// Product with the affine structure xdot^0 = 1 on the time line. The time
/// coordinate x^0 is the first base coordinate of the extended chart.
struct TimeExtended {
  std::shared_ptr<const DiracAlgebroid> base;
};

using DiracRepresentation =
    std::variant<PiGraph, OmegaGraph, Canonical, GeneralLocal, Induced, TimeExtended>;

class DiracAlgebroid {
 public:
  DiracAlgebroid(Chart chart, DiracRepresentation rep);

  static DiracAlgebroid pi_graph(SkewAlgebroid algebroid);
  static DiracAlgebroid omega_graph(Chart chart, MatrixField rho, Tensor3Field cform);
  static DiracAlgebroid canonical(int n);
  static DiracAlgebroid general_local(Chart chart, GeneralLocal form);

  const Chart& chart() const { return chart_; }
  const DiracRepresentation& representation() const { return rep_; }
  std::string kind() const;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(rep_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(rep_);
  }

  /// True when the velocity equations carry a nonzero affine offset.
  bool is_affine() const;

 private:
  Chart chart_;
  DiracRepresentation rep_;
};

LocalForm local_form(const DiracAlgebroid& d, const Vector& x);
PhaseForm phase_form(const DiracAlgebroid& d, const Vector& x);

/// 1/2 (p1 xdot2 + y1 xidot2 + p2 xdot1 + y2 xidot1). Base points must agree
/// to 1e-12.
double pairing(const PontryaginPoint& a, const PontryaginPoint& b);

/// Defining-equation values (n + m rows); zero iff P lies in D, given that
/// (x, xi) satisfies the phase equations.
Vector residual(const DiracAlgebroid& d, const PontryaginPoint& pt);

/// Linear part of the residual in the coordinates (xdot, xidot, p, y).
Matrix residual_jacobian(const DiracAlgebroid& d, const Vector& x, const Vector& xi);

/// Orthonormal basis (columns, 2(n+m) rows ordered (xdot, xidot, p, y)) of
/// the fiber of D over (x, xi). Throws StructureError unless the dimension is
/// n + m.
Matrix basis_at(const DiracAlgebroid& d, const Vector& x, const Vector& xi);

Vector velocity_residual(const DiracAlgebroid& d, const VelocityPair& v);

/// Core directions (p, xidot) as orthonormal columns. Cross-checked against
/// the annihilator of Vel_D; a mismatch above 1e-8 rad throws StructureError.
Matrix core_at(const DiracAlgebroid& d, const Vector& x);

struct PhaseMembership {
  bool member = true;
  Vector residual;
};

PhaseMembership phase_membership(const DiracAlgebroid& d, const Vector& x, const Vector& xi);

}  // namespace diralg
