#pragma once

#include "diralg/finite_diff.hpp"
#include "diralg/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace diralg {

/// One coordinate chart of a vector bundle E -> M: base coordinates x^a
/// (n of them, n = 0 allowed) and fiber coordinates y^i on E / xi_i on E*.
class Chart {
 public:
  Chart(int base_dim, int fiber_dim, std::vector<std::string> base_labels = {},
        std::vector<std::string> fiber_labels = {});

  int base_dim() const { return base_dim_; }
  int fiber_dim() const { return fiber_dim_; }
  /// n + m, the rank of a Dirac algebroid on this chart.
  int total_dim() const { return base_dim_ + fiber_dim_; }

  const std::vector<std::string>& base_labels() const { return base_labels_; }
  const std::vector<std::string>& fiber_labels() const { return fiber_labels_; }

 private:
  int base_dim_;
  int fiber_dim_;
  std::vector<std::string> base_labels_;
  std::vector<std::string> fiber_labels_;
};

using AnchorFn = MatrixField;
using StructureFn = std::function<Tensor3(const Vector&)>;

/// Skew algebroid on a single chart, given by the anchor rho(x) (n x m,
/// entries rho^a_i) and structure functions c(x) with c(i, j, k) = c^k_{ij}.
///
/// The structure is antisymmetrized on every evaluation; user data that is not
/// antisymmetric to 1e-12 on probe points is rejected at construction.
class SkewAlgebroid {
 public:
  SkewAlgebroid(Chart chart, AnchorFn anchor, StructureFn structure);

  /// Builds from a general algebroid morphism with independent sigma^a_j.
  /// Only the skew case sigma = rho is representable; anything else throws.
  static SkewAlgebroid from_morphism(Chart chart, AnchorFn anchor, AnchorFn sigma,
                                     StructureFn structure);

  const Chart& chart() const { return chart_; }

  Matrix anchor(const Vector& x) const;
  Tensor3 structure(const Vector& x) const;

 private:
  Chart chart_;
  AnchorFn anchor_;
  StructureFn structure_;
};

/// A section X of E in the chart: x |-> X(x) in R^m, with an optional analytic
/// Jacobian dX/dx (m x n).
class SectionField {
 public:
  using JacobianFn = std::function<Matrix(const Vector&)>;

  /// Validates a supplied Jacobian against central differences (1e-6
  /// relative) on a few probe points.
  SectionField(int base_dim, VectorField value, JacobianFn jacobian = {});

  static SectionField constant(int base_dim, Vector value);
  /// The i-th local basis section e_i.
  static SectionField basis(int base_dim, int fiber_dim, int i);

  int base_dim() const { return base_dim_; }
  Vector value(const Vector& x) const { return value_(x); }
  Matrix jacobian(const Vector& x, FdStep step = FdStep::first) const;
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }

 private:
  int base_dim_;
  VectorField value_;
  JacobianFn jacobian_;
};

Matrix eval_anchor(const SkewAlgebroid& a, const Vector& x);
Tensor3 eval_structure(const SkewAlgebroid& a, const Vector& x);

/// [X, Y]^k = rho^a_i X^i d_a Y^k - rho^a_j Y^j d_a X^k + c^k_{ij} X^i Y^j.
Vector bracket(const SkewAlgebroid& a, const SectionField& x_field, const SectionField& y_field,
               const Vector& x, FdStep step = FdStep::first);

/// The bracket as a section in its own right (no analytic Jacobian).
SectionField bracket_field(const SkewAlgebroid& a, const SectionField& x_field,
                           const SectionField& y_field, FdStep step = FdStep::first);

/// [X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]] at x, with nested differences.
Vector jacobiator(const SkewAlgebroid& a, const SectionField& x_field, const SectionField& y_field,
                  const SectionField& z_field, const Vector& x);

/// Matrix of the linear bivector
///   Pi = 1/2 c^k_{ij} xi_k d_{xi_i} ^ d_{xi_j} + rho^b_i d_{xi_i} ^ d_{x^b}
/// at (x, xi), block order (x, xi). Entry (I, J) is Pi(dz_I, dz_J).
Matrix eval_linear_bivector(const SkewAlgebroid& a, const Vector& x, const Vector& xi);

/// Largest jacobiator norm over all basis triples at x.
double max_basis_jacobiator(const SkewAlgebroid& a, const Vector& x);

}  // namespace diralg
