#pragma once

#include "diralg/finite_diff.hpp"
#include "diralg/types.hpp"

#include <vector>

namespace diralg {

/// Linear subbundle V of the velocity bundle, supported on S = {x^A = 0}.
///
/// Adapted form: V is cut out of Vel_D by y^I = 0. General form: V = ker W(x)
/// on (xdot, y), which must lie inside Vel_D. Indices are 0-based.
class LinearConstraint {
 public:
  static LinearConstraint adapted(std::vector<int> base_selector, std::vector<int> fiber_selector);
  static LinearConstraint general(MatrixField w, std::vector<int> base_selector = {});

  bool is_adapted() const { return !matrix_; }
  const std::vector<int>& base_selector() const { return base_selector_; }
  const std::vector<int>& fiber_selector() const { return fiber_selector_; }

  /// Constraint rows acting on (xdot, y) at x (selection rows when adapted).
  Matrix rows_at(const Vector& x, int n, int m) const;

  /// Throws ConstraintError for out-of-range or repeated indices.
  void validate(int n, int m) const;

 private:
  std::vector<int> base_selector_;
  std::vector<int> fiber_selector_;
  MatrixField matrix_;
};

/// Affine subbundle A of the velocity bundle.
///
/// Adapted form: x^A = 0, y^o = 1, y^Ibar = 0 with o the unit index; the model
/// bundle then has fiber selector Ibar + {o}. General form: W(x)(xdot, y) = w(x).
class AffineConstraint {
 public:
  static AffineConstraint adapted(std::vector<int> base_selector, std::vector<int> fiber_selector,
                                  int unit_index);
  static AffineConstraint general(MatrixField w, VectorField offset,
                                  std::vector<int> base_selector = {});

  bool is_adapted() const { return model_.is_adapted(); }
  const LinearConstraint& model() const { return model_; }
  /// -1 in the general form.
  int unit_index() const { return unit_index_; }

  Matrix rows_at(const Vector& x, int n, int m) const { return model_.rows_at(x, n, m); }
  Vector offset_at(const Vector& x, int n, int m) const;

  void validate(int n, int m) const;

 private:
  LinearConstraint model_;
  int unit_index_ = -1;
  VectorField offset_;
};

}  // namespace diralg
