#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace diralg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense rank-3 array with row-major (i, j, k) storage.
///
/// Structure functions are stored with the upper (output) index last:
/// `c(i, j, k)` holds c^k_{ij}, so antisymmetry is always in the first two slots.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0) * d1 * d2, 0.0) {}

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }

  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  const std::vector<double>& data() const { return data_; }
  void set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * d1_ + j) * d2_ + k;
  }

  int d0_ = 0;
  int d1_ = 0;
  int d2_ = 0;
  std::vector<double> data_;
};

// Error taxonomy. Every error carries a human-readable message; the CLI maps
// the classes onto exit codes.

class DiralgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise unusable values from a user-supplied field.
class EvaluationError : public DiralgError {
 public:
  using DiralgError::DiralgError;
};

/// A pointwise subspace has the wrong dimension or fails a rank check.
class StructureError : public DiralgError {
 public:
  StructureError(const std::string& what, int numeric_rank = -1)
      : DiralgError(what), numeric_rank_(numeric_rank) {}
  int numeric_rank() const { return numeric_rank_; }

 private:
  int numeric_rank_;
};

/// A constraint is malformed or not contained in the velocity bundle.
class ConstraintError : public DiralgError {
 public:
  using DiralgError::DiralgError;
};

/// Caller violated a documented precondition (mismatched base points, sizes).
class ContractError : public DiralgError {
 public:
  using DiralgError::DiralgError;
};

/// Newton on the rate equations hit a singular Jacobian.
class DegenerateDynamicsError : public DiralgError {
 public:
  DegenerateDynamicsError(const std::string& what, Vector singular_values)
      : DiralgError(what), singular_values_(std::move(singular_values)) {}
  const Vector& singular_values() const { return singular_values_; }

 private:
  Vector singular_values_;
};

/// Inverse Legendre map could not be computed.
class HyperregularityError : public DiralgError {
 public:
  HyperregularityError(const std::string& what, Vector x, Vector xi)
      : DiralgError(what), x_(std::move(x)), xi_(std::move(xi)) {}
  const Vector& x() const { return x_; }
  const Vector& xi() const { return xi_; }

 private:
  Vector x_;
  Vector xi_;
};

/// Gauss-Newton projection onto the algebraic channel did not converge.
class InitializationError : public DiralgError {
 public:
  using DiralgError::DiralgError;
};

}  // namespace diralg
