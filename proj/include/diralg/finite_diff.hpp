#pragma once

#include "diralg/types.hpp"

#include <functional>

namespace diralg {

/// Step family for central differences.
///
/// `first` is the default h = 1e-6 * max(1, |x_i|). `second` is the larger
/// h = 1e-4 * max(1, |x_i|) used when the differentiated quantity itself
/// contains a finite difference (nested differences).
enum class FdStep { first, second };

double fd_step(double coordinate, FdStep kind = FdStep::first);

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;

Vector fd_gradient(const ScalarField& f, const Vector& x, FdStep kind = FdStep::first);

/// Jacobian (rows = outputs, cols = inputs) by central differences.
Matrix fd_jacobian(const VectorField& f, const Vector& x, FdStep kind = FdStep::first);

/// Relative agreement used when validating user-supplied partials:
/// |a - b| <= tol * max(1, |a|) entrywise.
bool partials_agree(const Matrix& analytic, const Matrix& numeric, double tol);

}  // namespace diralg
