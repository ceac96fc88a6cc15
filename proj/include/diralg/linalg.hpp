#pragma once

#include "diralg/types.hpp"

namespace diralg {

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTolerance = 1e-9;

/// Numeric rank: number of singular values above `rel_tol * sigma_max`.
int numeric_rank(const Matrix& a, double rel_tol = kRankTolerance);

/// Orthonormal basis (columns) of ker(a). A matrix with zero rows has the whole
/// space as kernel.
Matrix null_space(const Matrix& a, double rel_tol = kRankTolerance);

/// Orthonormal basis of the column span of `cols`.
Matrix orthonormal_columns(const Matrix& cols, double rel_tol = kRankTolerance);

/// Orthonormal basis of the annihilator of span(cols) under the Euclidean
/// pairing, i.e. ker(cols^T).
Matrix annihilator(const Matrix& cols, double rel_tol = kRankTolerance);

/// Principal angles between span(a) and span(b), ascending.
///
/// Small angles come from the sine formula so that angles near zero are
/// resolved to roundoff rather than sqrt(roundoff). Both inputs are
/// re-orthonormalized; if the dimensions differ, the missing angles are pi/2.
Vector principal_angles(const Matrix& a, const Matrix& b);

/// Largest principal angle; pi/2 when the dimensions differ.
double max_principal_angle(const Matrix& a, const Matrix& b);

/// Singular values, descending.
Vector singular_values(const Matrix& a);

bool all_finite(const Matrix& a);

}  // namespace diralg
