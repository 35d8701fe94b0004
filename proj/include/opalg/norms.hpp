#pragma once

#include <vector>

#include "opalg/matrix.hpp"

namespace opalg {

// Singular values by one-sided (Hestenes) Jacobi on the columns of the
// matrix, or of its adjoint when it is wide. Returned in descending order.
// Exact matrices are converted to floating point first.
//
// The serial kernel sweeps pairs in cyclic-by-row order. The parallel kernel
// uses a round-robin tournament so each round rotates disjoint column pairs;
// it is deterministic regardless of thread count.
std::vector<double> singular_values_serial(const Matrix& m);
std::vector<double> singular_values_parallel(const Matrix& m);
/// Dispatches to the parallel kernel for matrices with at least 64 columns.
std::vector<double> singular_values(const Matrix& m);

/// Largest singular value. Throws DimensionError on an empty matrix.
double op_norm(const Matrix& m);
/// Sum of singular values (unnormalized trace norm).
double schatten1_norm(const Matrix& m);

/// m*m == m, exactly (tol exact) or within max-entry distance tol.abs_tol().
bool is_idempotent(const Matrix& m, const Tolerance& tol);

/// Equality under a tolerance: exact comparison in exact mode.
bool equal_within(const Matrix& a, const Matrix& b, const Tolerance& tol);

/// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const Matrix& m, double rel_tol = 1e-10);

}  // namespace opalg
