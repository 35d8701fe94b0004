#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "opalg/scalar.hpp"

namespace opalg {

/// A subset of {1..n} (1-based, ascending) and |sum_{j in F} a_j|.
struct SubsetSum {
  std::vector<std::size_t> subset;
  double value = 0.0;
};

/// Maximizes |sum_{j in F} a_j| over subsets F by sweeping half-planes:
/// the optimum is {j : Re(a_j e^{-i theta}) > 0} for some theta strictly
/// inside an arc between consecutive critical angles arg(a_j) +- pi/2, so
/// one midpoint per arc suffices (at most 2n candidates).
/// Throws ArgumentError on empty input; all-zero input gives {1} with value 0.
SubsetSum best_subset_sum(std::span<const cplx> a);

/// Exhaustive 2^n oracle, n <= 24. Ties go to the smallest bitmask.
SubsetSum brute_force_subset_sum_serial(std::span<const cplx> a);
SubsetSum brute_force_subset_sum_parallel(std::span<const cplx> a);

/// |sum_{j in F} a_j| for a 1-based subset.
double subset_sum_modulus(std::span<const cplx> a, std::span<const std::size_t> subset);

double l1_norm(std::span<const cplx> a);
double linf_norm(std::span<const cplx> a);

}  // namespace opalg
