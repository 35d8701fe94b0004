#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "opalg/matrix.hpp"
#include "opalg/subset_sum.hpp"

namespace opalg {

/// Rank-one idempotents E_n = y_n x_n^* on l2({alpha, omega, 1..n_max}) with
/// x_n = e_omega + e_alpha + e_n and y_n = e_omega - e_alpha + e_n.
/// Ambient coordinate order: alpha = 0, omega = 1, n -> n + 1.
class RankOneFamily {
 public:
  static constexpr std::size_t kAlpha = 0;
  static constexpr std::size_t kOmega = 1;

  explicit RankOneFamily(std::size_t n_max);

  std::size_t n_max() const { return n_max_; }
  std::size_t ambient_dim() const { return n_max_ + 2; }
  /// x_n and y_n as exact column vectors (ambient_dim x 1).
  Matrix x(std::size_t n) const;
  Matrix y(std::size_t n) const;
  /// E_n on the full ambient space. Throws ArgumentError unless 1 <= n <= n_max.
  Matrix build_E(std::size_t n) const;

 private:
  void check(std::size_t n) const;
  std::size_t n_max_;
};

struct EFamilyReport {
  double max_norm_deviation = 0.0;  // max_n | ||E_n|| - 3 |
  bool norms_equal_three = false;
  bool idempotent = false;          // E_n^2 == E_n exactly
  bool pairwise_orthogonal = false; // E_j E_k == 0 exactly, j != k
  bool range_contained = false;     // ran E_n, ran E_n^* inside span(e_alpha, e_omega, e_n)
  std::size_t witness_trials = 0;
  bool omega_witness = false;       // <(sum a_j E_j) e_omega, e_omega> == sum a_j exactly
  bool norm_dominates_sum = false;  // |sum a_j| <= ||sum a_j E_j|| on every trial
  bool pass = false;
};

/// Checks the rank-one family properties; the omega-witness runs on
/// `trials` seeded Gaussian-rational coefficient vectors.
EFamilyReport certify_E_family(const RankOneFamily& fam, std::size_t trials, std::uint64_t seed,
                               double tol = 1e-9);

using Subset = std::vector<std::size_t>;

/// Finite nonempty subsets of {1..n_max} in canonical order (size, then
/// lexicographic), at most f_cap of them, each of size <= s_max.
class SubsetFamily {
 public:
  SubsetFamily() = default;
  static SubsetFamily canonical(std::size_t n_max, std::size_t f_cap, std::size_t s_max);
  static SubsetFamily from_list(std::vector<Subset> subsets);

  /// Adds `f` unless already present (kept sorted in canonical order).
  void augment(Subset f);

  std::size_t size() const { return subsets_.size(); }
  const std::vector<Subset>& subsets() const { return subsets_; }
  const Subset& operator[](std::size_t k) const { return subsets_[k]; }
  bool contains(const Subset& f) const;

 private:
  std::vector<Subset> subsets_;
};

/// Canonical order: by cardinality, then lexicographic.
bool canonical_less(const Subset& a, const Subset& b);

/// phi(a) restricted to the enumerated blocks M_{F u {alpha, omega}}.
/// Block coordinates: alpha, omega, then F ascending.
struct EmbeddedElement {
  std::vector<QComplex> exact_coeffs;  // set when the coefficients are rational
  std::vector<cplx> coeffs;
  SubsetFamily family;
  std::vector<Matrix> blocks;  // aligned with family

  bool is_exact() const { return !exact_coeffs.empty() || coeffs.empty(); }
};

/// Block for one subset, assembled from the coefficients.
Matrix phi_block(std::span<const QComplex> a, const Subset& f);
Matrix phi_block(std::span<const cplx> a, const Subset& f);

/// Assembles every block. Coefficients beyond the largest index in any
/// subset are allowed; indices in subsets must lie within the coefficient range.
EmbeddedElement phi(std::span<const QComplex> a, const SubsetFamily& subsets);
EmbeddedElement phi(std::span<const cplx> a, const SubsetFamily& subsets);

/// Blockwise product phi(a) phi(b).
std::vector<Matrix> block_product(const EmbeddedElement& x, const EmbeddedElement& y);

/// sup over enumerated F of ||phi(a)_F||.
double phi_sup_norm(const EmbeddedElement& e);
double phi_sup_norm_serial(const EmbeddedElement& e);

enum class TraceScheme { geometric, uniform };

struct TraceWeights {
  std::vector<double> lambdas;  // aligned with the subset family, summing to 1
};

/// geometric: lambda_k = 2^-k / (1 - 2^-|S|) in canonical order; uniform: 1/|S|.
TraceWeights make_trace(const SubsetFamily& subsets, TraceScheme scheme);

/// sum_F lambda_F / (|F| + 2) * S_1(phi(a)_F). Throws ArgumentError on misalignment.
double l1_trace_norm(const EmbeddedElement& e, const TraceWeights& w);

struct EmbeddingTrial {
  std::size_t trial = 0;
  double l1 = 0.0;
  double linf = 0.0;
  double sup_norm = 0.0;
  double ratio = 0.0;  // sup_norm / l1
  double witness_ratio = 0.0;  // best |sum_F a_j| / l1
  double trace_geometric = 0.0;
  double trace_uniform = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  bool trace_ok = false;
  bool trace_below_sup = false;
};

struct EmbeddingReport {
  std::vector<EmbeddingTrial> trials;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double max_trace_ratio = 0.0;  // max trace norm / ||a||_inf over both schemes
  bool pass = false;
};

/// Seeded complex coefficient vector, real and imaginary parts uniform on [-1, 1].
std::vector<cplx> sample_coefficients(std::size_t n, std::uint64_t seed, std::uint64_t index);
/// Seeded Gaussian-rational vector with parts k/den, |k| <= den.
std::vector<QComplex> sample_rational_coefficients(std::size_t n, std::uint64_t seed, std::uint64_t index,
                                                   long den = 8);

/// For every trial: (1/pi)||a||_1 <= ||phi(a)|| <= 3||a||_1, the trace norm
/// under both schemes <= 3||a||_inf, and trace norm <= sup norm. The canonical
/// family is augmented with the sweep-optimal subset of each trial.
EmbeddingReport certify_embedding_bounds(std::size_t n_max, std::size_t f_cap, std::size_t s_max, std::size_t trials,
                                         std::uint64_t seed);
EmbeddingReport certify_embedding_bounds_serial(std::size_t n_max, std::size_t f_cap, std::size_t s_max,
                                                std::size_t trials, std::uint64_t seed);

/// Same checks for one given coefficient vector (trial index 0).
EmbeddingTrial certify_embedding_trial(std::span<const cplx> a, std::size_t f_cap, std::size_t s_max);

}  // namespace opalg
