#pragma once

#include <span>
#include <vector>

#include "opalg/chain.hpp"
#include "opalg/matrix.hpp"

namespace opalg {

/// Strictly decreasing, strictly positive rational weights lambda_1 > lambda_2 > ...
class WeightSeq {
 public:
  /// Throws PreconditionError unless strictly positive and strictly decreasing.
  explicit WeightSeq(std::vector<mpq_class> lambdas);

  std::size_t size() const { return lambdas_.size(); }
  const mpq_class& operator[](std::size_t j) const { return lambdas_[j]; }
  const std::vector<mpq_class>& values() const { return lambdas_; }
  WeightSeq scaled(const mpq_class& factor) const;

 private:
  std::vector<mpq_class> lambdas_;
};

/// Pairwise-orthogonal idempotents spanning the same algebra as the chain:
/// f_1 = e_1, f_j = e_j - e_{j-1}. The chain itself is nested, not orthogonal.
std::vector<Matrix> orthogonal_atoms(const Chain& c);

/// lambda_j = 4^-j / (1 + ceil(max_{i<=j} ||f_i||)). Rational, strictly
/// decreasing, and sum_j lambda_j ||f_j|| <= sum_j 4^-j.
WeightSeq default_weights(std::span<const Matrix> family);

/// lambda_j = ratio^j for a rational 0 < ratio < 1.
WeightSeq geometric_weights(std::size_t count, const mpq_class& ratio);

/// b = sum_j lambda_j f_j. Throws ArgumentError on a length mismatch.
Matrix single_generator(std::span<const Matrix> family, const WeightSeq& w);

struct ResidualRecord {
  std::size_t m = 0;
  unsigned r = 0;
  double residual = 0.0;
  double bound = 0.0;
  bool passed = false;
};

struct RecoveryVerdict {
  std::size_t m = 0;
  bool within_bound = false;
  bool monotone_tail = false;
  bool exact_recovery = false;  // residual identically zero (the last idempotent)
  bool passed = false;
};

struct GenerationCertificate {
  std::vector<ResidualRecord> records;  // ordered by (m, r)
  std::vector<RecoveryVerdict> verdicts;
  bool passed = false;
};

/// For each m forms b_m = b - sum_{j<m} lambda_j f_j and measures
/// ||f_m - (b_m / lambda_m)^r|| for r = 1..r_max against
/// (1/lambda_m) (lambda_{m+1}/lambda_m)^{r-1} sum_{j>m} lambda_j ||f_j||.
/// The family must be pairwise orthogonal; powers are exact when it is.
GenerationCertificate certify_generation(std::span<const Matrix> family, const WeightSeq& w, unsigned r_max,
                                         const Tolerance& tol = Tolerance::approx(1e-9));
GenerationCertificate certify_generation_serial(std::span<const Matrix> family, const WeightSeq& w, unsigned r_max,
                                                const Tolerance& tol = Tolerance::approx(1e-9));

/// The (b_m / lambda_m)^r matrices for one m, r = 1..r_max (for span checks).
std::vector<Matrix> recovery_powers(std::span<const Matrix> family, const WeightSeq& w, std::size_t m,
                                    unsigned r_max);

}  // namespace opalg
