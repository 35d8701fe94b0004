#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opalg/chain.hpp"
#include "opalg/matrix.hpp"

namespace opalg {

struct TensorTerm {
  Matrix left;
  Matrix right;
};

/// Formal sum of elementary tensors u_i (x) v_i of d x d matrices.
class TensorElem {
 public:
  explicit TensorElem(std::size_t dim) : dim_(dim) {}
  TensorElem(std::size_t dim, std::vector<TensorTerm> terms);

  std::size_t dim() const { return dim_; }
  const std::vector<TensorTerm>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  void add(Matrix left, Matrix right);
  TensorElem& operator+=(const TensorElem& o);
  TensorElem& operator-=(const TensorElem& o);
  TensorElem& operator*=(const QComplex& s);  // scales the left legs

  friend TensorElem operator+(TensorElem a, const TensorElem& b) { return a += b; }
  friend TensorElem operator-(TensorElem a, const TensorElem& b) { return a -= b; }
  friend TensorElem operator*(const QComplex& s, TensorElem a) { return a *= s; }

  /// a . t: multiplies every first leg on the left.
  TensorElem left_action(const Matrix& a) const;
  /// t . a: multiplies every second leg on the right.
  TensorElem right_action(const Matrix& a) const;

 private:
  void check(const Matrix& m) const;

  std::size_t dim_;
  std::vector<TensorTerm> terms_;
};

/// Delta_n = e_1 (x) e_1 + sum_{j=2}^n (e_j - e_{j-1}) (x) (e_j - e_{j-1}).
TensorElem build_delta(const Chain& c, std::size_t n);

/// Linearized multiplication: sum u_i v_i.
Matrix pi_map(const TensorElem& t);

/// a.t - t.a with 2 * terms(t) terms.
TensorElem bimodule_commutator(const Matrix& a, const TensorElem& t);

/// sum Kron(u_i, v_i), a faithful d^2 x d^2 representation.
Matrix flatten(const TensorElem& t);

/// Merges terms with proportional first legs, then proportional second legs,
/// one pass each, and drops terms with a zero leg. Represents the same element.
TensorElem regroup(const TensorElem& t, double float_tol = 1e-12);

struct NormBounds {
  double lower = 0.0;  // ||flatten(t)||_op: the flattening is contractive for the projective norm
  double upper = 0.0;  // sum ||u_i|| ||v_i|| over the regrouped representation
};

/// Two-sided projective tensor norm bounds. An exactly zero flattening
/// certifies the zero element, so both bounds are then 0.
NormBounds tensor_norm_bounds(const TensorElem& t);

/// M = 2 Delta - u.Delta + (one - u) (x) (one - u). Requires u == pi_map(delta)
/// (PreconditionError otherwise); verifies pi(M) == one.
TensorElem unitize_diagonal(const TensorElem& delta, const Matrix& u, const Matrix& one);

/// Element a + lambda * I of the unitized chain algebra, a in span{e_n}.
struct SampleElement {
  std::string label;
  Matrix a;
  QComplex lambda{};
};

struct MbadRecord {
  std::string a_label;
  bool in_span = false;
  double a_norm = 0.0;
  double approx_identity_residual = 0.0;  // ||a pi(Delta_N) - a|| at the last diagonal
  std::size_t eventual_index = 0;          // first n after which a pi(Delta_n) == a holds for every later n (0: never)
  double commutator_upper = 0.0;          // sup_n upper bound of ||a.Delta_n - Delta_n.a||
  double commutator_lower = 0.0;          // sup_n lower bound
  double unitized_lower = 0.0;            // sup_n lower bound of ||x.M_n - M_n.x||, x = a + lambda I
  double unitized_upper = 0.0;
  double unitized_step_bound = 0.0;       // sup_n of (2+K)||a.D-D.a||_up + 2(1+K)||a - a u_n||
  double unitized_uniform_bound = 0.0;    // ((2+K)C + 2(1+K)^2) ||x||
  double C = 0.0;
  double K = 0.0;
  bool cond_identity = false;
  bool cond_commutator = false;
  bool cond_multiplier = false;
  bool pass = false;
};

struct MbadReport {
  std::vector<MbadRecord> records;
  double C = 0.0;  // max_a sup_n commutator_upper / ||a||
  double K = 0.0;  // max_n ||pi(Delta_n)||
  bool verdict = false;
};

/// Certifies the multiplier-bounded approximate diagonal conditions for the
/// sequence `deltas` on `sample`, plus the unitized estimates. Elements outside
/// the span of the chain idempotents are flagged, not fatal.
MbadReport certify_mbad(const std::vector<TensorElem>& deltas, const Chain& c,
                        const std::vector<SampleElement>& sample);

// Finite-dimensional expectation built from an exact diagonal.

struct FiniteDiagonal {
  TensorElem diag;
  std::vector<Matrix> algebra_basis;
};

struct DiagonalCheck {
  bool pi_is_identity_on_algebra = false;
  bool commutes_with_algebra = false;
};

/// pi(diag) a = a = a pi(diag) and a.diag = diag.a for every basis element.
DiagonalCheck check_diagonal(const FiniteDiagonal& d, const Tolerance& tol = Tolerance::exact());

/// E(x) = sum u_i x v_i.
Matrix expectation_from_diagonal(const FiniteDiagonal& d, const Matrix& x);

struct ExpectationReport {
  bool into_commutant = false;   // E(x) commutes with the algebra
  bool fixes_commutant = false;  // E(u) = u for commutant u
  bool bimodule = false;         // E(u x v) = u E(x) v for commutant u, v
  bool pass = false;
};

ExpectationReport certify_expectation(const FiniteDiagonal& d, const std::vector<Matrix>& xs,
                                      const std::vector<Matrix>& commutant_sample,
                                      const Tolerance& tol = Tolerance::exact());

/// Diagonal sum_i e_{i1} (x) e_{1i} of the full matrix algebra M_n.
FiniteDiagonal matrix_algebra_diagonal(std::size_t n);

/// Algebra span{I, e} with e = [[1, t], [0, 0]] and diagonal e(x)e + (I-e)(x)(I-e).
FiniteDiagonal skew_idempotent_diagonal(const QComplex& t);

/// The six expressions E(p), E(ep), eE(p), E(p)e, E(pe), E(e) for an idempotent e
/// in the centre-commutant and the range projection p.
std::vector<Matrix> expectation_chain(const FiniteDiagonal& d, const Matrix& e, const Matrix& p);

}  // namespace opalg
