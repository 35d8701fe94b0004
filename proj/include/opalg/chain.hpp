#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "opalg/matrix.hpp"

namespace opalg {

/// Ladder of subspaces H_1 < H_2 < ... (by dimension) and the couplings
/// b_2, b_4, ... that tilt every even-indexed projection into an idempotent.
///
/// coupling k-1 holds b_{2k}: a (dim H_{2k} - dim H_{2k-1}) x (dim H_{2k+1} - dim H_{2k})
/// block. A 1x1 coupling paired with larger gaps means that scalar times the
/// rectangular identity.
struct ChainSpec {
  std::size_t m_max = 0;
  std::vector<std::size_t> dims;  // empty: dims(k) = k
  std::vector<Matrix> couplings;
  std::optional<std::size_t> truncation_dim;  // empty: the minimal admissible size

  /// b_{2k} = k for k = 1..floor(m_max/2), dims(k) = k.
  static ChainSpec linear(std::size_t m_max);
  /// Scalar couplings b_2, b_4, ... given explicitly.
  static ChainSpec scalar(std::size_t m_max, std::vector<QComplex> couplings);

  /// Index 2K+1 of the outermost subspace needed for e_1..e_{m_max}.
  std::size_t required_index() const;
  /// Dimension of H_n (1-based), honoring the dims(k) = k default.
  std::size_t dim(std::size_t n) const;
  /// dim H_{required_index()}.
  std::size_t required_dimension() const;
  std::size_t coupling_count() const { return m_max / 2; }
};

/// The realized idempotents e_1..e_{m_max} on the truncated space.
class Chain {
 public:
  explicit Chain(ChainSpec spec, std::vector<Matrix> idempotents, std::size_t truncation_dim)
      : spec_(std::move(spec)), idempotents_(std::move(idempotents)), truncation_dim_(truncation_dim) {}

  const ChainSpec& spec() const { return spec_; }
  std::size_t m_max() const { return idempotents_.size(); }
  std::size_t truncation_dim() const { return truncation_dim_; }
  const std::vector<Matrix>& idempotents() const { return idempotents_; }
  /// e_n, 1-based.
  const Matrix& e(std::size_t n) const;
  bool is_exact() const;
  /// Coupling block b_{2k} as placed in e_{2k} (after scalar expansion).
  Matrix coupling_block(std::size_t k) const;

 private:
  ChainSpec spec_;
  std::vector<Matrix> idempotents_;
  std::size_t truncation_dim_;
};

/// e_{2k-1} = p_{2k-1}, e_{2k} = p_{2k} + b_{2k}(p_{2k+1} - p_{2k}).
/// Throws TruncationError when the requested truncation cannot hold
/// H_{2K+1}, ArgumentError on malformed dims or couplings.
// Throws ArgumentError on bad dims, too few couplings or decreasing coupling norms.
void validate_chain_spec(const ChainSpec& spec);

Chain build_chain(const ChainSpec& spec);

struct SemilatticeReport {
  std::size_t pairs_checked = 0;
  bool all_exact = false;    // every e_m e_n equals e_min(m,n) entrywise, in exact arithmetic
  bool approximate = false;  // chain carried floating entries; checked within tolerance
  bool all_pass = false;
  std::vector<std::pair<std::size_t, std::size_t>> failures;
};

/// Checks e_m e_n = e_{min(m,n)} over every ordered pair.
SemilatticeReport verify_semilattice(const Chain& c, const Tolerance& float_tol = Tolerance::approx(1e-9));
SemilatticeReport verify_semilattice_serial(const Chain& c, const Tolerance& float_tol = Tolerance::approx(1e-9));

struct NormEntry {
  std::size_t index = 0;
  double norm = 0.0;
  double bound = 0.0;  // 1 for odd n (equality), |b_{2k}| for n = 2k (lower bound)
  bool pass = false;
};

struct NormProfile {
  std::vector<NormEntry> entries;
  bool all_pass = false;
};

/// Operator norm of every e_n with the odd/even checks applied.
NormProfile norm_profile(const Chain& c, double tol = 1e-9);

}  // namespace opalg
