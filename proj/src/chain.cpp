#include "opalg/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opalg/errors.hpp"
#include "opalg/norms.hpp"

namespace opalg {

ChainSpec ChainSpec::linear(std::size_t m_max) {
  std::vector<QComplex> b;
  for (std::size_t k = 1; k <= m_max / 2; ++k) b.emplace_back(static_cast<long>(k));
  return scalar(m_max, std::move(b));
}

ChainSpec ChainSpec::scalar(std::size_t m_max, std::vector<QComplex> couplings) {
  ChainSpec spec;
  spec.m_max = m_max;
  for (auto& b : couplings) spec.couplings.emplace_back(1, 1, std::vector<QComplex>{std::move(b)});
  return spec;
}

std::size_t ChainSpec::required_index() const {
  // smallest odd index >= m_max + 1
  return m_max % 2 == 0 ? m_max + 1 : m_max + 2;
}

std::size_t ChainSpec::dim(std::size_t n) const {
  if (n == 0) return 0;
  if (dims.empty()) return n;
  if (n > dims.size())
    throw TruncationError("dims lists " + std::to_string(dims.size()) + " subspaces but H_" + std::to_string(n) +
                              " is required",
                          n);
  return dims[n - 1];
}

std::size_t ChainSpec::required_dimension() const { return dim(required_index()); }

const Matrix& Chain::e(std::size_t n) const {
  if (n == 0 || n > idempotents_.size())
    throw ArgumentError("idempotent index " + std::to_string(n) + " outside 1.." + std::to_string(idempotents_.size()));
  return idempotents_[n - 1];
}

bool Chain::is_exact() const {
  return std::all_of(idempotents_.begin(), idempotents_.end(), [](const Matrix& m) { return m.is_exact(); });
}

void validate_chain_spec(const ChainSpec& spec) {
  if (spec.m_max == 0) throw ArgumentError("m_max must be positive");
  if (!spec.dims.empty()) {
    if (spec.dims.front() == 0) throw ArgumentError("dims must be positive (H_1 is non-zero)");
    for (std::size_t k = 1; k < spec.dims.size(); ++k)
      if (spec.dims[k] <= spec.dims[k - 1]) throw ArgumentError("dims must be strictly increasing");
  }
  if (spec.couplings.size() < spec.coupling_count())
    throw ArgumentError("need " + std::to_string(spec.coupling_count()) + " couplings for m_max=" +
                        std::to_string(spec.m_max) + ", got " + std::to_string(spec.couplings.size()));
  double previous = 0.0;
  for (std::size_t k = 0; k < spec.coupling_count(); ++k) {
    const Matrix& b = spec.couplings[k];
    if (b.empty()) throw ArgumentError("empty coupling b_" + std::to_string(2 * (k + 1)));
    const double norm = op_norm(b);
    if (norm + 1e-12 * std::max(1.0, previous) < previous)
      throw ArgumentError("coupling norms must be nondecreasing; |b_" + std::to_string(2 * (k + 1)) + "| < |b_" +
                          std::to_string(2 * k) + "|");
    previous = norm;
  }
}

namespace {

Matrix expand_coupling(const Matrix& b, std::size_t rows, std::size_t cols, std::size_t k) {
  if (b.rows() == rows && b.cols() == cols) return b;
  if (b.rows() == 1 && b.cols() == 1) {
    Matrix out(rows, cols, b.backend());
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) out.set_block(i, i, b);
    return out;
  }
  throw ArgumentError("coupling b_" + std::to_string(2 * k) + " is " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ", gaps require " + std::to_string(rows) + "x" +
                      std::to_string(cols));
}

Matrix projection(std::size_t n, std::size_t rank) {
  Matrix p(n, n);
  for (std::size_t i = 0; i < rank; ++i) p.set(i, i, QComplex(1));
  return p;
}

}  // namespace

Matrix Chain::coupling_block(std::size_t k) const {
  const std::size_t d_lo = spec_.dim(2 * k - 1), d_mid = spec_.dim(2 * k), d_hi = spec_.dim(2 * k + 1);
  return expand_coupling(spec_.couplings.at(k - 1), d_mid - d_lo, d_hi - d_mid, k);
}

Chain build_chain(const ChainSpec& spec) {
  validate_chain_spec(spec);
  const std::size_t required = spec.required_dimension();
  const std::size_t n = spec.truncation_dim.value_or(required);
  if (n < required)
    throw TruncationError("truncation dimension " + std::to_string(n) + " cannot hold H_" +
                              std::to_string(spec.required_index()) + "; requires dimension " +
                              std::to_string(required),
                          required);

  std::vector<Matrix> es;
  es.reserve(spec.m_max);
  for (std::size_t idx = 1; idx <= spec.m_max; ++idx) {
    if (idx % 2 == 1) {
      es.push_back(projection(n, spec.dim(idx)));
      continue;
    }
    const std::size_t k = idx / 2;
    const std::size_t d_lo = spec.dim(2 * k - 1), d_mid = spec.dim(2 * k), d_hi = spec.dim(2 * k + 1);
    const Matrix b = expand_coupling(spec.couplings[k - 1], d_mid - d_lo, d_hi - d_mid, k);
    Matrix e = projection(n, d_mid);
    if (!b.is_exact()) e = e.to_float();
    // b maps H_{2k+1} - H_{2k} into H_{2k} - H_{2k-1}
    e.set_block(d_lo, d_mid, b);
    es.push_back(std::move(e));
  }
  return Chain(spec, std::move(es), n);
}

namespace {

bool pair_holds(const Chain& c, std::size_t m, std::size_t n, const Tolerance& tol) {
  const Matrix product = c.e(m) * c.e(n);
  return equal_within(product, c.e(std::min(m, n)), tol);
}

SemilatticeReport finish(const Chain& c, std::vector<char> ok, bool exact) {
  SemilatticeReport r;
  const std::size_t m = c.m_max();
  r.pairs_checked = m * m;
  r.approximate = !exact;
  for (std::size_t k = 0; k < ok.size(); ++k)
    if (!ok[k]) r.failures.emplace_back(k / m + 1, k % m + 1);
  r.all_pass = r.failures.empty();
  r.all_exact = exact && r.all_pass;
  return r;
}

}  // namespace

SemilatticeReport verify_semilattice_serial(const Chain& c, const Tolerance& float_tol) {
  const bool exact = c.is_exact();
  const Tolerance tol = exact ? Tolerance::exact() : float_tol;
  const std::size_t m = c.m_max();
  std::vector<char> ok(m * m, 0);
  for (std::size_t k = 0; k < m * m; ++k) ok[k] = pair_holds(c, k / m + 1, k % m + 1, tol) ? 1 : 0;
  return finish(c, std::move(ok), exact);
}

SemilatticeReport verify_semilattice(const Chain& c, const Tolerance& float_tol) {
  const bool exact = c.is_exact();
  const Tolerance tol = exact ? Tolerance::exact() : float_tol;
  const std::size_t m = c.m_max();
  std::vector<char> ok(m * m, 0);
  const auto total = static_cast<std::ptrdiff_t>(m * m);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const auto u = static_cast<std::size_t>(k);
    ok[u] = pair_holds(c, u / m + 1, u % m + 1, tol) ? 1 : 0;
  }
  return finish(c, std::move(ok), exact);
}

NormProfile norm_profile(const Chain& c, double tol) {
  NormProfile profile;
  profile.all_pass = true;
  for (std::size_t n = 1; n <= c.m_max(); ++n) {
    NormEntry entry;
    entry.index = n;
    entry.norm = op_norm(c.e(n));
    if (n % 2 == 1) {
      entry.bound = 1.0;
      entry.pass = std::abs(entry.norm - 1.0) <= tol;
    } else {
      entry.bound = op_norm(c.coupling_block(n / 2));
      entry.pass = entry.norm >= entry.bound - tol;
    }
    profile.all_pass = profile.all_pass && entry.pass;
    profile.entries.push_back(entry);
  }
  return profile;
}

}  // namespace opalg
