#include "opalg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "opalg/errors.hpp"
#include "opalg/norms.hpp"
#include "opalg/rng.hpp"

namespace opalg {

RankOneFamily::RankOneFamily(std::size_t n_max) : n_max_(n_max) {
  if (n_max == 0) throw ArgumentError("rank-one family needs n_max >= 1");
}

void RankOneFamily::check(std::size_t n) const {
  if (n == 0 || n > n_max_)
    throw ArgumentError("idempotent index " + std::to_string(n) + " outside 1.." + std::to_string(n_max_));
}

Matrix RankOneFamily::x(std::size_t n) const {
  check(n);
  Matrix v(ambient_dim(), 1);
  v.set(kAlpha, 0, QComplex(1));
  v.set(kOmega, 0, QComplex(1));
  v.set(n + 1, 0, QComplex(1));
  return v;
}

Matrix RankOneFamily::y(std::size_t n) const {
  check(n);
  Matrix v(ambient_dim(), 1);
  v.set(kAlpha, 0, QComplex(-1));
  v.set(kOmega, 0, QComplex(1));
  v.set(n + 1, 0, QComplex(1));
  return v;
}

Matrix RankOneFamily::build_E(std::size_t n) const { return y(n) * x(n).adjoint(); }

EFamilyReport certify_E_family(const RankOneFamily& fam, std::size_t trials, std::uint64_t seed, double tol) {
  EFamilyReport r;
  const std::size_t n = fam.n_max();
  std::vector<Matrix> es;
  for (std::size_t j = 1; j <= n; ++j) es.push_back(fam.build_E(j));

  r.idempotent = true;
  r.range_contained = true;
  for (std::size_t j = 1; j <= n; ++j) {
    const Matrix& e = es[j - 1];
    r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(op_norm(e) - 3.0));
    r.idempotent = r.idempotent && e * e == e;
    for (std::size_t row = 0; row < e.rows(); ++row)
      for (std::size_t col = 0; col < e.cols(); ++col) {
        const bool row_in = row == RankOneFamily::kAlpha || row == RankOneFamily::kOmega || row == j + 1;
        const bool col_in = col == RankOneFamily::kAlpha || col == RankOneFamily::kOmega || col == j + 1;
        if (!(row_in && col_in) && !e.q(row, col).is_zero()) r.range_contained = false;
      }
  }
  r.norms_equal_three = r.max_norm_deviation <= tol;

  r.pairwise_orthogonal = true;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (j != k && !(es[j] * es[k]).is_zero()) r.pairwise_orthogonal = false;

  r.witness_trials = trials;
  r.omega_witness = true;
  r.norm_dominates_sum = true;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto a = sample_rational_coefficients(n, seed, t);
    Matrix s = Matrix::zeros(fam.ambient_dim(), fam.ambient_dim());
    QComplex total;
    for (std::size_t j = 0; j < n; ++j) {
      s += a[j] * es[j];
      total += a[j];
    }
    r.omega_witness = r.omega_witness && s.q(RankOneFamily::kOmega, RankOneFamily::kOmega) == total;
    const double modulus = std::abs(total.to_complex());
    if (modulus > 0.0 && modulus > op_norm(s) + tol) r.norm_dominates_sum = false;
  }
  r.pass = r.norms_equal_three && r.idempotent && r.pairwise_orthogonal && r.range_contained && r.omega_witness &&
           r.norm_dominates_sum;
  return r;
}

bool canonical_less(const Subset& a, const Subset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

SubsetFamily SubsetFamily::canonical(std::size_t n_max, std::size_t f_cap, std::size_t s_max) {
  SubsetFamily fam;
  const std::size_t top = std::min(s_max, n_max);
  for (std::size_t size = 1; size <= top && fam.subsets_.size() < f_cap; ++size) {
    // lexicographic k-combinations of 1..n_max
    Subset comb(size);
    for (std::size_t i = 0; i < size; ++i) comb[i] = i + 1;
    while (fam.subsets_.size() < f_cap) {
      fam.subsets_.push_back(comb);
      std::size_t i = size;
      while (i > 0 && comb[i - 1] == n_max - size + i) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t k = i; k < size; ++k) comb[k] = comb[k - 1] + 1;
    }
  }
  return fam;
}

SubsetFamily SubsetFamily::from_list(std::vector<Subset> subsets) {
  SubsetFamily fam;
  for (auto& f : subsets) fam.augment(std::move(f));
  return fam;
}

bool SubsetFamily::contains(const Subset& f) const {
  return std::binary_search(subsets_.begin(), subsets_.end(), f, canonical_less);
}

void SubsetFamily::augment(Subset f) {
  if (f.empty()) throw ArgumentError("subsets must be nonempty");
  std::sort(f.begin(), f.end());
  if (std::adjacent_find(f.begin(), f.end()) != f.end()) throw ArgumentError("subset has repeated indices");
  if (f.front() == 0) throw ArgumentError("subset indices are 1-based");
  auto pos = std::lower_bound(subsets_.begin(), subsets_.end(), f, canonical_less);
  if (pos != subsets_.end() && *pos == f) return;
  subsets_.insert(pos, std::move(f));
}

namespace {

std::size_t coefficient_index(std::size_t j, std::size_t count) {
  if (j == 0 || j > count) throw ArgumentError("subset index " + std::to_string(j) + " outside the coefficient range");
  return j - 1;
}

}  // namespace

// Block coordinates: alpha, omega, then F ascending. In them y_j = (-1, 1, .., 1 at j's slot, ..)
// and x_j = (1, 1, .., 1 at j's slot, ..), so a_j E_j touches rows alpha, omega and its slot.
Matrix phi_block(std::span<const QComplex> a, const Subset& f) {
  const std::size_t dim = f.size() + 2;
  Matrix block(dim, dim);
  std::vector<QComplex> row_alpha(dim), row_omega(dim);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const QComplex& c = a[coefficient_index(f[k], a.size())];
    if (c.is_zero()) continue;
    const std::size_t slot = k + 2;
    for (std::size_t col : {std::size_t{0}, std::size_t{1}, slot}) {
      row_alpha[col] -= c;
      row_omega[col] += c;
      block.set(slot, col, c);
    }
  }
  for (std::size_t col = 0; col < dim; ++col) {
    block.set(0, col, row_alpha[col]);
    block.set(1, col, row_omega[col]);
  }
  return block;
}

Matrix phi_block(std::span<const cplx> a, const Subset& f) {
  const std::size_t dim = f.size() + 2;
  std::vector<cplx> entries(dim * dim);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const cplx c = a[coefficient_index(f[k], a.size())];
    const std::size_t slot = k + 2;
    for (std::size_t col : {std::size_t{0}, std::size_t{1}, slot}) {
      entries[col] -= c;
      entries[dim + col] += c;
      entries[slot * dim + col] += c;
    }
  }
  return Matrix(dim, dim, std::move(entries));
}

EmbeddedElement phi(std::span<const QComplex> a, const SubsetFamily& subsets) {
  EmbeddedElement e;
  e.exact_coeffs.assign(a.begin(), a.end());
  for (const auto& q : a) e.coeffs.push_back(q.to_complex());
  e.family = subsets;
  e.blocks.reserve(subsets.size());
  for (const auto& f : subsets.subsets()) e.blocks.push_back(phi_block(a, f));
  return e;
}

EmbeddedElement phi(std::span<const cplx> a, const SubsetFamily& subsets) {
  EmbeddedElement e;
  e.coeffs.assign(a.begin(), a.end());
  e.family = subsets;
  for (const auto& f : subsets.subsets())
    for (std::size_t j : f) coefficient_index(j, a.size());
  e.blocks.resize(subsets.size());
  const auto count = static_cast<std::ptrdiff_t>(subsets.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k)
    e.blocks[static_cast<std::size_t>(k)] = phi_block(a, subsets[static_cast<std::size_t>(k)]);
  return e;
}

std::vector<Matrix> block_product(const EmbeddedElement& x, const EmbeddedElement& y) {
  if (x.family.subsets() != y.family.subsets()) throw ArgumentError("embedded elements over different subset families");
  std::vector<Matrix> out;
  out.reserve(x.blocks.size());
  for (std::size_t k = 0; k < x.blocks.size(); ++k) out.push_back(x.blocks[k] * y.blocks[k]);
  return out;
}

double phi_sup_norm_serial(const EmbeddedElement& e) {
  double best = 0.0;
  for (const auto& b : e.blocks) best = std::max(best, b.is_zero() ? 0.0 : op_norm(b));
  return best;
}

double phi_sup_norm(const EmbeddedElement& e) {
  std::vector<double> norms(e.blocks.size(), 0.0);
  const auto count = static_cast<std::ptrdiff_t>(e.blocks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const Matrix& b = e.blocks[static_cast<std::size_t>(k)];
    norms[static_cast<std::size_t>(k)] = b.is_zero() ? 0.0 : op_norm(b);
  }
  return norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
}

TraceWeights make_trace(const SubsetFamily& subsets, TraceScheme scheme) {
  if (subsets.size() == 0) throw ArgumentError("trace weights over an empty subset family");
  TraceWeights w;
  const std::size_t n = subsets.size();
  if (scheme == TraceScheme::uniform) {
    w.lambdas.assign(n, 1.0 / static_cast<double>(n));
    return w;
  }
  const double norm = 1.0 - std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n, 2000)));
  for (std::size_t k = 1; k <= n; ++k) w.lambdas.push_back(std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 2000))) / norm);
  return w;
}

double l1_trace_norm(const EmbeddedElement& e, const TraceWeights& w) {
  if (w.lambdas.size() != e.blocks.size())
    throw ArgumentError("trace weights (" + std::to_string(w.lambdas.size()) + ") do not align with " +
                        std::to_string(e.blocks.size()) + " blocks");
  double total = 0.0;
  for (std::size_t k = 0; k < e.blocks.size(); ++k) {
    const Matrix& b = e.blocks[k];
    if (b.is_zero()) continue;
    total += w.lambdas[k] / static_cast<double>(e.family[k].size() + 2) * schatten1_norm(b);
  }
  return total;
}

std::vector<cplx> sample_coefficients(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  auto gen = trial_engine(seed, index);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<cplx> a(n);
  for (auto& z : a) {
    const double re = unit(gen);
    const double im = unit(gen);
    z = {re, im};
  }
  return a;
}

std::vector<QComplex> sample_rational_coefficients(std::size_t n, std::uint64_t seed, std::uint64_t index, long den) {
  auto gen = trial_engine(seed, index);
  std::uniform_int_distribution<long> numer(-den, den);
  std::vector<QComplex> a;
  a.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long re = numer(gen);
    const long im = numer(gen);
    a.emplace_back(mpq_class(re, den), mpq_class(im, den));
    a.back().re.canonicalize();
    a.back().im.canonicalize();
  }
  return a;
}

namespace {

EmbeddingTrial run_trial(std::span<const cplx> a, std::size_t f_cap, std::size_t s_max, std::size_t index,
                         bool parallel_blocks) {
  constexpr double rel = 1e-12;
  EmbeddingTrial t;
  t.trial = index;
  t.l1 = l1_norm(a);
  t.linf = linf_norm(a);
  SubsetFamily fam = SubsetFamily::canonical(a.size(), f_cap, s_max);
  if (t.l1 > 0.0) {
    const SubsetSum best = best_subset_sum(a);
    fam.augment(best.subset);
    t.witness_ratio = best.value / t.l1;
  }
  const EmbeddedElement e = phi(a, fam);
  t.sup_norm = parallel_blocks ? phi_sup_norm(e) : phi_sup_norm_serial(e);
  t.ratio = t.l1 > 0.0 ? t.sup_norm / t.l1 : 0.0;
  t.trace_geometric = l1_trace_norm(e, make_trace(fam, TraceScheme::geometric));
  t.trace_uniform = l1_trace_norm(e, make_trace(fam, TraceScheme::uniform));
  t.lower_ok = t.sup_norm >= t.l1 / std::numbers::pi * (1.0 - rel);
  t.upper_ok = t.sup_norm <= 3.0 * t.l1 * (1.0 + rel);
  const double trace_max = std::max(t.trace_geometric, t.trace_uniform);
  t.trace_ok = trace_max <= 3.0 * t.linf * (1.0 + rel);
  t.trace_below_sup = trace_max <= t.sup_norm * (1.0 + rel);
  return t;
}

EmbeddingReport summarize(std::vector<EmbeddingTrial> trials) {
  EmbeddingReport r;
  r.trials = std::move(trials);
  r.pass = !r.trials.empty();
  r.min_ratio = r.trials.empty() ? 0.0 : r.trials.front().ratio;
  for (const auto& t : r.trials) {
    r.min_ratio = std::min(r.min_ratio, t.ratio);
    r.max_ratio = std::max(r.max_ratio, t.ratio);
    if (t.linf > 0.0)
      r.max_trace_ratio = std::max(r.max_trace_ratio, std::max(t.trace_geometric, t.trace_uniform) / t.linf);
    r.pass = r.pass && t.lower_ok && t.upper_ok && t.trace_ok && t.trace_below_sup;
  }
  return r;
}

void check_embedding_args(std::size_t n_max, std::size_t f_cap, std::size_t s_max, std::size_t trials) {
  if (trials == 0) throw PreconditionError("embedding certification needs at least one trial");
  if (n_max == 0 || f_cap == 0 || s_max == 0) throw ArgumentError("n_max, f_cap and s_max must be positive");
}

}  // namespace

EmbeddingTrial certify_embedding_trial(std::span<const cplx> a, std::size_t f_cap, std::size_t s_max) {
  return run_trial(a, f_cap, s_max, 0, true);
}

EmbeddingReport certify_embedding_bounds_serial(std::size_t n_max, std::size_t f_cap, std::size_t s_max,
                                                std::size_t trials, std::uint64_t seed) {
  check_embedding_args(n_max, f_cap, s_max, trials);
  std::vector<EmbeddingTrial> out;
  for (std::size_t k = 0; k < trials; ++k) {
    const auto a = sample_coefficients(n_max, seed, k);
    out.push_back(run_trial(a, f_cap, s_max, k, false));
  }
  return summarize(std::move(out));
}

EmbeddingReport certify_embedding_bounds(std::size_t n_max, std::size_t f_cap, std::size_t s_max,
                                         std::size_t trials, std::uint64_t seed) {
  check_embedding_args(n_max, f_cap, s_max, trials);
  std::vector<EmbeddingTrial> out(trials);
  const auto count = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    const auto a = sample_coefficients(n_max, seed, idx);
    out[idx] = run_trial(a, f_cap, s_max, idx, false);
  }
  return summarize(std::move(out));
}

}  // namespace opalg
