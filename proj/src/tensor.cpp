#include "opalg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "opalg/errors.hpp"
#include "opalg/norms.hpp"

namespace opalg {

TensorElem::TensorElem(std::size_t dim, std::vector<TensorTerm> terms) : dim_(dim) {
  for (auto& t : terms) add(std::move(t.left), std::move(t.right));
}

void TensorElem::check(const Matrix& m) const {
  if (m.rows() != dim_ || m.cols() != dim_)
    throw DimensionError("tensor leg is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", expected " + std::to_string(dim_) + "x" + std::to_string(dim_));
}

void TensorElem::add(Matrix left, Matrix right) {
  check(left);
  check(right);
  terms_.push_back({std::move(left), std::move(right)});
}

TensorElem& TensorElem::operator+=(const TensorElem& o) {
  if (o.dim_ != dim_) throw DimensionError("tensor sum of different dimensions");
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

TensorElem& TensorElem::operator-=(const TensorElem& o) {
  if (o.dim_ != dim_) throw DimensionError("tensor difference of different dimensions");
  for (const auto& t : o.terms_) terms_.push_back({-t.left, t.right});
  return *this;
}

TensorElem& TensorElem::operator*=(const QComplex& s) {
  for (auto& t : terms_) t.left *= s;
  return *this;
}

TensorElem TensorElem::left_action(const Matrix& a) const {
  check(a);
  TensorElem out(dim_);
  for (const auto& t : terms_) out.terms_.push_back({a * t.left, t.right});
  return out;
}

TensorElem TensorElem::right_action(const Matrix& a) const {
  check(a);
  TensorElem out(dim_);
  for (const auto& t : terms_) out.terms_.push_back({t.left, t.right * a});
  return out;
}

TensorElem build_delta(const Chain& c, std::size_t n) {
  if (n == 0 || n > c.m_max())
    throw ArgumentError("diagonal index " + std::to_string(n) + " outside 1.." + std::to_string(c.m_max()));
  TensorElem delta(c.truncation_dim());
  delta.add(c.e(1), c.e(1));
  for (std::size_t j = 2; j <= n; ++j) {
    Matrix step = c.e(j) - c.e(j - 1);
    delta.add(step, step);
  }
  return delta;
}

Matrix pi_map(const TensorElem& t) {
  Matrix out = Matrix::zeros(t.dim(), t.dim());
  for (const auto& term : t.terms()) out += term.left * term.right;
  return out;
}

TensorElem bimodule_commutator(const Matrix& a, const TensorElem& t) {
  return t.left_action(a) - t.right_action(a);
}

Matrix flatten(const TensorElem& t) {
  const std::size_t d2 = t.dim() * t.dim();
  Matrix out = Matrix::zeros(d2, d2);
  for (const auto& term : t.terms()) out += kron(term.left, term.right);
  return out;
}

namespace {

// Returns c with m = c * base, or nothing. Exact backends compare exactly.
std::optional<QComplex> exact_ratio(const Matrix& m, const Matrix& base) {
  const auto be = base.exact_entries();
  const auto me = m.exact_entries();
  std::size_t pivot = be.size();
  for (std::size_t k = 0; k < be.size(); ++k)
    if (!be[k].is_zero()) {
      pivot = k;
      break;
    }
  if (pivot == be.size()) return std::nullopt;
  const QComplex c = me[pivot] * be[pivot].inverse();
  for (std::size_t k = 0; k < be.size(); ++k)
    if (!(me[k] == c * be[k])) return std::nullopt;
  return c;
}

std::optional<cplx> float_ratio(const Matrix& m, const Matrix& base, double tol) {
  const Matrix bf = base.to_float(), mf = m.to_float();
  const auto be = bf.float_entries();
  const auto me = mf.float_entries();
  std::size_t pivot = 0;
  for (std::size_t k = 1; k < be.size(); ++k)
    if (std::abs(be[k]) > std::abs(be[pivot])) pivot = k;
  if (be.empty() || std::abs(be[pivot]) == 0.0) return std::nullopt;
  const cplx c = me[pivot] / be[pivot];
  const double scale = std::max(1.0, mf.max_abs());
  for (std::size_t k = 0; k < be.size(); ++k)
    if (std::abs(me[k] - c * be[k]) > tol * scale) return std::nullopt;
  return c;
}

// One greedy merging pass on the chosen leg. Float merges keep the
// (tiny) remainder as an extra term, so the element is unchanged.
std::vector<TensorTerm> merge_pass(const std::vector<TensorTerm>& terms, bool on_left, double tol) {
  std::vector<TensorTerm> groups;
  std::vector<TensorTerm> remainders;
  for (const auto& term : terms) {
    const Matrix& key = on_left ? term.left : term.right;
    const Matrix& other = on_left ? term.right : term.left;
    if (key.is_zero() || other.is_zero()) continue;
    bool merged = false;
    for (auto& g : groups) {
      const Matrix& gkey = on_left ? g.left : g.right;
      Matrix& gother = on_left ? g.right : g.left;
      if (key.is_exact() && gkey.is_exact()) {
        if (auto c = exact_ratio(key, gkey)) {
          gother += *c * other;
          merged = true;
        }
      } else if (auto c = float_ratio(key, gkey, tol)) {
        gother += *c * other;
        Matrix rest = key - *c * gkey.to_float();
        if (!rest.is_zero()) {
          if (on_left)
            remainders.push_back({std::move(rest), other});
          else
            remainders.push_back({other, std::move(rest)});
        }
        merged = true;
      }
      if (merged) break;
    }
    if (!merged) groups.push_back(term);
  }
  std::vector<TensorTerm> out;
  for (auto& g : groups)
    if (!g.left.is_zero() && !g.right.is_zero()) out.push_back(std::move(g));
  for (auto& r : remainders) out.push_back(std::move(r));
  return out;
}

}  // namespace

TensorElem regroup(const TensorElem& t, double float_tol) {
  auto terms = merge_pass(t.terms(), true, float_tol);
  terms = merge_pass(terms, false, float_tol);
  return TensorElem(t.dim(), std::move(terms));
}

NormBounds tensor_norm_bounds(const TensorElem& t) {
  NormBounds nb;
  if (t.term_count() == 0) return nb;
  const Matrix f = flatten(t);
  if (f.is_zero()) return nb;
  nb.lower = op_norm(f);
  const TensorElem grouped = regroup(t);
  for (const auto& term : grouped.terms()) nb.upper += op_norm(term.left) * op_norm(term.right);
  return nb;
}

TensorElem unitize_diagonal(const TensorElem& delta, const Matrix& u, const Matrix& one) {
  const Matrix pi = pi_map(delta);
  require_same_shape(u, pi, "unitize_diagonal");
  require_same_shape(one, pi, "unitize_diagonal");
  const Tolerance tol = u.is_exact() && pi.is_exact() ? Tolerance::exact() : Tolerance::approx(1e-9);
  if (!equal_within(u, pi, tol)) throw PreconditionError("u must equal pi(delta)");
  if (!equal_within(one, Matrix::identity(one.rows()), Tolerance::exact()))
    throw PreconditionError("`one` must be the identity of the truncation");

  TensorElem m = QComplex(2) * delta;
  m -= delta.left_action(u);
  const Matrix co = one - u;
  m.add(co, co);
  if (!equal_within(pi_map(m), one, tol)) throw std::logic_error("unitized diagonal does not multiply to the identity");
  return m;
}

namespace {

bool in_chain_span(const Chain& c, const Matrix& a) {
  const std::size_t n = c.truncation_dim();
  if (a.rows() != n || a.cols() != n) return false;
  const std::size_t count = c.m_max();
  const bool exact = a.is_exact() && c.is_exact();
  auto stacked = [&](bool with_a) {
    Matrix s(count + (with_a ? 1 : 0), n * n, exact ? Backend::exact : Backend::floating);
    for (std::size_t r = 0; r < count; ++r)
      for (std::size_t k = 0; k < n * n; ++k) {
        if (exact)
          s.set(r, k, c.e(r + 1).q(k / n, k % n));
        else
          s.set(r, k, c.e(r + 1).at(k / n, k % n));
      }
    if (with_a)
      for (std::size_t k = 0; k < n * n; ++k) {
        if (exact)
          s.set(count, k, a.q(k / n, k % n));
        else
          s.set(count, k, a.at(k / n, k % n));
      }
    return s;
  };
  if (exact) return exact_rank(stacked(true)) == exact_rank(stacked(false));
  return numerical_rank(stacked(true), 1e-9) == numerical_rank(stacked(false), 1e-9);
}

}  // namespace

MbadReport certify_mbad(const std::vector<TensorElem>& deltas, const Chain& c,
                        const std::vector<SampleElement>& sample) {
  if (deltas.empty()) throw ArgumentError("certify_mbad needs at least one diagonal");
  const std::size_t n = c.truncation_dim();
  const Matrix one = Matrix::identity(n);
  const double tol = 1e-9;

  MbadReport report;
  std::vector<Matrix> us;
  for (const auto& d : deltas) {
    if (d.dim() != n) throw DimensionError("diagonal dimension differs from the chain truncation");
    us.push_back(pi_map(d));
    report.K = std::max(report.K, op_norm(us.back()));
  }
  const double K = report.K;
  std::vector<TensorElem> units;
  for (std::size_t i = 0; i < deltas.size(); ++i) units.push_back(unitize_diagonal(deltas[i], us[i], one));

  // First pass: commutator bounds for every element, which fixes C.
  report.records.resize(sample.size());
  std::vector<std::vector<double>> comm_up(sample.size());
  for (std::size_t s = 0; s < sample.size(); ++s) {
    const auto& el = sample[s];
    MbadRecord& rec = report.records[s];
    rec.a_label = el.label;
    rec.K = K;
    rec.in_span = in_chain_span(c, el.a);
    if (!rec.in_span) continue;
    rec.a_norm = op_norm(el.a);
    std::size_t last_bad = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      const Matrix resid = el.a * us[i] - el.a;
      const bool zero = resid.is_zero();
      const double value = zero ? 0.0 : op_norm(resid);
      if (!zero) last_bad = i + 1;
      rec.approx_identity_residual = value;
      const NormBounds nb = tensor_norm_bounds(bimodule_commutator(el.a, deltas[i]));
      comm_up[s].push_back(nb.upper);
      rec.commutator_upper = std::max(rec.commutator_upper, nb.upper);
      rec.commutator_lower = std::max(rec.commutator_lower, nb.lower);
    }
    rec.eventual_index = last_bad < deltas.size() ? last_bad + 1 : 0;
    rec.cond_identity = el.a.is_exact() ? rec.approx_identity_residual == 0.0 && last_bad < deltas.size()
                                        : rec.approx_identity_residual <= tol;
    rec.cond_commutator = comm_up[s].back() <= (el.a.is_exact() ? 0.0 : tol);
    if (rec.a_norm > 0.0) report.C = std::max(report.C, rec.commutator_upper / rec.a_norm);
  }

  report.verdict = true;
  for (std::size_t s = 0; s < sample.size(); ++s) {
    const auto& el = sample[s];
    MbadRecord& rec = report.records[s];
    rec.C = report.C;
    if (!rec.in_span) {
      rec.pass = false;
      continue;
    }
    rec.cond_multiplier = rec.commutator_upper <= report.C * rec.a_norm + tol;
    const Matrix x = el.a + QComplex(el.lambda) * one;
    bool unit_ok = true;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const NormBounds nb = tensor_norm_bounds(bimodule_commutator(x, units[i]));
      const Matrix drift = el.a - el.a * us[i];
      const double drift_norm = drift.is_zero() ? 0.0 : op_norm(drift);
      const double step = (2.0 + K) * comm_up[s][i] + 2.0 * (1.0 + K) * drift_norm;
      rec.unitized_lower = std::max(rec.unitized_lower, nb.lower);
      rec.unitized_upper = std::max(rec.unitized_upper, nb.upper);
      rec.unitized_step_bound = std::max(rec.unitized_step_bound, step);
      unit_ok = unit_ok && nb.lower <= step + tol;
    }
    rec.unitized_uniform_bound = ((2.0 + K) * report.C + 2.0 * (1.0 + K) * (1.0 + K)) * rec.a_norm;
    unit_ok = unit_ok && rec.unitized_lower <= rec.unitized_uniform_bound + tol;
    rec.pass = rec.cond_identity && rec.cond_commutator && rec.cond_multiplier && unit_ok;
    report.verdict = report.verdict && rec.pass;
  }
  return report;
}

DiagonalCheck check_diagonal(const FiniteDiagonal& d, const Tolerance& tol) {
  DiagonalCheck out;
  const Matrix u = pi_map(d.diag);
  out.pi_is_identity_on_algebra = true;
  out.commutes_with_algebra = true;
  for (const auto& a : d.algebra_basis) {
    out.pi_is_identity_on_algebra =
        out.pi_is_identity_on_algebra && equal_within(u * a, a, tol) && equal_within(a * u, a, tol);
    const Matrix f = flatten(bimodule_commutator(a, d.diag));
    out.commutes_with_algebra = out.commutes_with_algebra && equal_within(f, Matrix::zeros(f.rows(), f.cols()), tol);
  }
  return out;
}

Matrix expectation_from_diagonal(const FiniteDiagonal& d, const Matrix& x) {
  if (x.rows() != d.diag.dim() || x.cols() != d.diag.dim())
    throw DimensionError("expectation argument does not match the diagonal dimension");
  Matrix out = Matrix::zeros(x.rows(), x.cols());
  for (const auto& t : d.diag.terms()) out += t.left * x * t.right;
  return out;
}

ExpectationReport certify_expectation(const FiniteDiagonal& d, const std::vector<Matrix>& xs,
                                      const std::vector<Matrix>& commutant_sample, const Tolerance& tol) {
  ExpectationReport r;
  r.into_commutant = true;
  r.fixes_commutant = true;
  r.bimodule = true;
  for (const auto& x : xs) {
    const Matrix ex = expectation_from_diagonal(d, x);
    for (const auto& a : d.algebra_basis) r.into_commutant = r.into_commutant && equal_within(a * ex, ex * a, tol);
    for (const auto& u : commutant_sample)
      for (const auto& v : commutant_sample)
        r.bimodule = r.bimodule && equal_within(expectation_from_diagonal(d, u * x * v), u * ex * v, tol);
  }
  for (const auto& u : commutant_sample)
    r.fixes_commutant = r.fixes_commutant && equal_within(expectation_from_diagonal(d, u), u, tol);
  r.pass = r.into_commutant && r.fixes_commutant && r.bimodule;
  return r;
}

FiniteDiagonal matrix_algebra_diagonal(std::size_t n) {
  if (n == 0) throw ArgumentError("matrix algebra of size 0");
  FiniteDiagonal d{TensorElem(n), {}};
  for (std::size_t i = 0; i < n; ++i) d.diag.add(Matrix::unit(n, i, 0), Matrix::unit(n, 0, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.algebra_basis.push_back(Matrix::unit(n, i, j));
  return d;
}

FiniteDiagonal skew_idempotent_diagonal(const QComplex& t) {
  Matrix e(2, 2);
  e.set(0, 0, QComplex(1));
  e.set(0, 1, t);
  const Matrix id = Matrix::identity(2);
  FiniteDiagonal d{TensorElem(2), {id, e}};
  d.diag.add(e, e);
  d.diag.add(id - e, id - e);
  return d;
}

std::vector<Matrix> expectation_chain(const FiniteDiagonal& d, const Matrix& e, const Matrix& p) {
  const Matrix ep = expectation_from_diagonal(d, p);
  return {ep,
          expectation_from_diagonal(d, e * p),
          e * ep,
          ep * e,
          expectation_from_diagonal(d, p * e),
          expectation_from_diagonal(d, e)};
}

}  // namespace opalg
