#include "opalg/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opalg/errors.hpp"

namespace opalg {
namespace {

constexpr double kJacobiEps = 1e-15;
constexpr int kMaxSweeps = 80;
constexpr std::size_t kParallelMinCols = 64;

// Column-major working copy of a tall matrix (rows >= cols).
struct Columns {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> data;

  cplx* col(std::size_t j) { return data.data() + j * rows; }
};

Columns tall_columns(const Matrix& input) {
  const Matrix m = input.rows() >= input.cols() ? input.to_float() : input.adjoint().to_float();
  Columns c;
  c.rows = m.rows();
  c.cols = m.cols();
  c.data.resize(c.rows * c.cols);
  for (std::size_t i = 0; i < c.rows; ++i)
    for (std::size_t j = 0; j < c.cols; ++j) c.data[j * c.rows + i] = m.at(i, j);
  return c;
}

// Orthogonalizes columns p and q; returns true if a rotation was applied.
bool rotate_pair(Columns& w, std::size_t p, std::size_t q) {
  cplx* ap = w.col(p);
  cplx* aq = w.col(q);
  double alpha = 0.0, beta = 0.0;
  cplx gamma{};
  for (std::size_t i = 0; i < w.rows; ++i) {
    alpha += std::norm(ap[i]);
    beta += std::norm(aq[i]);
    gamma += std::conj(ap[i]) * aq[i];
  }
  const double g = std::abs(gamma);
  if (g == 0.0 || g <= kJacobiEps * std::sqrt(alpha * beta)) return false;

  const cplx phase = gamma / g;  // a_q * conj(phase) has real overlap g with a_p
  const double zeta = (beta - alpha) / (2.0 * g);
  const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = c * t;
  for (std::size_t i = 0; i < w.rows; ++i) {
    const cplx x = ap[i];
    const cplx y = aq[i] * std::conj(phase);
    ap[i] = c * x - s * y;
    aq[i] = s * x + c * y;
  }
  return true;
}

std::vector<double> column_norms_sorted(Columns& w) {
  std::vector<double> sv(w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    const cplx* a = w.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < w.rows; ++i) s += std::norm(a[i]);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

void require_nonempty(const Matrix& m) {
  if (m.empty()) throw DimensionError("norm of an empty matrix");
}

}  // namespace

std::vector<double> singular_values_serial(const Matrix& m) {
  require_nonempty(m);
  Columns w = tall_columns(m);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < w.cols; ++p)
      for (std::size_t q = p + 1; q < w.cols; ++q) rotated |= rotate_pair(w, p, q);
    if (!rotated) break;
  }
  return column_norms_sorted(w);
}

std::vector<double> singular_values_parallel(const Matrix& m) {
  require_nonempty(m);
  Columns w = tall_columns(m);
  const std::size_t players = w.cols + (w.cols % 2);
  if (players < 2) return column_norms_sorted(w);

  std::vector<std::size_t> ring(players);
  std::iota(ring.begin(), ring.end(), 0);
  const std::size_t half = players / 2;
  std::vector<std::pair<std::size_t, std::size_t>> pairs(half);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    int rotations = 0;
    for (std::size_t round = 0; round + 1 < players; ++round) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::size_t a = ring[k], b = ring[players - 1 - k];
        pairs[k] = {std::min(a, b), std::max(a, b)};
      }
      const auto n_pairs = static_cast<std::ptrdiff_t>(half);
#pragma omp parallel for reduction(+ : rotations) schedule(static)
      for (std::ptrdiff_t k = 0; k < n_pairs; ++k) {
        const auto [p, q] = pairs[static_cast<std::size_t>(k)];
        if (q < w.cols && rotate_pair(w, p, q)) ++rotations;
      }
      std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
    }
    if (rotations == 0) break;
  }
  return column_norms_sorted(w);
}

std::vector<double> singular_values(const Matrix& m) {
  const std::size_t narrow = std::min(m.rows(), m.cols());
  return narrow >= kParallelMinCols ? singular_values_parallel(m) : singular_values_serial(m);
}

double op_norm(const Matrix& m) { return singular_values(m).front(); }

double schatten1_norm(const Matrix& m) {
  const auto sv = singular_values(m);
  // ascending accumulation keeps small singular values from being swamped
  return std::accumulate(sv.rbegin(), sv.rend(), 0.0);
}

bool equal_within(const Matrix& a, const Matrix& b, const Tolerance& tol) {
  require_same_shape(a, b, "equal_within");
  if (tol.is_exact()) return a == b;
  return a.max_abs_diff(b) <= tol.abs_tol();
}

bool is_idempotent(const Matrix& m, const Tolerance& tol) {
  require_square(m, "is_idempotent");
  return equal_within(m * m, m, tol);
}

std::size_t numerical_rank(const Matrix& m, double rel_tol) {
  const auto sv = singular_values(m);
  if (sv.front() == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > rel_tol * sv.front(); }));
}

}  // namespace opalg
