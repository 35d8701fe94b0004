#include "opalg/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opalg/errors.hpp"

namespace opalg {

Tolerance Tolerance::approx(double abs_tol) {
  if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
    throw ArgumentError("approximate tolerance must be positive and finite, got " + std::to_string(abs_tol));
  Tolerance t;
  t.abs_tol_ = abs_tol;
  t.mode_ = Mode::approx;
  return t;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Backend backend) : rows_(rows), cols_(cols), backend_(backend) {
  if (backend == Backend::exact)
    q_.resize(rows * cols);
  else
    f_.assign(rows * cols, cplx{});
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<QComplex> entries)
    : rows_(rows), cols_(cols), backend_(Backend::exact), q_(std::move(entries)) {
  if (q_.size() != rows * cols) throw DimensionError("entry count does not match rows*cols");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), backend_(Backend::floating), f_(std::move(entries)) {
  if (f_.size() != rows * cols) throw DimensionError("entry count does not match rows*cols");
}

Matrix Matrix::identity(std::size_t n, Backend backend) {
  Matrix m(n, n, backend);
  for (std::size_t i = 0; i < n; ++i) {
    if (backend == Backend::exact)
      m.q_[i * n + i] = QComplex(1);
    else
      m.f_[i * n + i] = 1.0;
  }
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<long>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<QComplex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged row literal");
    for (long v : row) entries.emplace_back(v);
  }
  return Matrix(r, c, std::move(entries));
}

Matrix Matrix::from_rows_float(std::initializer_list<std::initializer_list<cplx>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<cplx> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw DimensionError("ragged row literal");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(entries));
}

Matrix Matrix::unit(std::size_t n, std::size_t i, std::size_t j, Backend backend) {
  Matrix m(n, n, backend);
  if (backend == Backend::exact)
    m.set(i, j, QComplex(1));
  else
    m.set(i, j, cplx(1.0));
  return m;
}

Matrix Matrix::diagonal(std::span<const QComplex> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.q_[i * diag.size() + i] = diag[i];
  return m;
}

const QComplex& Matrix::q(std::size_t i, std::size_t j) const {
  if (!is_exact()) throw ArgumentError("exact entry requested from a floating matrix");
  return q_[i * cols_ + j];
}

cplx Matrix::at(std::size_t i, std::size_t j) const {
  return is_exact() ? q_[i * cols_ + j].to_complex() : f_[i * cols_ + j];
}

void Matrix::set(std::size_t i, std::size_t j, QComplex v) {
  if (is_exact())
    q_[i * cols_ + j] = std::move(v);
  else
    f_[i * cols_ + j] = v.to_complex();
}

void Matrix::set(std::size_t i, std::size_t j, cplx v) {
  if (is_exact()) *this = to_float();
  f_[i * cols_ + j] = v;
}

Matrix Matrix::to_float() const {
  if (!is_exact()) return *this;
  std::vector<cplx> out(q_.size());
  for (std::size_t k = 0; k < q_.size(); ++k) out[k] = q_[k].to_complex();
  return Matrix(rows_, cols_, std::move(out));
}

Matrix Matrix::adjoint() const {
  Matrix out(cols_, rows_, backend_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      if (is_exact())
        out.q_[j * rows_ + i] = q_[i * cols_ + j].conj();
      else
        out.f_[j * rows_ + i] = std::conj(f_[i * cols_ + j]);
    }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_, backend_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      if (is_exact())
        out.q_[j * rows_ + i] = q_[i * cols_ + j];
      else
        out.f_[j * rows_ + i] = f_[i * cols_ + j];
    }
  return out;
}

Matrix Matrix::submatrix(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const {
  Matrix out(row_idx.size(), col_idx.size(), backend_);
  for (std::size_t a = 0; a < row_idx.size(); ++a) {
    if (row_idx[a] >= rows_) throw DimensionError("submatrix row index out of range");
    for (std::size_t b = 0; b < col_idx.size(); ++b) {
      if (col_idx[b] >= cols_) throw DimensionError("submatrix column index out of range");
      if (is_exact())
        out.q_[a * col_idx.size() + b] = q_[row_idx[a] * cols_ + col_idx[b]];
      else
        out.f_[a * col_idx.size() + b] = f_[row_idx[a] * cols_ + col_idx[b]];
    }
  }
  return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& block) {
  if (r0 + block.rows() > rows_ || c0 + block.cols() > cols_) throw DimensionError("block does not fit");
  if (is_exact() && !block.is_exact()) *this = to_float();
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) {
      if (is_exact())
        q_[(r0 + i) * cols_ + c0 + j] = block.q(i, j);
      else
        f_[(r0 + i) * cols_ + c0 + j] = block.at(i, j);
    }
}

bool Matrix::is_zero() const {
  if (is_exact()) return std::all_of(q_.begin(), q_.end(), [](const QComplex& z) { return z.is_zero(); });
  return std::all_of(f_.begin(), f_.end(), [](cplx z) { return z == cplx{}; });
}

double Matrix::max_abs_diff(const Matrix& other) const {
  require_same_shape(*this, other, "max_abs_diff");
  double worst = 0.0;
  if (is_exact() && other.is_exact()) {
    for (std::size_t k = 0; k < q_.size(); ++k) worst = std::max(worst, std::abs((q_[k] - other.q_[k]).to_complex()));
    return worst;
  }
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) worst = std::max(worst, std::abs(at(i, j) - other.at(i, j)));
  return worst;
}

double Matrix::max_abs() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) worst = std::max(worst, std::abs(at(i, j)));
  return worst;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require_same_shape(*this, o, "matrix sum");
  if (is_exact() && o.is_exact()) {
    for (std::size_t k = 0; k < q_.size(); ++k)
      if (!o.q_[k].is_zero()) q_[k] += o.q_[k];
    return *this;
  }
  if (is_exact()) *this = to_float();
  const Matrix of = o.to_float();
  for (std::size_t k = 0; k < f_.size(); ++k) f_[k] += of.f_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require_same_shape(*this, o, "matrix difference");
  if (is_exact() && o.is_exact()) {
    for (std::size_t k = 0; k < q_.size(); ++k)
      if (!o.q_[k].is_zero()) q_[k] -= o.q_[k];
    return *this;
  }
  if (is_exact()) *this = to_float();
  const Matrix of = o.to_float();
  for (std::size_t k = 0; k < f_.size(); ++k) f_[k] -= of.f_[k];
  return *this;
}

Matrix& Matrix::operator*=(const QComplex& s) {
  if (is_exact()) {
    for (auto& z : q_)
      if (!z.is_zero()) z *= s;
  } else {
    const cplx sf = s.to_complex();
    for (auto& z : f_) z *= sf;
  }
  return *this;
}

Matrix& Matrix::operator*=(cplx s) {
  if (is_exact()) *this = to_float();
  for (auto& z : f_) z *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matrix product: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const std::size_t n = a.rows(), inner = a.cols(), m = b.cols();
  if (a.is_exact() && b.is_exact()) {
    Matrix c(n, m);
    QComplex tmp;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < inner; ++k) {
        const QComplex& aik = a.q_[i * inner + k];
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < m; ++j) {
          const QComplex& bkj = b.q_[k * m + j];
          if (bkj.is_zero()) continue;
          tmp = aik;
          tmp *= bkj;
          c.q_[i * m + j] += tmp;
        }
      }
    return c;
  }
  const Matrix af = a.to_float();
  const Matrix bf = b.to_float();
  Matrix c(n, m, Backend::floating);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      const cplx aik = af.f_[i * inner + k];
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < m; ++j) c.f_[i * m + j] += aik * bf.f_[k * m + j];
    }
  return c;
}

bool operator==(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.is_exact() && b.is_exact()) return a.q_ == b.q_;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a.at(i, j) != b.at(i, j)) return false;
  return true;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  const bool exact = a.is_exact() && b.is_exact();
  Matrix out(rows, cols, exact ? Backend::exact : Backend::floating);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (exact) {
        const QComplex& aij = a.q(i, j);
        if (aij.is_zero()) continue;
        for (std::size_t k = 0; k < b.rows(); ++k)
          for (std::size_t l = 0; l < b.cols(); ++l) {
            const QComplex& bkl = b.q(k, l);
            if (!bkl.is_zero()) out.set(i * b.rows() + k, j * b.cols() + l, aij * bkl);
          }
      } else {
        const cplx aij = a.at(i, j);
        if (aij == cplx{}) continue;
        for (std::size_t k = 0; k < b.rows(); ++k)
          for (std::size_t l = 0; l < b.cols(); ++l) out.set(i * b.rows() + k, j * b.cols() + l, aij * b.at(k, l));
      }
    }
  return out;
}

Matrix power(const Matrix& m, unsigned r) {
  require_square(m, "matrix power");
  Matrix result = Matrix::identity(m.rows(), m.backend());
  Matrix base = m;
  while (r > 0) {
    if (r & 1u) result = result * base;
    r >>= 1u;
    if (r > 0) base = base * base;
  }
  return result;
}

std::vector<cplx> vectorize(const Matrix& m) {
  std::vector<cplx> out;
  out.reserve(m.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(m.at(i, j));
  return out;
}

std::size_t exact_rank(const Matrix& m) {
  if (!m.is_exact()) throw ArgumentError("exact_rank needs an exact matrix");
  std::vector<QComplex> w(m.exact_entries().begin(), m.exact_entries().end());
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && w[pivot * cols + c].is_zero()) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank)
      for (std::size_t j = 0; j < cols; ++j) std::swap(w[pivot * cols + j], w[rank * cols + j]);
    const QComplex inv = w[rank * cols + c].inverse();
    for (std::size_t i = rank + 1; i < rows; ++i) {
      if (w[i * cols + c].is_zero()) continue;
      const QComplex f = w[i * cols + c] * inv;
      for (std::size_t j = c; j < cols; ++j)
        if (!w[rank * cols + j].is_zero()) w[i * cols + j] -= f * w[rank * cols + j];
    }
    ++rank;
  }
  return rank;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError(std::string(what) + ": shape " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

void require_square(const Matrix& m, const char* what) {
  if (!m.is_square())
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
}

}  // namespace opalg
