#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "opalg/scalar.hpp"

namespace opalg {

enum class Backend { exact, floating };

/// Absolute tolerance with an explicit exact mode. abs_tol == 0 iff mode == exact.
class Tolerance {
 public:
  enum class Mode { exact, approx };

  static Tolerance exact() { return Tolerance(); }
  static Tolerance approx(double abs_tol = 1e-9);

  double abs_tol() const { return abs_tol_; }
  Mode mode() const { return mode_; }
  bool is_exact() const { return mode_ == Mode::exact; }

 private:
  Tolerance() = default;
  double abs_tol_ = 0.0;
  Mode mode_ = Mode::exact;
};

/// Dense complex matrix, row-major, with an exact (Gaussian rational) or a
/// double-precision backend. Mixed-backend arithmetic promotes to floating.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Backend backend = Backend::exact);
  Matrix(std::size_t rows, std::size_t cols, std::vector<QComplex> entries);
  Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static Matrix zeros(std::size_t rows, std::size_t cols, Backend backend = Backend::exact) {
    return Matrix(rows, cols, backend);
  }
  static Matrix identity(std::size_t n, Backend backend = Backend::exact);
  /// Row-major integer literal, handy for small exact fixtures.
  static Matrix from_rows(std::initializer_list<std::initializer_list<long>> rows);
  static Matrix from_rows_float(std::initializer_list<std::initializer_list<cplx>> rows);
  /// Matrix unit with a single one at (i, j).
  static Matrix unit(std::size_t n, std::size_t i, std::size_t j, Backend backend = Backend::exact);
  /// Square diagonal matrix.
  static Matrix diagonal(std::span<const QComplex> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }
  bool empty() const { return size() == 0; }
  bool is_square() const { return rows_ == cols_; }
  Backend backend() const { return backend_; }
  bool is_exact() const { return backend_ == Backend::exact; }

  /// Exact entry; throws ArgumentError on a floating matrix.
  const QComplex& q(std::size_t i, std::size_t j) const;
  /// Entry as a double-precision value (lossless view for exact matrices up to rounding).
  cplx at(std::size_t i, std::size_t j) const;

  void set(std::size_t i, std::size_t j, QComplex v);
  void set(std::size_t i, std::size_t j, cplx v);

  std::span<const QComplex> exact_entries() const { return q_; }
  std::span<const cplx> float_entries() const { return f_; }

  Matrix to_float() const;
  Matrix adjoint() const;
  Matrix transpose() const;

  /// Rows and columns picked by index lists (in order).
  Matrix submatrix(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;
  /// Writes `block` with its top-left corner at (r0, c0).
  void set_block(std::size_t r0, std::size_t c0, const Matrix& block);

  bool is_zero() const;
  /// Largest entrywise modulus of this - other.
  double max_abs_diff(const Matrix& other) const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(const QComplex& s);
  Matrix& operator*=(cplx s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= QComplex(-1); }
  friend Matrix operator*(const QComplex& s, Matrix a) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);

  /// Exact entrywise equality for two exact matrices; bitwise double equality otherwise.
  friend bool operator==(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Backend backend_ = Backend::exact;
  std::vector<QComplex> q_;
  std::vector<cplx> f_;
};

/// Kronecker product; block (i, j) is a(i, j) * b.
Matrix kron(const Matrix& a, const Matrix& b);
/// Integer power, r >= 0.
Matrix power(const Matrix& m, unsigned r);
/// Frobenius inner-product vectorization (row-major), as a 1 x (rows*cols) row.
std::vector<cplx> vectorize(const Matrix& m);

/// Rank over the Gaussian rationals (exact matrices only).
std::size_t exact_rank(const Matrix& m);

/// Checks shape compatibility, throwing DimensionError with `what` as context.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);
void require_square(const Matrix& m, const char* what);

}  // namespace opalg
