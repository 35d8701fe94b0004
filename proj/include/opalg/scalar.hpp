#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

namespace opalg {

using cplx = std::complex<double>;

/// Gaussian rational re + i*im with arbitrary-precision parts.
struct QComplex {
  mpq_class re{0};
  mpq_class im{0};

  QComplex() = default;
  QComplex(long v) : re(v) {}  // NOLINT(google-explicit-constructor)
  QComplex(int v) : re(v) {}   // NOLINT(google-explicit-constructor)
  // mpq_class(n, d) is not reduced on construction; equality needs canonical form
  QComplex(mpq_class r) : re(std::move(r)) { re.canonicalize(); }  // NOLINT(google-explicit-constructor)
  QComplex(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  QComplex conj() const { return {re, -im}; }
  cplx to_complex() const { return {re.get_d(), im.get_d()}; }

  /// "p/q" for real values, "p/q+r/si" otherwise.
  std::string to_string() const;
  /// Accepts "a", "a/b", "a+bi", "a/b-c/di", "bi".
  static QComplex parse(const std::string& text);

  QComplex& operator+=(const QComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  QComplex& operator-=(const QComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  QComplex& operator*=(const QComplex& o);

  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }

  /// Multiplicative inverse; throws ArgumentError on zero.
  QComplex inverse() const;
};

/// Parse a real rational "p" or "p/q" (also decimal "0.25").
mpq_class parse_rational(const std::string& text);

}  // namespace opalg
