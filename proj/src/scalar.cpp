#include "opalg/scalar.hpp"

#include <cctype>

#include "opalg/errors.hpp"

namespace opalg {

QComplex& QComplex::operator*=(const QComplex& o) {
  if (is_real() && o.is_real()) {
    re *= o.re;
    return *this;
  }
  mpq_class r = re * o.re - im * o.im;
  mpq_class i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

QComplex QComplex::inverse() const {
  if (is_zero()) throw ArgumentError("inverse of zero");
  mpq_class n = re * re + im * im;
  return {re / n, -im / n};
}

std::string QComplex::to_string() const {
  if (is_real()) return re.get_str();
  std::string out = sgn(re) == 0 ? std::string() : re.get_str();
  if (sgn(im) > 0 && !out.empty()) out += '+';
  out += im.get_str();
  out += 'i';
  return out;
}

mpq_class parse_rational(const std::string& text) {
  if (text.empty()) throw ArgumentError("empty rational literal");
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t decimals = text.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw ArgumentError("bad rational literal '" + text + "'");
    mpz_class num;
    if (num.set_str(digits[0] == '+' ? digits.substr(1) : digits, 10) != 0)
      throw ArgumentError("bad rational literal '" + text + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, decimals);
    mpq_class q(num, den);
    q.canonicalize();
    return q;
  }
  mpq_class q;
  const std::string body = text[0] == '+' ? text.substr(1) : text;
  if (q.set_str(body, 10) != 0) throw ArgumentError("bad rational literal '" + text + "'");
  if (q.get_den() == 0) throw ArgumentError("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

QComplex QComplex::parse(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  if (text.empty()) throw ArgumentError("empty complex literal");
  if (text.back() != 'i') return QComplex(parse_rational(text));

  std::string body = text.substr(0, text.size() - 1);
  // split at the last sign that is not leading and not following '/'
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != '/') {
      split = k;
      break;
    }
  }
  auto imag_of = [](const std::string& s) -> mpq_class {
    if (s.empty() || s == "+") return 1;
    if (s == "-") return -1;
    return parse_rational(s);
  };
  if (split == std::string::npos) return {0, imag_of(body)};
  return {parse_rational(body.substr(0, split)), imag_of(body.substr(split))};
}

}  // namespace opalg
