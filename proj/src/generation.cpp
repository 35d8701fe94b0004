#include "opalg/generation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "opalg/errors.hpp"
#include "opalg/norms.hpp"

namespace opalg {

WeightSeq::WeightSeq(std::vector<mpq_class> lambdas) : lambdas_(std::move(lambdas)) {
  for (std::size_t j = 0; j < lambdas_.size(); ++j) {
    lambdas_[j].canonicalize();
    if (sgn(lambdas_[j]) <= 0) throw PreconditionError("weight lambda_" + std::to_string(j + 1) + " is not positive");
    if (j > 0 && !(lambdas_[j] < lambdas_[j - 1]))
      throw PreconditionError("weights must be strictly decreasing at lambda_" + std::to_string(j + 1));
  }
}

WeightSeq WeightSeq::scaled(const mpq_class& factor) const {
  if (sgn(factor) <= 0) throw ArgumentError("weight scale must be positive");
  std::vector<mpq_class> out = lambdas_;
  for (auto& l : out) l *= factor;
  return WeightSeq(std::move(out));
}

std::vector<Matrix> orthogonal_atoms(const Chain& c) {
  std::vector<Matrix> atoms;
  atoms.reserve(c.m_max());
  for (std::size_t n = 1; n <= c.m_max(); ++n) atoms.push_back(n == 1 ? c.e(1) : c.e(n) - c.e(n - 1));
  return atoms;
}

WeightSeq default_weights(std::span<const Matrix> family) {
  std::vector<mpq_class> lambdas;
  double running_max = 0.0;
  mpz_class four_pow = 1;
  for (std::size_t j = 0; j < family.size(); ++j) {
    running_max = std::max(running_max, op_norm(family[j]));
    four_pow *= 4;
    const mpz_class denom = four_pow * (1 + static_cast<long>(std::ceil(running_max)));
    lambdas.emplace_back(mpz_class(1), denom);
  }
  return WeightSeq(std::move(lambdas));
}

WeightSeq geometric_weights(std::size_t count, const mpq_class& ratio) {
  if (!(sgn(ratio) > 0 && ratio < 1)) throw ArgumentError("geometric weight ratio must lie in (0, 1)");
  std::vector<mpq_class> lambdas;
  mpq_class l = 1;
  for (std::size_t j = 0; j < count; ++j) {
    l *= ratio;
    lambdas.push_back(l);
  }
  return WeightSeq(std::move(lambdas));
}

Matrix single_generator(std::span<const Matrix> family, const WeightSeq& w) {
  if (family.empty()) throw ArgumentError("empty idempotent family");
  if (w.size() != family.size())
    throw ArgumentError("weight count " + std::to_string(w.size()) + " differs from family size " +
                        std::to_string(family.size()));
  Matrix b = Matrix::zeros(family[0].rows(), family[0].cols(), family[0].backend());
  for (std::size_t j = 0; j < family.size(); ++j) b += QComplex(w[j]) * family[j];
  return b;
}

namespace {

// b_m / lambda_m, built from the full generator b as the construction prescribes.
Matrix scaled_residual_generator(std::span<const Matrix> family, const WeightSeq& w, const Matrix& b,
                                 std::size_t m) {
  Matrix bm = b;
  for (std::size_t j = 1; j < m; ++j) bm -= QComplex(w[j - 1]) * family[j - 1];
  const mpq_class inv = 1 / w[m - 1];
  bm *= QComplex(inv);
  return bm;
}

struct PerM {
  std::vector<ResidualRecord> records;
  RecoveryVerdict verdict;
};

PerM certify_one(std::span<const Matrix> family, const WeightSeq& w, const Matrix& b, std::span<const double> norms,
                 std::size_t m, unsigned r_max, const Tolerance& tol) {
  const std::size_t count = family.size();
  const Matrix x = scaled_residual_generator(family, w, b, m);
  const Matrix& target = family[m - 1];

  double tail_sum = 0.0;
  for (std::size_t j = m + 1; j <= count; ++j) tail_sum += w[j - 1].get_d() * norms[j - 1];
  const double lambda_m = w[m - 1].get_d();
  const double ratio = m < count ? mpq_class(w[m] / w[m - 1]).get_d() : 0.0;

  PerM out;
  out.verdict.m = m;
  out.verdict.within_bound = true;
  out.verdict.exact_recovery = true;
  Matrix xr = x;
  for (unsigned r = 1; r <= r_max; ++r) {
    if (r > 1) xr = xr * x;
    const Matrix diff = target - xr;
    ResidualRecord rec;
    rec.m = m;
    rec.r = r;
    rec.residual = diff.is_zero() ? 0.0 : op_norm(diff);
    rec.bound = tail_sum == 0.0 ? 0.0 : std::pow(ratio, static_cast<double>(r - 1)) * tail_sum / lambda_m;
    if (tail_sum == 0.0 && diff.is_exact())
      rec.passed = diff.is_zero();
    else
      rec.passed = rec.residual <= rec.bound + tol.abs_tol();
    out.verdict.within_bound = out.verdict.within_bound && rec.passed;
    out.verdict.exact_recovery = out.verdict.exact_recovery && diff.is_exact() && diff.is_zero();
    out.records.push_back(rec);
  }

  // non-increasing over the last ceil(r_max/2) powers
  const std::size_t tail = (r_max + 1) / 2;
  out.verdict.monotone_tail = true;
  for (std::size_t k = out.records.size() - tail + 1; k < out.records.size(); ++k) {
    const double prev = out.records[k - 1].residual;
    if (out.records[k].residual > prev * (1.0 + 1e-12)) out.verdict.monotone_tail = false;
  }
  out.verdict.passed = out.verdict.within_bound && out.verdict.monotone_tail;
  return out;
}

void check_inputs(std::span<const Matrix> family, const WeightSeq& w, unsigned r_max) {
  if (r_max < 2) throw PreconditionError("r_max must be at least 2");
  if (family.empty()) throw ArgumentError("empty idempotent family");
  if (w.size() != family.size())
    throw ArgumentError("weight count " + std::to_string(w.size()) + " differs from family size " +
                        std::to_string(family.size()));
}

GenerationCertificate merge(std::vector<PerM> parts) {
  GenerationCertificate cert;
  cert.passed = true;
  for (auto& p : parts) {
    cert.records.insert(cert.records.end(), p.records.begin(), p.records.end());
    cert.passed = cert.passed && p.verdict.passed;
    cert.verdicts.push_back(p.verdict);
  }
  return cert;
}

std::vector<double> family_norms(std::span<const Matrix> family) {
  std::vector<double> norms;
  norms.reserve(family.size());
  for (const auto& f : family) norms.push_back(op_norm(f));
  return norms;
}

}  // namespace

GenerationCertificate certify_generation_serial(std::span<const Matrix> family, const WeightSeq& w, unsigned r_max,
                                                const Tolerance& tol) {
  check_inputs(family, w, r_max);
  const Matrix b = single_generator(family, w);
  const auto norms = family_norms(family);
  std::vector<PerM> parts;
  for (std::size_t m = 1; m <= family.size(); ++m) parts.push_back(certify_one(family, w, b, norms, m, r_max, tol));
  return merge(std::move(parts));
}

GenerationCertificate certify_generation(std::span<const Matrix> family, const WeightSeq& w, unsigned r_max,
                                         const Tolerance& tol) {
  check_inputs(family, w, r_max);
  const Matrix b = single_generator(family, w);
  const auto norms = family_norms(family);
  std::vector<PerM> parts(family.size());
  const auto count = static_cast<std::ptrdiff_t>(family.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto m = static_cast<std::size_t>(k) + 1;
    parts[m - 1] = certify_one(family, w, b, norms, m, r_max, tol);
  }
  return merge(std::move(parts));
}

std::vector<Matrix> recovery_powers(std::span<const Matrix> family, const WeightSeq& w, std::size_t m,
                                    unsigned r_max) {
  if (m == 0 || m > family.size()) throw ArgumentError("recovery index out of range");
  const Matrix b = single_generator(family, w);
  const Matrix x = scaled_residual_generator(family, w, b, m);
  std::vector<Matrix> out;
  Matrix xr = x;
  for (unsigned r = 1; r <= r_max; ++r) {
    if (r > 1) xr = xr * x;
    out.push_back(xr);
  }
  return out;
}

}  // namespace opalg
