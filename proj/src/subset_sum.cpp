#include "opalg/subset_sum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "opalg/errors.hpp"

namespace opalg {

double subset_sum_modulus(std::span<const cplx> a, std::span<const std::size_t> subset) {
  cplx s{};
  for (std::size_t j : subset) {
    if (j == 0 || j > a.size()) throw ArgumentError("subset index outside the coefficient range");
    s += a[j - 1];
  }
  return std::abs(s);
}

double l1_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (cplx z : a) s += std::abs(z);
  return s;
}

double linf_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (cplx z : a) s = std::max(s, std::abs(z));
  return s;
}

SubsetSum best_subset_sum(std::span<const cplx> a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> critical;
  for (cplx z : a) {
    if (z == cplx{}) continue;
    const double phi = std::arg(z);
    for (double c : {phi + std::numbers::pi / 2, phi - std::numbers::pi / 2}) {
      double w = std::fmod(c, two_pi);
      if (w < 0) w += two_pi;
      critical.push_back(w);
    }
  }
  if (a.empty()) throw ArgumentError("best_subset_sum needs at least one coefficient");
  if (critical.empty()) return SubsetSum{{1}, 0.0};  // all zero; same tie-break as the brute force
  std::sort(critical.begin(), critical.end());

  SubsetSum best;
  best.value = -1.0;
  std::vector<std::size_t> current;
  for (std::size_t k = 0; k < critical.size(); ++k) {
    const double lo = critical[k];
    const double hi = k + 1 < critical.size() ? critical[k + 1] : critical.front() + two_pi;
    if (hi - lo <= 0.0) continue;
    const double theta = 0.5 * (lo + hi);
    const cplx rot = std::polar(1.0, -theta);
    current.clear();
    cplx s{};
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[j] * rot).real() > 0.0) {
        current.push_back(j + 1);
        s += a[j];
      }
    const double v = std::abs(s);
    if (v > best.value) {
      best.value = v;
      best.subset = current;
    }
  }
  return best;
}

namespace {

double mask_value(std::span<const cplx> a, std::uint64_t mask) {
  cplx s{};
  for (std::size_t j = 0; j < a.size(); ++j)
    if (mask & (std::uint64_t{1} << j)) s += a[j];
  return std::abs(s);
}

SubsetSum from_mask(std::span<const cplx> a, std::uint64_t mask, double value) {
  SubsetSum out;
  out.value = value;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (mask & (std::uint64_t{1} << j)) out.subset.push_back(j + 1);
  return out;
}

void check_size(std::span<const cplx> a) {
  if (a.empty()) throw ArgumentError("brute force over an empty sequence");
  if (a.size() > 24) throw ArgumentError("brute force limited to 24 coefficients");
}

}  // namespace

SubsetSum brute_force_subset_sum_serial(std::span<const cplx> a) {
  check_size(a);
  const std::uint64_t total = std::uint64_t{1} << a.size();
  double best = -1.0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    const double v = mask_value(a, mask);
    if (v > best) {
      best = v;
      best_mask = mask;
    }
  }
  return from_mask(a, best_mask, best);
}

SubsetSum brute_force_subset_sum_parallel(std::span<const cplx> a) {
  check_size(a);
  const auto total = static_cast<std::int64_t>(std::uint64_t{1} << a.size());
  double best = -1.0;
  std::uint64_t best_mask = 0;
#pragma omp parallel
  {
    double local = -1.0;
    std::uint64_t local_mask = 0;
#pragma omp for schedule(static) nowait
    for (std::int64_t m = 1; m < total; ++m) {
      const auto mask = static_cast<std::uint64_t>(m);
      const double v = mask_value(a, mask);
      if (v > local) {
        local = v;
        local_mask = mask;
      }
    }
#pragma omp critical(opalg_brute_force_merge)
    {
      if (local > best || (local == best && local_mask < best_mask)) {
        best = local;
        best_mask = local_mask;
      }
    }
  }
  return from_mask(a, best_mask, best);
}

}  // namespace opalg
