#include "opalg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "opalg/errors.hpp"
#include "opalg/norms.hpp"
#include "opalg/rng.hpp"
#include "opalg/subset_sum.hpp"
#include "opalg/tensor.hpp"

namespace opalg {

// ---------------------------------------------------------------------------
// configuration

Subcommand parse_subcommand(const std::string& s) {
  if (s == "chain") return Subcommand::chain;
  if (s == "generate") return Subcommand::generate;
  if (s == "diagonal") return Subcommand::diagonal;
  if (s == "embed") return Subcommand::embed;
  if (s == "all") return Subcommand::all;
  throw UsageError("subcommand", "unknown subcommand '" + s + "'");
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::chain: return "chain";
    case Subcommand::generate: return "generate";
    case Subcommand::diagonal: return "diagonal";
    case Subcommand::embed: return "embed";
    case Subcommand::all: return "all";
  }
  return "all";
}

OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "both") return OutputFormat::both;
  throw UsageError("format", "expected json, csv or both, got '" + s + "'");
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::both: return "both";
  }
  return "both";
}

TraceScheme parse_trace_scheme(const std::string& s) {
  if (s == "geometric") return TraceScheme::geometric;
  if (s == "uniform") return TraceScheme::uniform;
  throw UsageError("trace_scheme", "expected geometric or uniform, got '" + s + "'");
}

std::string to_string(TraceScheme t) { return t == TraceScheme::geometric ? "geometric" : "uniform"; }

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<QComplex> coupling_values(const std::string& scheme, std::size_t count) {
  std::vector<QComplex> b;
  if (scheme == "linear") {
    for (std::size_t k = 1; k <= count; ++k) b.emplace_back(static_cast<long>(k));
  } else if (scheme == "quadratic") {
    for (std::size_t k = 1; k <= count; ++k) b.emplace_back(static_cast<long>(k * k));
  } else if (scheme.rfind("constant:", 0) == 0) {
    const QComplex c = QComplex::parse(scheme.substr(9));
    b.assign(count, c);
  } else if (scheme.rfind("list:", 0) == 0) {
    for (const auto& item : split(scheme.substr(5), ',')) b.push_back(QComplex::parse(item));
    if (b.size() < count)
      throw UsageError("coupling_scheme", "list gives " + std::to_string(b.size()) + " couplings, " +
                                              std::to_string(count) + " needed");
    b.resize(count);
  } else {
    throw UsageError("coupling_scheme", "unknown scheme '" + scheme + "'");
  }
  return b;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto positive = [](std::size_t v, const char* field) {
    if (v == 0) throw UsageError(field, "must be positive");
  };
  positive(m_max, "m_max");
  positive(n_max, "n_max");
  positive(f_cap, "f_cap");
  positive(s_max, "s_max");
  positive(r_max, "r_max");
  positive(trials, "trials");
  if (r_max < 2) throw UsageError("r_max", "must be at least 2");
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw UsageError("tol", "must be finite and nonnegative");
  if (n_max > 24) throw UsageError("n_max", "at most 24 (brute-force cross-check)");
  try {
    validate_chain_spec(chain_spec_from_config(*this));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("coupling_scheme", e.what());
  }
  if (weight_scheme != "default" && weight_scheme.rfind("geometric:", 0) != 0)
    throw UsageError("weight_scheme", "expected default or geometric:<q>, got '" + weight_scheme + "'");
  if (weight_scheme.rfind("geometric:", 0) == 0) {
    try {
      (void)geometric_weights(1, parse_rational(weight_scheme.substr(10)));
    } catch (const std::exception& e) {
      throw UsageError("weight_scheme", e.what());
    }
  }
}

ChainSpec chain_spec_from_config(const ExperimentConfig& cfg) {
  return ChainSpec::scalar(cfg.m_max, coupling_values(cfg.coupling_scheme, cfg.m_max / 2));
}

WeightSeq weights_from_config(const ExperimentConfig& cfg, std::span<const Matrix> family) {
  if (cfg.weight_scheme == "default") return default_weights(family);
  return geometric_weights(family.size(), parse_rational(cfg.weight_scheme.substr(10)));
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig base) {
  if (!j.is_object()) throw UsageError("config", "top level must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "subcommand")
        base.subcommand = parse_subcommand(value.get<std::string>());
      else if (key == "m_max")
        base.m_max = value.get<std::size_t>();
      else if (key == "n_max")
        base.n_max = value.get<std::size_t>();
      else if (key == "f_cap")
        base.f_cap = value.get<std::size_t>();
      else if (key == "s_max")
        base.s_max = value.get<std::size_t>();
      else if (key == "r_max")
        base.r_max = value.get<std::size_t>();
      else if (key == "trials")
        base.trials = value.get<std::size_t>();
      else if (key == "seed")
        base.seed = value.get<std::uint64_t>();
      else if (key == "tol")
        base.tol = value.get<double>();
      else if (key == "coupling_scheme")
        base.coupling_scheme = value.get<std::string>();
      else if (key == "weight_scheme")
        base.weight_scheme = value.get<std::string>();
      else if (key == "trace_scheme")
        base.trace_scheme = parse_trace_scheme(value.get<std::string>());
      else if (key == "out_dir")
        base.out_dir = value.get<std::string>();
      else if (key == "format")
        base.format = parse_format(value.get<std::string>());
      else if (key == "parallel")
        base.parallel = value.get<bool>();
      else
        throw UsageError(key, "unknown configuration key");
    } catch (const json::exception& e) {
      throw UsageError(key, e.what());
    }
  }
  return base;
}

json config_to_json(const ExperimentConfig& cfg) {
  return json{{"subcommand", to_string(cfg.subcommand)},
              {"m_max", cfg.m_max},
              {"n_max", cfg.n_max},
              {"f_cap", cfg.f_cap},
              {"s_max", cfg.s_max},
              {"r_max", cfg.r_max},
              {"trials", cfg.trials},
              {"seed", cfg.seed},
              {"tol", cfg.tol},
              {"coupling_scheme", cfg.coupling_scheme},
              {"weight_scheme", cfg.weight_scheme},
              {"trace_scheme", to_string(cfg.trace_scheme)},
              {"format", to_string(cfg.format)},
              {"parallel", cfg.parallel}};
}

// ---------------------------------------------------------------------------
// stages

namespace {

struct StageBuilder {
  StageResult stage;

  explicit StageBuilder(std::string name) { stage.name = std::move(name); }

  void check(std::string name, std::string anchor, std::string expected, double observed,
             std::optional<double> bound, bool pass) {
    stage.checks.push_back({std::move(name), std::move(anchor), std::move(expected), observed, bound, pass});
  }
};

Tolerance approx_tol(const ExperimentConfig& cfg) {
  return cfg.tol > 0.0 ? Tolerance::approx(cfg.tol) : Tolerance::exact();
}

void run_chain_stage(const ExperimentConfig& cfg, StageBuilder& sb, RunReport& report) {
  const Chain chain = build_chain(chain_spec_from_config(cfg));
  const std::size_t m = chain.m_max();

  const SemilatticeReport semi = cfg.parallel ? verify_semilattice(chain, approx_tol(cfg))
                                              : verify_semilattice_serial(chain, approx_tol(cfg));
  sb.check("semilattice", "e_m e_n = e_min(m,n) for all ordered pairs",
           std::to_string(semi.pairs_checked) + " exact products, 0 failures",
           static_cast<double>(semi.failures.size()), 0.0, chain.is_exact() ? semi.all_exact : semi.all_pass);

  std::size_t not_idempotent = 0;
  for (std::size_t n = 1; n <= m; ++n)
    if (!is_idempotent(chain.e(n), chain.is_exact() ? Tolerance::exact() : approx_tol(cfg))) ++not_idempotent;
  sb.check("idempotent", "e_n^2 = e_n", "0 failures", static_cast<double>(not_idempotent), 0.0, not_idempotent == 0);

  const NormProfile profile = norm_profile(chain, cfg.tol);
  double odd_dev = 0.0;
  for (const auto& e : profile.entries)
    if (e.index % 2 == 1) odd_dev = std::max(odd_dev, std::abs(e.norm - 1.0));
  sb.check("odd_norms", "||e_{2k-1}|| = 1", "deviation <= tol", odd_dev, cfg.tol, odd_dev <= cfg.tol);

  for (const auto& e : profile.entries) {
    if (e.index % 2 == 1) continue;
    const std::size_t k = e.index / 2;
    sb.check("even_norm_lower_bound_k" + std::to_string(k), "||e_{2k}|| >= ||b_{2k}||", "norm >= |b_2k|", e.norm,
             e.bound, e.pass);
    const Matrix& b = chain.spec().couplings[k - 1];
    if (b.rows() == 1 && b.cols() == 1) {
      const double closed = std::sqrt(1.0 + std::norm(b.at(0, 0)));
      const double dev = std::abs(e.norm - closed);
      sb.check("even_norm_closed_form_k" + std::to_string(k), "||e_{2k}|| = sqrt(1 + |b_{2k}|^2), scalar coupling",
               "|norm - sqrt(1+b^2)| <= 1e-8", dev, 1e-8, dev <= 1e-8);
    }
  }

  ChainSpec padded = chain.spec();
  padded.truncation_dim = chain.truncation_dim() + 3;
  const NormProfile padded_profile = norm_profile(build_chain(padded), cfg.tol);
  double pad_dev = 0.0;
  for (std::size_t k = 0; k < profile.entries.size(); ++k)
    pad_dev = std::max(pad_dev, std::abs(profile.entries[k].norm - padded_profile.entries[k].norm));
  sb.check("truncation_invariance", "norm profile unchanged by zero padding", "max deviation <= 1e-9", pad_dev, 1e-9,
           pad_dev <= 1e-9);

  sb.stage.details = {{"truncation_dim", chain.truncation_dim()},
                      {"norm_profile", norm_profile_to_json(profile)},
                      {"chain", chain_to_json(chain)}};
  report.norm_profile = profile;
}

void run_generate_stage(const ExperimentConfig& cfg, StageBuilder& sb, RunReport& report) {
  const Chain chain = build_chain(chain_spec_from_config(cfg));
  const std::vector<Matrix> atoms = orthogonal_atoms(chain);
  const WeightSeq w = weights_from_config(cfg, atoms);
  const auto r_max = static_cast<unsigned>(cfg.r_max);
  const Tolerance tol = approx_tol(cfg);

  std::size_t orth_fail = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const Matrix p = atoms[i] * atoms[j];
      const bool ok = i == j ? p == atoms[i] : p.is_zero();
      if (!ok) ++orth_fail;
    }
  sb.check("atoms_orthogonal", "f_i f_j = delta_ij f_j for f_1 = e_1, f_j = e_j - e_{j-1}", "0 failures",
           static_cast<double>(orth_fail), 0.0, orth_fail == 0);

  const GenerationCertificate cert = cfg.parallel ? certify_generation(atoms, w, r_max, tol)
                                                  : certify_generation_serial(atoms, w, r_max, tol);
  for (const auto& v : cert.verdicts) {
    double worst = -std::numeric_limits<double>::infinity();
    double worst_rel = 0.0;
    for (const auto& rec : cert.records)
      if (rec.m == v.m) {
        worst = std::max(worst, rec.residual - rec.bound);
        if (rec.bound > 0.0) worst_rel = std::max(worst_rel, rec.residual / rec.bound);
      }
    sb.check("generation_rate_m" + std::to_string(v.m),
             "||f_m - (b_m/lambda_m)^r|| <= (1/lambda_m)(lambda_{m+1}/lambda_m)^{r-1} sum_{j>m} lambda_j ||f_j||",
             "residual <= bound for every r, non-increasing tail", worst_rel, 1.0, v.passed);
  }

  // two orthogonal rank-one projections, lambda = (1/2, 1/4): residual 2^-r
  {
    const std::vector<Matrix> pair{Matrix::unit(2, 0, 0), Matrix::unit(2, 1, 1)};
    const WeightSeq half({mpq_class(1, 2), mpq_class(1, 4)});
    const GenerationCertificate c2 = certify_generation_serial(pair, half, r_max, tol);
    double dev = 0.0;
    for (const auto& rec : c2.records)
      if (rec.m == 1) dev = std::max(dev, std::abs(rec.residual - std::ldexp(1.0, -static_cast<int>(rec.r))));
    sb.check("two_projection_rate", "||e_1 - (2b)^r|| = 2^-r", "|residual - 2^-r| <= 1e-10", dev, 1e-10,
             dev <= 1e-10 && c2.passed);
  }

  // span of the recovered limits equals span{e_1..e_m}
  {
    const std::size_t n = chain.truncation_dim();
    const std::size_t count = atoms.size();
    Matrix limits(count, n * n, Backend::floating), es(count, n * n, Backend::floating),
        both(2 * count, n * n, Backend::floating);
    for (std::size_t mi = 1; mi <= count; ++mi) {
      const Matrix lim = recovery_powers(atoms, w, mi, r_max).back();
      for (std::size_t k = 0; k < n * n; ++k) {
        limits.set(mi - 1, k, lim.at(k / n, k % n));
        es.set(mi - 1, k, chain.e(mi).at(k / n, k % n));
        both.set(mi - 1, k, lim.at(k / n, k % n));
        both.set(count + mi - 1, k, chain.e(mi).at(k / n, k % n));
      }
    }
    const std::size_t r1 = numerical_rank(limits, 1e-8), r2 = numerical_rank(es, 1e-8),
                      r3 = numerical_rank(both, 1e-8);
    sb.check("span_recovery", "span of recovered idempotents = span{e_1..e_m}", "equal ranks",
             static_cast<double>(r3), static_cast<double>(r2), r1 == r2 && r2 == r3 && r2 == count);
  }

  // scaling every weight leaves residuals unchanged
  {
    const GenerationCertificate scaled = certify_generation_serial(atoms, w.scaled(mpq_class(3, 7)), r_max, tol);
    double dev = 0.0;
    for (std::size_t k = 0; k < cert.records.size(); ++k)
      dev = std::max(dev, std::abs(cert.records[k].residual - scaled.records[k].residual));
    sb.check("weight_scale_invariance", "b_m / lambda_m is invariant under rescaling all weights",
             "identical residuals", dev, 0.0, dev == 0.0);
  }

  json weights = json::array();
  for (const auto& l : w.values()) weights.push_back(l.get_str());
  sb.stage.details = {{"weights", weights}, {"certificate", generation_to_json(cert)}};
  report.generation = cert;
}

void run_diagonal_stage(const ExperimentConfig& cfg, StageBuilder& sb) {
  const Chain chain = build_chain(chain_spec_from_config(cfg));
  const std::size_t m = chain.m_max();
  const std::size_t n = chain.truncation_dim();
  const Matrix one = Matrix::identity(n);

  std::vector<TensorElem> deltas;
  for (std::size_t k = 1; k <= m; ++k) deltas.push_back(build_delta(chain, k));

  std::size_t pi_fail = 0, unit_fail = 0, comm_fail = 0, bracket_fail = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    const Matrix u = pi_map(deltas[k - 1]);
    if (!(u == chain.e(k))) ++pi_fail;
    try {
      if (!(pi_map(unitize_diagonal(deltas[k - 1], u, one)) == one)) ++unit_fail;
    } catch (const std::exception&) {
      ++unit_fail;
    }
    for (std::size_t j = 1; j <= m; ++j)
      if (!flatten(bimodule_commutator(chain.e(j), deltas[k - 1])).is_zero()) ++comm_fail;
  }
  for (std::size_t k = 1; k <= std::min<std::size_t>(m, 4); ++k) {
    const NormBounds nb = tensor_norm_bounds(deltas[k - 1]);
    if (nb.lower > nb.upper + cfg.tol) ++bracket_fail;
  }
  sb.check("pi_delta", "pi(Delta_n) = e_n", "0 failures", static_cast<double>(pi_fail), 0.0, pi_fail == 0);
  sb.check("delta_commutes", "a.Delta_n = Delta_n.a for a = e_m", std::to_string(m * m) + " exact zero flattenings",
           static_cast<double>(comm_fail), 0.0, comm_fail == 0);
  sb.check("unitized_pi", "pi(M_n) = id for M_n = 2 Delta_n - u_n.Delta_n + (id-u_n)(x)(id-u_n)", "0 failures",
           static_cast<double>(unit_fail), 0.0, unit_fail == 0);
  sb.check("tensor_bounds_bracket", "||flatten(t)|| <= sum ||u_i|| ||v_i||", "lower <= upper",
           static_cast<double>(bracket_fail), 0.0, bracket_fail == 0);

  std::vector<SampleElement> sample;
  for (std::size_t k = 1; k <= m; ++k) sample.push_back({"e_" + std::to_string(k), chain.e(k), QComplex()});
  sample.push_back({"zero", Matrix::zeros(n, n), QComplex()});
  {
    const auto coeffs = sample_rational_coefficients(m + 1, derive_seed(cfg.seed, "diagonal.sample"), 0);
    Matrix mix = Matrix::zeros(n, n);
    for (std::size_t k = 1; k <= m; ++k) mix += coeffs[k - 1] * chain.e(k);
    sample.push_back({"random_combination_plus_identity", mix, coeffs[m]});
  }
  Matrix shift(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) shift.set(i, i + 1, QComplex(1));
  sample.push_back({"shift_outside_algebra", shift, QComplex()});

  const MbadReport mbad = certify_mbad(deltas, chain, sample);
  sb.check("mbad_conditions", "approximate identity, commutation, multiplier bound; unitized estimates",
           "every in-span sample element passes", mbad.verdict ? 1.0 : 0.0, 1.0, mbad.verdict);
  sb.check("multiplier_constant", "sup_n ||a.Delta_n - Delta_n.a|| <= C ||a||", "C = 0", mbad.C, 0.0, mbad.C == 0.0);
  sb.check("out_of_span_flagged", "non-algebra elements are flagged", "shift flagged",
           mbad.records.back().in_span ? 1.0 : 0.0, 0.0, !mbad.records.back().in_span);

  // expectation from an exact diagonal of M_2: E(x) = x_11 I
  {
    const FiniteDiagonal d = matrix_algebra_diagonal(2);
    const DiagonalCheck dc = check_diagonal(d);
    const auto xs_q = sample_rational_coefficients(4, derive_seed(cfg.seed, "diagonal.expectation"), 0);
    const Matrix x(2, 2, std::vector<QComplex>(xs_q.begin(), xs_q.end()));
    const Matrix ex = expectation_from_diagonal(d, x);
    const bool scalar = ex == xs_q[0] * Matrix::identity(2);
    const ExpectationReport er = certify_expectation(d, {x}, {Matrix::identity(2), QComplex(3) * Matrix::identity(2)});
    sb.check("matrix_algebra_expectation", "E(x) in the commutant, E fixes the commutant, bimodule property",
             "E(x) = x_11 I", scalar ? 1.0 : 0.0, 1.0,
             scalar && er.pass && dc.pi_is_identity_on_algebra && dc.commutes_with_algebra);
  }

  for (long t : {1L, 10L, 100L}) {
    const FiniteDiagonal d = skew_idempotent_diagonal(QComplex(t));
    const Matrix& e = d.algebra_basis[1];
    const Matrix p = Matrix::unit(2, 0, 0);
    const auto steps = expectation_chain(d, e, p);
    const bool chain_ok = std::all_of(steps.begin(), steps.end(), [&](const Matrix& s) { return s == e; });
    const double norm_dev = std::abs(op_norm(e) - std::sqrt(1.0 + static_cast<double>(t * t)));
    const DiagonalCheck dc = check_diagonal(d);
    const Matrix id = Matrix::identity(2);
    const ExpectationReport er = certify_expectation(d, {p, Matrix::from_rows({{2, -1}, {5, 3}})}, {id, e, id - e});
    sb.check("skew_expectation_t" + std::to_string(t), "E(p) = E(ep) = eE(p) = E(p)e = E(pe) = E(e) = e",
             "chain exact, ||e|| = sqrt(1+t^2) within 1e-8", norm_dev, 1e-8,
             chain_ok && norm_dev <= 1e-8 && er.pass && dc.pi_is_identity_on_algebra && dc.commutes_with_algebra);
  }

  sb.stage.details = {{"mbad", mbad_to_json(mbad)}};
}

void run_embed_stage(const ExperimentConfig& cfg, StageBuilder& sb, RunReport& report) {
  const RankOneFamily fam(cfg.n_max);
  const EFamilyReport ef = certify_E_family(fam, cfg.trials, derive_seed(cfg.seed, "embed.witness"), cfg.tol);
  sb.check("E_family", "E_n^2 = E_n, E_j E_k = 0, ||E_n|| = 3, ranges in span(e_alpha, e_omega, e_n), omega witness",
           "all exact; ||E_n|| - 3 within tol", ef.max_norm_deviation, cfg.tol, ef.pass);

  // sweep vs exhaustive search
  {
    const std::uint64_t s = derive_seed(cfg.seed, "embed.sweep");
    const std::size_t cap = std::min<std::size_t>(cfg.n_max, 16);
    std::size_t mismatches = 0, below = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const auto a = sample_coefficients(1 + t % cap, s, t);
      const SubsetSum sweep = best_subset_sum(a);
      const SubsetSum brute =
          cfg.parallel ? brute_force_subset_sum_parallel(a) : brute_force_subset_sum_serial(a);
      const double dev = std::abs(sweep.value - brute.value) / std::max(1.0, brute.value);
      worst = std::max(worst, dev);
      if (dev > 1e-12) ++mismatches;
      if (sweep.value < l1_norm(a) / std::numbers::pi) ++below;
    }
    sb.check("sweep_equals_brute_force", "half-plane sweep attains max_F |sum_F a_j|", "relative gap <= 1e-12",
             worst, 1e-12, mismatches == 0);
    sb.check("subset_sum_lower_bound", "max_F |sum_F a_j| >= ||a||_1 / pi", "0 violations",
             static_cast<double>(below), 0.0, below == 0);
  }

  // roots of unity approach 1/pi from above
  {
    double previous = std::numeric_limits<double>::infinity();
    bool ok = true;
    json ratios = json::array();
    for (std::size_t n : {8u, 16u, 32u, 64u}) {
      std::vector<cplx> a(n);
      for (std::size_t j = 0; j < n; ++j) a[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / n);
      const double ratio = best_subset_sum(a).value / l1_norm(a);
      const double closed = 1.0 / (static_cast<double>(n) * std::sin(std::numbers::pi / static_cast<double>(n)));
      ok = ok && ratio > 1.0 / std::numbers::pi && ratio < previous && std::abs(ratio - closed) <= 1e-12;
      previous = ratio;
      ratios.push_back({{"n", n}, {"ratio", ratio}});
    }
    sb.check("roots_of_unity_ratio", "ratio 1/(n sin(pi/n)) decreases to 1/pi", "strictly decreasing, > 1/pi",
             previous, 1.0 / std::numbers::pi, ok);
    sb.stage.details["roots_of_unity"] = ratios;
  }

  const std::uint64_t s_coeff = derive_seed(cfg.seed, "embed.coefficients");
  const EmbeddingReport er = cfg.parallel ? certify_embedding_bounds(cfg.n_max, cfg.f_cap, cfg.s_max, cfg.trials, s_coeff)
                                          : certify_embedding_bounds_serial(cfg.n_max, cfg.f_cap, cfg.s_max, cfg.trials,
                                                                            s_coeff);
  bool lower = true, upper = true, trace = true, below_sup = true;
  for (const auto& t : er.trials) {
    lower = lower && t.lower_ok;
    upper = upper && t.upper_ok;
    trace = trace && t.trace_ok;
    below_sup = below_sup && t.trace_below_sup;
  }
  sb.check("embedding_lower_bound", "||phi(a)|| >= (1/pi) ||a||_1", "min ratio >= 1/pi", er.min_ratio,
           1.0 / std::numbers::pi, lower);
  sb.check("embedding_upper_bound", "||phi(a)|| <= 3 ||a||_1", "max ratio <= 3", er.max_ratio, 3.0, upper);
  sb.check("trace_norm_bound", "||phi(a)||_{L1(tau)} <= 3 ||a||_inf, geometric and uniform traces",
           "max ratio <= 3", er.max_trace_ratio, 3.0, trace);
  sb.check("trace_below_sup", "||phi(a)||_{L1(tau)} <= sup_F ||phi(a)_F||", "every trial", below_sup ? 1.0 : 0.0, 1.0,
           below_sup);

  {
    double dev = 0.0;
    for (std::size_t j = 1; j <= cfg.n_max; ++j) {
      std::vector<cplx> delta(cfg.n_max);
      delta[j - 1] = 1.0;
      dev = std::max(dev, std::abs(certify_embedding_trial(delta, cfg.f_cap, cfg.s_max).ratio - 3.0));
    }
    sb.check("upper_bound_tight", "||phi(delta_j)|| = 3", "|ratio - 3| <= 1e-9", dev, 1e-9, dev <= 1e-9);
  }

  {
    const SubsetFamily subsets = SubsetFamily::canonical(cfg.n_max, cfg.f_cap, cfg.s_max);
    const std::uint64_t s = derive_seed(cfg.seed, "embed.multiplicative");
    std::size_t failures = 0;
    const std::size_t rational_trials = std::min<std::size_t>(cfg.trials, 20);
    for (std::size_t t = 0; t < rational_trials; ++t) {
      const auto a = sample_rational_coefficients(cfg.n_max, s, 2 * t);
      const auto b = sample_rational_coefficients(cfg.n_max, s, 2 * t + 1);
      std::vector<QComplex> ab(cfg.n_max);
      for (std::size_t j = 0; j < cfg.n_max; ++j) ab[j] = a[j] * b[j];
      const auto prod = block_product(phi(a, subsets), phi(b, subsets));
      const EmbeddedElement direct = phi(ab, subsets);
      for (std::size_t k = 0; k < prod.size(); ++k)
        if (!(prod[k] == direct.blocks[k])) ++failures;
    }
    sb.check("embedding_multiplicative", "phi(a) phi(b) = phi(a b) blockwise",
             std::to_string(rational_trials) + " exact rational trials, 0 failing blocks",
             static_cast<double>(failures), 0.0, failures == 0);
  }

  sb.stage.details["E_family"] = {{"max_norm_deviation", ef.max_norm_deviation},
                                  {"witness_trials", ef.witness_trials},
                                  {"pass", ef.pass}};
  sb.stage.details["embedding"] = {{"min_ratio", er.min_ratio},
                                   {"max_ratio", er.max_ratio},
                                   {"max_trace_ratio", er.max_trace_ratio},
                                   {"trace_scheme_reported", to_string(cfg.trace_scheme)},
                                   {"pass", er.pass}};
  report.embedding = er;
}

template <typename Fn>
StageResult timed_stage(const std::string& name, Fn&& fn) {
  StageBuilder sb(name);
  const auto start = std::chrono::steady_clock::now();
  try {
    fn(sb);
  } catch (const std::exception& e) {
    sb.check("stage_error", "stage completed", "no exception", 1.0, 0.0, false);
    sb.stage.details["error"] = e.what();
  }
  sb.stage.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  sb.stage.pass = !sb.stage.checks.empty() &&
                  std::all_of(sb.stage.checks.begin(), sb.stage.checks.end(), [](const CheckRecord& c) { return c.pass; });
  return std::move(sb.stage);
}

json check_to_json(const CheckRecord& c) {
  json j{{"name", c.name}, {"anchor", c.anchor}, {"expected", c.expected}, {"observed", c.observed}};
  j["bound"] = c.bound ? json(*c.bound) : json(nullptr);
  j["pass"] = c.pass;
  return j;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunReport report;
  report.config = cfg;
  const bool all = cfg.subcommand == Subcommand::all;
  if (all || cfg.subcommand == Subcommand::chain)
    report.stages.push_back(timed_stage("chain", [&](StageBuilder& sb) { run_chain_stage(cfg, sb, report); }));
  if (all || cfg.subcommand == Subcommand::generate)
    report.stages.push_back(timed_stage("generate", [&](StageBuilder& sb) { run_generate_stage(cfg, sb, report); }));
  if (all || cfg.subcommand == Subcommand::diagonal)
    report.stages.push_back(timed_stage("diagonal", [&](StageBuilder& sb) { run_diagonal_stage(cfg, sb); }));
  if (all || cfg.subcommand == Subcommand::embed)
    report.stages.push_back(timed_stage("embed", [&](StageBuilder& sb) { run_embed_stage(cfg, sb, report); }));
  report.pass = std::all_of(report.stages.begin(), report.stages.end(), [](const StageResult& s) { return s.pass; });
  return report;
}

json RunReport::payload() const {
  json j;
  j["schema_version"] = 1;
  j["config"] = config_to_json(config);
  j["pass"] = pass;
  json verdicts = json::object();
  for (const auto& s : stages) verdicts[s.name] = s.pass;
  j["verdicts"] = std::move(verdicts);
  json st = json::array();
  for (const auto& s : stages) {
    json checks = json::array();
    for (const auto& c : s.checks) checks.push_back(check_to_json(c));
    st.push_back({{"name", s.name}, {"pass", s.pass}, {"checks", std::move(checks)}, {"details", s.details}});
  }
  j["stages"] = std::move(st);
  return j;
}

json RunReport::metadata() const {
  json seconds = json::object();
  for (const auto& s : stages) seconds[s.name] = s.seconds;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return json{{"stage_seconds", std::move(seconds)}, {"generated_at", buf}, {"out_dir", config.out_dir.string()}};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

constexpr const char* kSeriesReadme =
    "norm_profile.csv          index,norm,bound,pass\n"
    "  index: n of e_n; norm: operator norm; bound: 1 (odd n, equality) or |b_n| (even n, lower bound)\n"
    "generation_residuals.csv  m,r,residual,bound,passed\n"
    "  residual: ||f_m - (b_m/lambda_m)^r||; bound: the geometric-rate bound for that (m, r)\n"
    "embedding_ratios.csv      trial,l1_norm,sup_norm,ratio,trace_norm,trace_norm_uniform,witness_ratio\n"
    "  sup_norm: max_F ||phi(a)_F||; ratio: sup_norm/l1_norm; trace_norm: L1(tau) norm, geometric weights;\n"
    "  witness_ratio: max_F |sum_F a_j| / l1_norm\n";

}  // namespace

std::vector<std::filesystem::path> emit_report(const RunReport& r, OutputFormat format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(r.config.out_dir, ec);
  if (ec || !fs::is_directory(r.config.out_dir))
    throw std::runtime_error("cannot create output directory " + r.config.out_dir.string());

  std::vector<fs::path> written;
  if (format == OutputFormat::json || format == OutputFormat::both) {
    const json doc{{"payload", r.payload()}, {"metadata", r.metadata()}};
    const fs::path p = r.config.out_dir / "report.json";
    write_file(p, doc.dump(2) + "\n");
    written.push_back(p);
  }
  if (format == OutputFormat::csv || format == OutputFormat::both) {
    if (r.norm_profile) {
      const fs::path p = r.config.out_dir / "norm_profile.csv";
      write_file(p, norm_profile_csv(*r.norm_profile));
      written.push_back(p);
    }
    if (r.generation) {
      const fs::path p = r.config.out_dir / "generation_residuals.csv";
      write_file(p, generation_csv(*r.generation));
      written.push_back(p);
    }
    if (r.embedding) {
      const fs::path p = r.config.out_dir / "embedding_ratios.csv";
      write_file(p, embedding_csv(*r.embedding));
      written.push_back(p);
    }
    const fs::path p = r.config.out_dir / "SERIES.txt";
    write_file(p, kSeriesReadme);
    written.push_back(p);
  }
  return written;
}

}  // namespace opalg
