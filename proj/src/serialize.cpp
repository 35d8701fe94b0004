#include "opalg/serialize.hpp"

#include <charconv>
#include <sstream>

#include "opalg/errors.hpp"

namespace opalg {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["backend"] = m.is_exact() ? "exact" : "float";
  json entries = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < m.cols(); ++k) {
      if (m.is_exact())
        entries.push_back(m.q(i, k).to_string());
      else
        entries.push_back(json::array({m.at(i, k).real(), m.at(i, k).imag()}));
    }
  j["entries"] = std::move(entries);
  return j;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto& entries = j.at("entries");
  if (entries.size() != rows * cols) throw DimensionError("matrix JSON entry count mismatch");
  if (j.at("backend").get<std::string>() == "exact") {
    std::vector<QComplex> q;
    q.reserve(entries.size());
    for (const auto& e : entries) q.push_back(QComplex::parse(e.get<std::string>()));
    return Matrix(rows, cols, std::move(q));
  }
  std::vector<cplx> f;
  f.reserve(entries.size());
  for (const auto& e : entries) f.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return Matrix(rows, cols, std::move(f));
}

json chain_to_json(const Chain& c) {
  const ChainSpec& spec = c.spec();
  json j;
  j["schema"] = "opalg.chain/1";
  json s;
  s["m_max"] = spec.m_max;
  json dims = json::array();
  for (std::size_t n = 1; n <= spec.required_index(); ++n) dims.push_back(spec.dim(n));
  s["dims"] = std::move(dims);
  json couplings = json::array();
  for (std::size_t k = 0; k < spec.coupling_count(); ++k) couplings.push_back(matrix_to_json(spec.couplings[k]));
  s["couplings"] = std::move(couplings);
  s["truncation_dim"] = c.truncation_dim();
  j["spec"] = std::move(s);
  json es = json::array();
  for (const auto& e : c.idempotents()) es.push_back(matrix_to_json(e));
  j["idempotents"] = std::move(es);
  return j;
}

Chain chain_from_json(const json& j) {
  const auto& s = j.at("spec");
  ChainSpec spec;
  spec.m_max = s.at("m_max").get<std::size_t>();
  spec.dims = s.at("dims").get<std::vector<std::size_t>>();
  for (const auto& b : s.at("couplings")) spec.couplings.push_back(matrix_from_json(b));
  spec.truncation_dim = s.at("truncation_dim").get<std::size_t>();
  Chain c = build_chain(spec);
  if (j.contains("idempotents")) {
    const auto& stored = j.at("idempotents");
    if (stored.size() != c.m_max()) throw ArgumentError("chain JSON idempotent count mismatch");
    for (std::size_t n = 1; n <= c.m_max(); ++n)
      if (!(matrix_from_json(stored[n - 1]) == c.e(n)))
        throw ArgumentError("chain JSON entries for e_" + std::to_string(n) + " do not match its spec");
  }
  return c;
}

json generation_to_json(const GenerationCertificate& cert) {
  json j;
  j["passed"] = cert.passed;
  json verdicts = json::array();
  for (const auto& v : cert.verdicts)
    verdicts.push_back({{"m", v.m},
                        {"within_bound", v.within_bound},
                        {"monotone_tail", v.monotone_tail},
                        {"exact_recovery", v.exact_recovery},
                        {"passed", v.passed}});
  j["verdicts"] = std::move(verdicts);
  json records = json::array();
  for (const auto& r : cert.records)
    records.push_back({{"m", r.m}, {"r", r.r}, {"residual", r.residual}, {"bound", r.bound}, {"passed", r.passed}});
  j["records"] = std::move(records);
  return j;
}

std::string generation_csv(const GenerationCertificate& cert) {
  std::ostringstream out;
  out << "m,r,residual,bound,passed\n";
  for (const auto& r : cert.records)
    out << r.m << ',' << r.r << ',' << format_double(r.residual) << ',' << format_double(r.bound) << ','
        << (r.passed ? 1 : 0) << '\n';
  return out.str();
}

json mbad_to_json(const MbadReport& r) {
  json j;
  j["C"] = r.C;
  j["K"] = r.K;
  j["verdict"] = r.verdict;
  json records = json::array();
  for (const auto& rec : r.records)
    records.push_back({{"a_label", rec.a_label},
                       {"commutator_upper", rec.commutator_upper},
                       {"commutator_lower", rec.commutator_lower},
                       {"C", rec.C},
                       {"K", rec.K},
                       {"pass", rec.pass},
                       {"in_span", rec.in_span},
                       {"approx_identity_residual", rec.approx_identity_residual},
                       {"eventual_index", rec.eventual_index},
                       {"unitized_lower", rec.unitized_lower},
                       {"unitized_upper", rec.unitized_upper},
                       {"unitized_step_bound", rec.unitized_step_bound},
                       {"unitized_uniform_bound", rec.unitized_uniform_bound}});
  j["records"] = std::move(records);
  return j;
}

json norm_profile_to_json(const NormProfile& p) {
  json j;
  j["all_pass"] = p.all_pass;
  json entries = json::array();
  for (const auto& e : p.entries)
    entries.push_back({{"index", e.index}, {"norm", e.norm}, {"bound", e.bound}, {"pass", e.pass}});
  j["entries"] = std::move(entries);
  return j;
}

std::string norm_profile_csv(const NormProfile& p) {
  std::ostringstream out;
  out << "index,norm,bound,pass\n";
  for (const auto& e : p.entries)
    out << e.index << ',' << format_double(e.norm) << ',' << format_double(e.bound) << ',' << (e.pass ? 1 : 0) << '\n';
  return out.str();
}

json embedded_element_to_json(const EmbeddedElement& e) {
  json j;
  json coeffs = json::array();
  if (!e.exact_coeffs.empty())
    for (const auto& q : e.exact_coeffs) coeffs.push_back(q.to_string());
  else
    for (cplx z : e.coeffs) coeffs.push_back(json::array({z.real(), z.imag()}));
  j["coeffs"] = std::move(coeffs);
  json blocks = json::array();
  for (std::size_t k = 0; k < e.blocks.size(); ++k)
    blocks.push_back({{"subset", e.family[k]}, {"block", matrix_to_json(e.blocks[k])}});
  j["blocks"] = std::move(blocks);
  return j;
}

json embedding_to_json(const EmbeddingReport& r) {
  json j;
  j["pass"] = r.pass;
  j["min_ratio"] = r.min_ratio;
  j["max_ratio"] = r.max_ratio;
  j["max_trace_ratio"] = r.max_trace_ratio;
  json trials = json::array();
  for (const auto& t : r.trials)
    trials.push_back({{"trial", t.trial},
                      {"l1_norm", t.l1},
                      {"linf_norm", t.linf},
                      {"sup_norm", t.sup_norm},
                      {"ratio", t.ratio},
                      {"witness_ratio", t.witness_ratio},
                      {"trace_norm_geometric", t.trace_geometric},
                      {"trace_norm_uniform", t.trace_uniform},
                      {"lower_ok", t.lower_ok},
                      {"upper_ok", t.upper_ok},
                      {"trace_ok", t.trace_ok},
                      {"trace_below_sup", t.trace_below_sup}});
  j["trials"] = std::move(trials);
  return j;
}

std::string embedding_csv(const EmbeddingReport& r) {
  std::ostringstream out;
  out << "trial,l1_norm,sup_norm,ratio,trace_norm,trace_norm_uniform,witness_ratio\n";
  for (const auto& t : r.trials)
    out << t.trial << ',' << format_double(t.l1) << ',' << format_double(t.sup_norm) << ',' << format_double(t.ratio)
        << ',' << format_double(t.trace_geometric) << ',' << format_double(t.trace_uniform) << ','
        << format_double(t.witness_ratio) << '\n';
  return out.str();
}

}  // namespace opalg
