#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "opalg/experiment.hpp"

namespace {

opalg::json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw opalg::UsageError("config", "cannot open " + path);
  try {
    return opalg::json::parse(in);
  } catch (const opalg::json::parse_error& e) {
    throw opalg::UsageError("config", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opalg: certify finite truncations of idempotent chains, approximate diagonals and l1 embeddings"};

  std::string subcommand = "all";
  std::string config_path;
  app.add_option("subcommand", subcommand, "chain | generate | diagonal | embed | all");
  app.add_option("--config", config_path, "JSON file supplying defaults (keys as below, with underscores)");

  // Flags are parsed into optionals so a config file value survives unless overridden.
  std::optional<std::size_t> m_max, n_max, f_cap, s_max, r_max, trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> out, format, coupling, weights, trace_scheme;
  app.add_option("--m-max", m_max, "chain length (default 10)");
  app.add_option("--n-max", n_max, "embedding coordinates (default 10, at most 24)");
  app.add_option("--f-cap", f_cap, "number of canonical subsets (default 512)");
  app.add_option("--s-max", s_max, "largest canonical subset size (default 8)");
  app.add_option("--r-max", r_max, "largest generator power (default 40)");
  app.add_option("--trials", trials, "random trials per suite (default 100)");
  app.add_option("--seed", seed, "master seed (default 20111)");
  app.add_option("--tol", tol, "numeric tolerance (default 1e-9)");
  app.add_option("--out", out, "output directory (default opalg-out)");
  app.add_option("--format", format, "json | csv | both (default both)");
  app.add_option("--coupling", coupling, "linear | quadratic | constant:<q> | list:<q>,<q>,...");
  app.add_option("--weights", weights, "default | geometric:<q>");
  app.add_option("--trace-scheme", trace_scheme, "geometric | uniform");
  bool serial = false, parallel = false;
  auto* fs = app.add_flag("--serial", serial, "use the serial reference kernels");
  app.add_flag("--parallel", parallel, "use the OpenMP kernels (default)")->excludes(fs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    opalg::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = opalg::config_from_json(read_config(config_path), cfg);
    if (app.count("subcommand")) cfg.subcommand = opalg::parse_subcommand(subcommand);
    if (m_max) cfg.m_max = *m_max;
    if (n_max) cfg.n_max = *n_max;
    if (f_cap) cfg.f_cap = *f_cap;
    if (s_max) cfg.s_max = *s_max;
    if (r_max) cfg.r_max = *r_max;
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    if (tol) cfg.tol = *tol;
    if (out) cfg.out_dir = *out;
    if (format) cfg.format = opalg::parse_format(*format);
    if (coupling) cfg.coupling_scheme = *coupling;
    if (weights) cfg.weight_scheme = *weights;
    if (trace_scheme) cfg.trace_scheme = opalg::parse_trace_scheme(*trace_scheme);
    if (serial) cfg.parallel = false;
    if (parallel) cfg.parallel = true;
    cfg.validate();

    const opalg::RunReport report = opalg::run_experiment(cfg);
    for (const auto& stage : report.stages) {
      std::size_t failed = 0;
      for (const auto& c : stage.checks)
        if (!c.pass) {
          ++failed;
          std::cerr << "  FAIL " << stage.name << "/" << c.name << ": observed " << c.observed << " (" << c.expected
                    << ")\n";
        }
      std::cout << (stage.pass ? "PASS " : "FAIL ") << stage.name << "  " << stage.checks.size() - failed << "/"
                << stage.checks.size() << " checks  " << stage.seconds << " s\n";
    }
    for (const auto& p : opalg::emit_report(report, cfg.format)) std::cout << "wrote " << p.string() << "\n";
    std::cout << (report.pass ? "overall: PASS" : "overall: FAIL") << "\n";
    return report.exit_code();
  } catch (const opalg::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
