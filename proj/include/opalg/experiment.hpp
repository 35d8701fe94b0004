#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opalg/chain.hpp"
#include "opalg/embedding.hpp"
#include "opalg/generation.hpp"
#include "opalg/serialize.hpp"

namespace opalg {

enum class Subcommand { chain, generate, diagonal, embed, all };
enum class OutputFormat { json, csv, both };

/// Invalid configuration; names the offending field.
class UsageError : public std::invalid_argument {
 public:
  UsageError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::all;
  std::size_t m_max = 10;
  std::size_t n_max = 10;
  std::size_t f_cap = 512;
  std::size_t s_max = 8;
  std::size_t r_max = 40;
  std::size_t trials = 100;
  std::uint64_t seed = 20111;
  double tol = 1e-9;
  // linear | quadratic | constant:<q> | list:<q>,<q>,...
  std::string coupling_scheme = "linear";
  // default | geometric:<q>
  std::string weight_scheme = "default";
  TraceScheme trace_scheme = TraceScheme::geometric;
  std::filesystem::path out_dir = "opalg-out";
  OutputFormat format = OutputFormat::both;
  bool parallel = true;

  /// Throws UsageError naming the first invalid field.
  void validate() const;
};

Subcommand parse_subcommand(const std::string& s);
std::string to_string(Subcommand s);
OutputFormat parse_format(const std::string& s);
std::string to_string(OutputFormat f);
TraceScheme parse_trace_scheme(const std::string& s);
std::string to_string(TraceScheme t);

/// Overlays the keys present in `j` (same names as the CLI flags, with
/// underscores) onto `base`. Unknown keys are a UsageError.
ExperimentConfig config_from_json(const json& j, ExperimentConfig base = {});
json config_to_json(const ExperimentConfig& cfg);

/// Chain spec for cfg.m_max under cfg.coupling_scheme.
ChainSpec chain_spec_from_config(const ExperimentConfig& cfg);
WeightSeq weights_from_config(const ExperimentConfig& cfg, std::span<const Matrix> family);

struct CheckRecord {
  std::string name;
  std::string anchor;  // which identity or inequality the check certifies
  std::string expected;
  double observed = 0.0;
  std::optional<double> bound;
  bool pass = false;
};

struct StageResult {
  std::string name;
  std::vector<CheckRecord> checks;
  json details;
  double seconds = 0.0;
  bool pass = false;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<StageResult> stages;
  std::optional<NormProfile> norm_profile;
  std::optional<GenerationCertificate> generation;
  std::optional<EmbeddingReport> embedding;
  bool pass = false;

  /// Deterministic part of the report: config echo, verdicts, checks, details.
  json payload() const;
  /// Wall-clock timings and the generation timestamp.
  json metadata() const;
  int exit_code() const { return pass ? 0 : 1; }
};

/// Runs the selected suites. Stage failures (including exceptions) are
/// recorded and the run continues. Does not write files.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Writes report.json and/or norm_profile.csv, generation_residuals.csv,
/// embedding_ratios.csv (each only when the series exists) into cfg.out_dir.
/// Returns the written paths. Throws std::runtime_error if out_dir is unwritable.
std::vector<std::filesystem::path> emit_report(const RunReport& r, OutputFormat format);

}  // namespace opalg
