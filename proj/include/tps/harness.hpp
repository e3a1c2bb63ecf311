#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tps/io.hpp"

namespace tps {

enum class ExperimentKind { statement1, statement2, statement3, ising_dual, lemma_check, custom };
std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ClassSpec {
  std::string name;
  std::optional<int> k;

  ClassPtr build(int n) const;
};

/// Everything that determines an experiment's outputs. Defaults depend on
/// the experiment; see ExperimentConfig::defaults.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::statement1;
  int n = 10;
  ClassSpec h0_class{"k_local", 2};  // where random H0 are drawn
  ClassSpec s_class{"k_local", 2};   // S for certificates, search space otherwise
  int trials = 5;
  int starts = 5;
  std::uint64_t seed = 0;
  double rank_rel_tol = 1e-8;
  double success_tol = 1e-8;
  double equiv_tol = 1e-6;
  bool complexified = true;  // statement3 search space
  double J = 1.0;            // ising_dual target
  double h = 0.7;
  std::string out_dir;

  static ExperimentConfig defaults(ExperimentKind kind);
};

io::json to_json(const ExperimentConfig& cfg);
// Missing keys keep the experiment's defaults. Errors carry "source:line:".
ExperimentConfig config_from_json(const std::string& text, const std::string& source);

struct TrialRecord {
  int index = 0;
  std::uint64_t seed = 0;
  std::string input_digest;
  bool passed = false;
  std::optional<std::string> error;
  io::json report;
  double wall_ms = 0.0;  // kept out of trials.json
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  io::json summary;
  bool passed = false;
};

// FNV-1a over the class name and coefficients printed to 17 digits.
std::string operator_digest(const OperatorExpr& op);

/// Runs every trial on up to `jobs` threads. Outputs do not depend on
/// `jobs`. A failing trial is recorded and never aborts the batch. When
/// cfg.out_dir is set, each finished trial is written immediately to
/// out_dir/trials/NNNN.json so an interrupted run keeps its completed work.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

// summary.json and trials.json are deterministic; wall times go to timing.json.
void write_experiment(const ExperimentResult& result, const std::string& out_dir);
io::json trials_json(const ExperimentResult& result);

}  // namespace tps
