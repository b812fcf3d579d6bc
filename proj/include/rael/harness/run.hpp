#pragma once

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rael/harness/config.hpp"

namespace rael::harness {

struct SeedRun {
  std::uint64_t seed = 0;
  std::string dir;
  bool ok = false;
  bool cancelled = false;
  std::string error;
  std::vector<engine::IterationMetrics> metrics;
  std::size_t advice_spent = 0;
  std::size_t queries = 0;
  engine::MarginStats margin;
  std::optional<expert::FidelityReport> fidelity;
};

/// Per-iteration mean and sample standard deviation of mean_return across seeds.
struct SummaryRow {
  int iteration = 0;
  int seeds = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct ExperimentResult {
  std::vector<SeedRun> runs;
  std::vector<SummaryRow> summary;
};

/// Rows exist for every iteration reached by at least one run.
std::vector<SummaryRow> aggregate(const std::vector<std::vector<engine::IterationMetrics>>& runs);
std::string summary_tsv(const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> parse_summary(const std::string& text);

/// The oracle for the configured mode; null for no advice. Interactive mode
/// needs a live channel and is only available through serve.
std::unique_ptr<expert::Expert> make_oracle(const ExperimentConfig& config, const env::Environment& env);

/// One training run writing its artifacts into dir: config.yaml first, then
/// metrics.tsv as iterations finish, then model.txt, ledger.json,
/// fidelity.json (when fidelity rules are configured) and run.json. A failure
/// is caught and recorded in run.json.
SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, const std::string& dir, expert::Expert* expert,
                 engine::TrainObserver* observer = nullptr, const std::atomic<bool>* cancel = nullptr);

/// Runs every seed into out_dir/seed-<n>/ and writes out_dir/summary.tsv over
/// the seeds that completed. jobs > 1 runs seeds on parallel threads.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::string& out_dir, int jobs = 1);

/// Loads a model, checks it against a rules file and writes the JSON report.
expert::FidelityReport fidelity_report(const std::string& model_path, const std::string& rules_path,
                                       const ExperimentConfig& config, const std::string& out_path);

struct Curve {
  std::string label;
  std::vector<SummaryRow> rows;
};

/// Mean return per iteration with a one-standard-deviation band per curve.
std::string plot_svg(const std::vector<Curve>& curves, const std::string& title);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace rael::harness
