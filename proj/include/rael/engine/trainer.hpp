#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rael/engine/policy.hpp"
#include "rael/env/environment.hpp"
#include "rael/expert/advice.hpp"
#include "rael/learner/boosted_q.hpp"

namespace rael::engine {

struct TrainConfig {
  Schedules schedules;
  learner::BoostingParams learner;
  learner::LanguageBias bias;
  int iterations = 20;
  int n_train = 10;
  int n_eval = 5;
  std::size_t buffer_cap = 50000;
  int budget = 0;
  /// Targets are fixed when a transition is stored. When true, every buffered
  /// target is recomputed with the current Q before each fit instead.
  bool refresh_targets = false;
  double initial_q = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IterationMetrics {
  int iteration = 0;
  double mean_return = 0.0;
  double max_entropy = 0.0;
  int budget_remaining = 0;
  std::size_t buffer_size = 0;
  std::uint64_t seed = 0;
};

struct UncertaintyRecord {
  logic::SymbolicState state;
  double entropy = 0.0;
  /// Position of the first visit across all evaluation rollouts.
  std::size_t visit = 0;
};

struct EvalResult {
  double mean_return = 0.0;
  /// Unique visited non-terminal states, highest entropy first, earliest visit on ties.
  std::vector<UncertaintyRecord> ranked;
};

/// Greedy rollouts from the given reset seeds.
EvalResult evaluate_and_rank(const learner::BoostedQFunction& q, const env::Environment& env,
                             std::span<const std::uint64_t> reset_seeds, double tau);

struct QueryRecord {
  enum class Outcome { Accepted, Declined, Timeout, Invalid };
  int iteration = 0;
  std::uint64_t request_id = 0;
  logic::SymbolicState state;
  double entropy = 0.0;
  Outcome outcome = Outcome::Declined;
  std::optional<expert::AdviceEntry> entry;
  std::string reason;
};
const char* to_string(QueryRecord::Outcome outcome);

/// Only accepted advice spends budget.
class BudgetLedger {
 public:
  explicit BudgetLedger(int budget = 0);

  int budget() const { return budget_; }
  int remaining() const { return budget_ - static_cast<int>(spent_); }
  /// Every query issued, accepted or not, in order.
  const std::vector<QueryRecord>& history() const { return history_; }
  std::size_t spent() const { return spent_; }

  void record(QueryRecord query);

 private:
  int budget_;
  std::size_t spent_ = 0;
  std::vector<QueryRecord> history_;
};

/// Queries the highest-entropy state that no stored advice covers and the
/// expert has not declined before, if budget remains. Accepted advice goes into
/// memory and spends one unit.
std::optional<QueryRecord> maybe_query_expert(std::span<const UncertaintyRecord> ranked, BudgetLedger& ledger,
                                              expert::AdviceMemory& memory, expert::Expert& expert,
                                              const learner::BoostedQFunction& q, const env::Environment& env,
                                              int iteration, std::uint64_t request_id);

struct MarginStats {
  /// Stored targets of preferred actions in advised states.
  std::size_t advised = 0;
  /// Of those, targets below best non-preferred Q + delta at storage time.
  std::size_t violations = 0;
};

class TrainObserver {
 public:
  virtual ~TrainObserver() = default;
  virtual void on_phase(int /*iteration*/, std::string_view /*phase*/) {}
  virtual void on_step(int /*iteration*/, const env::Transition& /*t*/, Branch /*branch*/) {}
  virtual void on_iteration(const IterationMetrics& /*m*/, const learner::BoostedQFunction& /*q*/) {}
  /// Called after every expert query with its outcome.
  virtual void on_query(const QueryRecord& /*q*/) {}
};

struct TrainResult {
  learner::BoostedQFunction q;
  std::vector<IterationMetrics> metrics;
  expert::AdviceMemory memory;
  BudgetLedger ledger;
  MarginStats margin;
  bool cancelled = false;
};

/// The full loop: training episodes, target computation, fit, evaluation,
/// expert query; once per iteration. expert may be null (no advice).
TrainResult rael_train(const TrainConfig& config, const env::Environment& env, expert::Expert* expert,
                       TrainObserver* observer = nullptr, const std::atomic<bool>* cancel = nullptr);

}  // namespace rael::engine
