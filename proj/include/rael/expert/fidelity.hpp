#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rael/env/environment.hpp"
#include "rael/expert/oracle.hpp"
#include "rael/learner/boosted_q.hpp"

namespace rael::expert {

struct FidelityParams {
  double threshold = 0.9;
  int states_per_rule = 500;
  /// Random rollouts stop here even if some rule is still short of states.
  int max_episodes = 3000;
  std::uint64_t seed = 0;
};

struct RuleVerdict {
  std::string id;
  /// Sampled states where the rule has a legal preferred grounding.
  int matched = 0;
  /// Of those, states where the greedy action is one of the groundings.
  int agreed = 0;
  bool uncovered = false;
  bool satisfied = false;

  double agreement() const { return matched ? static_cast<double>(agreed) / matched : 0.0; }
};

struct FidelityReport {
  std::vector<RuleVerdict> rules;
  /// Rules that matched at least one sampled state.
  int counted = 0;
  int satisfied = 0;
  double fidelity = 0.0;
};

/// Samples states by uniform random rollouts and checks, rule by rule, whether
/// the greedy policy of q takes a preferred action on at least threshold of the
/// states the rule applies to. Uncovered rules are reported and left out of the
/// denominator. Throws std::invalid_argument on an empty rule set.
FidelityReport policy_fidelity(const learner::BoostedQFunction& q, const env::Environment& env,
                               std::span<const OracleRule> rules, const FidelityParams& params);

}  // namespace rael::expert
