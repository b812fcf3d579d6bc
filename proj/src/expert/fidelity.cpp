#include "rael/expert/fidelity.hpp"

#include <algorithm>
#include <stdexcept>

#include "rael/util/random.hpp"

namespace rael::expert {

FidelityReport policy_fidelity(const learner::BoostedQFunction& q, const env::Environment& env,
                               std::span<const OracleRule> rules, const FidelityParams& params) {
  if (rules.empty()) throw std::invalid_argument("policy fidelity needs at least one rule");

  FidelityReport report;
  for (const auto& r : rules) report.rules.push_back({r.id});
  std::vector<AdviceMemory> single(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) single[i].insert(rules[i].entry);

  auto done = [&] {
    return std::all_of(report.rules.begin(), report.rules.end(),
                       [&](const RuleVerdict& v) { return v.matched >= params.states_per_rule; });
  };

  Rng rng(derive_seed(params.seed, 0xF1DE));
  for (int episode = 0; episode < params.max_episodes && !done(); ++episode) {
    env::Episode ep(env, rng());
    while (!ep.done()) {
      const auto& state = ep.state();
      const auto legal = env.legal_actions(state);
      std::optional<env::GroundAction> greedy;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        auto& v = report.rules[i];
        if (v.matched >= params.states_per_rule) continue;
        const auto preferred = single[i].preferred(state, legal);
        if (preferred.empty()) continue;
        if (!greedy) greedy = legal[learner::argmax(learner::q_values(q, state, legal))];
        ++v.matched;
        if (std::binary_search(preferred.begin(), preferred.end(), *greedy)) ++v.agreed;
      }
      ep.step(legal[uniform_index(rng, legal.size())]);
    }
  }

  for (auto& v : report.rules) {
    v.uncovered = v.matched == 0;
    if (v.uncovered) continue;
    ++report.counted;
    v.satisfied = v.agreement() >= params.threshold;
    report.satisfied += v.satisfied;
  }
  report.fidelity = report.counted ? static_cast<double>(report.satisfied) / report.counted : 0.0;
  return report;
}

}  // namespace rael::expert
