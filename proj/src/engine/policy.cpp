#include "rael/engine/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rael/learner/boosted_q.hpp"

namespace rael::engine {

std::vector<double> policy_distribution(std::span<const double> q, double tau) {
  if (q.empty()) throw std::invalid_argument("policy over no actions");
  if (!(tau > 0.0)) throw std::invalid_argument("temperature must be positive");
  const double top = *std::max_element(q.begin(), q.end());
  std::vector<double> pi(q.size());
  double z = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) z += pi[i] = std::exp((q[i] - top) / tau);
  for (auto& p : pi) p /= z;
  return pi;
}

double entropy(std::span<const double> pi) {
  double h = 0.0;
  for (double p : pi)
    if (p > 0.0) h -= p * std::log(p);
  return std::max(0.0, h);
}

double DecaySchedule::at(int t) const { return std::max(floor, start * std::pow(decay, t)); }

void DecaySchedule::validate(const std::string& name) const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(start) || !in_unit(floor)) throw std::invalid_argument(name + ": start and floor must lie in [0,1]");
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument(name + ": decay must lie in (0,1]");
}

void Schedules::validate() const {
  explore.validate("explore schedule");
  advice.validate("advice schedule");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
  if (!(alpha_blend > 0.0 && alpha_blend <= 1.0)) throw std::invalid_argument("alpha_blend must lie in (0,1]");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::Explore: return "explore";
    case Branch::Advice: return "advice";
    case Branch::Greedy: return "greedy";
  }
  return "?";
}

Selection select_action(std::span<const env::GroundAction> legal, std::span<const double> q,
                        std::span<const env::GroundAction> preferred, double p_explore, double rho, Rng& rng) {
  if (legal.empty()) throw std::invalid_argument("no legal actions to select from");
  if (q.size() != legal.size()) throw std::invalid_argument("one Q value per legal action required");
  const double u = uniform01(rng);
  if (u < p_explore) return {uniform_index(rng, legal.size()), Branch::Explore};
  if (!preferred.empty() && u < rho) {
    const auto& pick = preferred[uniform_index(rng, preferred.size())];
    const auto it = std::lower_bound(legal.begin(), legal.end(), pick);
    if (it == legal.end() || *it != pick) throw std::invalid_argument("preferred action " + pick.str() + " is not legal");
    return {static_cast<std::size_t>(it - legal.begin()), Branch::Advice};
  }
  return {learner::argmax(q), Branch::Greedy};
}

double bellman_target(double reward, bool terminal, double next_max, double current, double gamma,
                      double alpha_blend) {
  const double y = terminal ? reward : reward + gamma * next_max;
  return (1.0 - alpha_blend) * current + alpha_blend * y;
}

double advice_projection(double target, const env::GroundAction& action, std::span<const env::GroundAction> legal,
                         std::span<const double> q, std::span<const env::GroundAction> preferred, double delta) {
  if (!std::binary_search(preferred.begin(), preferred.end(), action)) return target;
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < legal.size(); ++i)
    if (!std::binary_search(preferred.begin(), preferred.end(), legal[i])) best_other = std::max(best_other, q[i]);
  if (std::isinf(best_other)) return target;
  return std::max(target, best_other + delta);
}

}  // namespace rael::engine
