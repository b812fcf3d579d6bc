#pragma once

#include <span>
#include <string>
#include <vector>

#include "rael/env/environment.hpp"
#include "rael/util/random.hpp"

namespace rael::engine {

/// Boltzmann distribution softmax(q / tau), computed after subtracting max(q).
std::vector<double> policy_distribution(std::span<const double> q, double tau);

/// Shannon entropy in nats, with 0 log 0 = 0.
double entropy(std::span<const double> pi);

/// max(floor, start * decay^t); non-increasing in t when decay <= 1.
struct DecaySchedule {
  double start = 0.0;
  double decay = 1.0;
  double floor = 0.0;

  double at(int t) const;
  void validate(const std::string& name) const;
};

struct Schedules {
  DecaySchedule explore{0.9, 0.95, 0.05};
  DecaySchedule advice{0.9, 0.98, 0.2};
  double tau = 1.0;
  double gamma = 0.9;
  double alpha_blend = 1.0;
  double delta = 1.0;
  /// Accepted for completeness; the training loop never reads it.
  std::string psi = "identity";

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

enum class Branch { Explore, Advice, Greedy };
const char* to_string(Branch branch);

struct Selection {
  std::size_t index = 0;
  Branch branch = Branch::Greedy;
};

/// One uniform draw u decides the case: u < p_explore explores uniformly;
/// otherwise, if preferred is nonempty and u < rho, a preferred action is drawn
/// uniformly; otherwise the first maximizer of q. `preferred` must hold legal
/// actions only. The rng is consumed the same way whatever the advice.
Selection select_action(std::span<const env::GroundAction> legal, std::span<const double> q,
                        std::span<const env::GroundAction> preferred, double p_explore, double rho, Rng& rng);

/// (1 - alpha) * current + alpha * (r + gamma * next_max), with next_max
/// ignored for terminal transitions.
double bellman_target(double reward, bool terminal, double next_max, double current, double gamma, double alpha_blend);

/// Raises the target of a preferred action to dominate every non-preferred
/// legal action by delta; other actions keep their target.
double advice_projection(double target, const env::GroundAction& action, std::span<const env::GroundAction> legal,
                         std::span<const double> q, std::span<const env::GroundAction> preferred, double delta);

}  // namespace rael::engine
