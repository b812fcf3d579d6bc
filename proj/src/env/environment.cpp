#include "rael/env/environment.hpp"

#include <algorithm>

namespace rael::env {

GroundAction::GroundAction(logic::Atom atom) : atom_(std::move(atom)) {
  if (!atom_.is_ground()) throw std::invalid_argument("ground action has variables: " + logic::print(atom_));
}

const ActionTemplate* EnvironmentSpec::find_action(logic::Symbol name) const {
  for (const auto& a : actions)
    if (a.name == name) return &a;
  return nullptr;
}

Transition Environment::step(const SymbolicState& state, const GroundAction& action) const {
  const auto legal = legal_actions(state);
  if (!std::binary_search(legal.begin(), legal.end(), action))
    throw IllegalAction(name() + ": " + action.str() + " is not legal in [" + logic::print(state) + "]");
  Transition t;
  t.state = state;
  t.action = action;
  t.next = successor(state, action);
  const auto& r = spec().rewards;
  if (is_goal(t.next)) {
    t.reward = r.goal;
    t.terminal = true;
  } else if (is_failure(t.next)) {
    t.reward = r.failure;
    t.terminal = true;
  } else {
    t.reward = r.step;
  }
  return t;
}

Episode::Episode(const Environment& env, std::uint64_t seed) : env_(&env), state_(env.reset(seed)) {
  done_ = env.is_terminal(state_);
}

Transition Episode::step(const GroundAction& action) {
  if (done_) throw IllegalAction("episode already finished");
  Transition t = env_->step(state_, action);
  ++steps_;
  total_reward_ += t.reward;
  if (!t.terminal && steps_ >= env_->spec().step_cap) t.truncated = true;
  done_ = t.terminal || t.truncated;
  state_ = t.next;
  return t;
}

}  // namespace rael::env
