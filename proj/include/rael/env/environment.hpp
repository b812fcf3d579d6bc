#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rael/logic/signature.hpp"
#include "rael/logic/state.hpp"
#include "rael/logic/syntax.hpp"

namespace rael::env {

using logic::SymbolicState;

class IllegalAction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ActionParam {
  logic::Symbol name;
  logic::Symbol cls;
};

struct ActionTemplate {
  logic::Symbol name;
  std::vector<ActionParam> params;

  std::size_t arity() const { return params.size(); }
};

/// An action template instantiated with constants, e.g. move(b1,b2).
class GroundAction {
 public:
  GroundAction() = default;
  explicit GroundAction(logic::Atom atom);

  static GroundAction parse(std::string_view text) { return GroundAction(logic::parse_atom(text)); }

  logic::Symbol name() const { return atom_.predicate; }
  const std::vector<logic::Term>& args() const { return atom_.args; }
  const logic::Atom& atom() const { return atom_; }
  std::string str() const { return logic::print(atom_); }

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
  friend auto operator<=>(const GroundAction& a, const GroundAction& b) { return a.atom_ <=> b.atom_; }

 private:
  logic::Atom atom_;
};

struct Rewards {
  double goal = 10.0;
  double step = -1.0;
  double failure = -50.0;
};

struct EnvironmentSpec {
  logic::SignatureTable predicates;
  std::vector<ActionTemplate> actions;
  Rewards rewards;
  int step_cap = 50;
  /// Mode declarations for the tree learner, e.g. "on(+,-)".
  std::vector<std::string> default_bias;

  const ActionTemplate* find_action(logic::Symbol name) const;
};

struct Transition {
  SymbolicState state;
  GroundAction action;
  double reward = 0.0;
  SymbolicState next;
  bool terminal = false;
  /// Set by Episode when the step cap cuts the episode; such states still bootstrap.
  bool truncated = false;
};

/// A relational MDP. Dynamics are a pure function of the state, so one instance
/// can serve any number of episodes.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual const EnvironmentSpec& spec() const = 0;

  /// Same seed gives the same initial state.
  virtual SymbolicState reset(std::uint64_t seed) const = 0;
  /// Canonically ordered; empty iff the state is terminal.
  virtual std::vector<GroundAction> legal_actions(const SymbolicState& state) const = 0;
  virtual bool is_goal(const SymbolicState& state) const = 0;
  virtual bool is_failure(const SymbolicState&) const { return false; }
  bool is_terminal(const SymbolicState& state) const { return is_goal(state) || is_failure(state); }

  /// Throws IllegalAction if action is not legal in state.
  Transition step(const SymbolicState& state, const GroundAction& action) const;

 protected:
  virtual SymbolicState successor(const SymbolicState& state, const GroundAction& action) const = 0;
};

/// Runs one episode against an environment and enforces the step cap.
class Episode {
 public:
  Episode(const Environment& env, std::uint64_t seed);

  const SymbolicState& state() const { return state_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }
  double total_reward() const { return total_reward_; }

  Transition step(const GroundAction& action);

 private:
  const Environment* env_;
  SymbolicState state_;
  int steps_ = 0;
  bool done_ = false;
  double total_reward_ = 0.0;
};

}  // namespace rael::env
