#pragma once

#include <vector>

#include "rael/env/environment.hpp"

namespace rael::env {

struct LadderWorldParams {
  int levels = 3;
  int columns = 7;
  int max_ladders_per_level = 2;
  bool threat = false;
  /// Full monkey cycle in steps: down for the first half, up for the rest.
  int monkey_period = 4;
  int step_cap = 100;
  Rewards rewards;
};

/// Symbolic ladder-climbing world. The player starts on level 0 and must reach
/// the top level by walking to ladders and climbing them.
///
/// Relational predicates (only for ladders whose foot is on the player's level):
///   onLadder(P,L), leftOfLadder(P,L), rightOfLadder(P,L), atTopLevel(P)
/// With the threat enabled a monkey sits at a fixed column of level 1 and
/// periodically drops down. Entering or staying in its column while it is down
/// is a terminal failure (punched(P)).
///   monkeyDown(M), monkeyUp(M), monkeyLeft(P,M), monkeyRight(P,M), underMonkey(P,M)
/// Positional bookkeeping atoms (playerAt, ladderAt, monkeyAt, monkeyPhase) keep
/// the dynamics Markov in the atom set; the default language bias ignores them.
///
/// Actions: move_left(P), move_right(P), wait(P), go_up(P,L).
class LadderWorld : public Environment {
 public:
  explicit LadderWorld(LadderWorldParams params = {});

  std::string name() const override { return params_.threat ? "ladderworld-threat" : "ladderworld"; }
  const EnvironmentSpec& spec() const override { return spec_; }
  SymbolicState reset(std::uint64_t seed) const override;
  std::vector<GroundAction> legal_actions(const SymbolicState& state) const override;
  bool is_goal(const SymbolicState& state) const override;
  bool is_failure(const SymbolicState& state) const override;

  struct Ladder {
    int level;
    int column;
  };
  struct Layout {
    std::vector<Ladder> ladders;
    int player_level = 0;
    int player_column = 0;
    int monkey_column = -1;  // -1 when there is no threat
    int monkey_phase = 0;
    bool punched = false;
  };
  SymbolicState encode(const Layout& layout) const;
  Layout decode(const SymbolicState& state) const;

  static constexpr int kMonkeyLevel = 1;
  const LadderWorldParams& params() const { return params_; }

 protected:
  SymbolicState successor(const SymbolicState& state, const GroundAction& action) const override;

 private:
  bool monkey_down(int phase) const { return phase < params_.monkey_period / 2; }
  logic::Symbol ladder_name(int i) const;

  LadderWorldParams params_;
  EnvironmentSpec spec_;
  std::vector<logic::Symbol> level_syms_;
  std::vector<logic::Symbol> column_syms_;
  std::vector<logic::Symbol> phase_syms_;
};

}  // namespace rael::env
