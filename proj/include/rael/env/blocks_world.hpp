#pragma once

#include <optional>
#include <vector>

#include "rael/env/environment.hpp"

namespace rael::env {

struct BlocksWorldParams {
  int blocks = 4;
  int step_cap = 50;
  Rewards rewards;
};

/// Stack task: all blocks must end up in one tower.
///
/// Predicates: on(block,block), onFloor(block), clear(block).
/// Actions: move(X,Y) puts clear X onto clear Y; moveToFloor(X) unstacks clear X.
class BlocksWorld : public Environment {
 public:
  explicit BlocksWorld(BlocksWorldParams params = {});

  std::string name() const override { return "blocksworld"; }
  const EnvironmentSpec& spec() const override { return spec_; }
  SymbolicState reset(std::uint64_t seed) const override;
  std::vector<GroundAction> legal_actions(const SymbolicState& state) const override;
  bool is_goal(const SymbolicState& state) const override;

  /// below[i] is the index of the block under block i, nullopt for the floor.
  using Layout = std::vector<std::optional<int>>;
  SymbolicState encode(const Layout& below) const;
  Layout decode(const SymbolicState& state) const;

  const BlocksWorldParams& params() const { return params_; }

 protected:
  SymbolicState successor(const SymbolicState& state, const GroundAction& action) const override;

 private:
  int index_of(logic::Symbol block) const;

  BlocksWorldParams params_;
  EnvironmentSpec spec_;
  std::vector<logic::Symbol> blocks_;
  logic::ObjectTable objects_;
};

}  // namespace rael::env
