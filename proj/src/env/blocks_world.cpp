#include "rael/env/blocks_world.hpp"

#include <algorithm>

#include "rael/util/random.hpp"

namespace rael::env {

namespace {
const logic::Symbol kOn("on");
const logic::Symbol kOnFloor("onFloor");
const logic::Symbol kClear("clear");
const logic::Symbol kMove("move");
const logic::Symbol kMoveToFloor("moveToFloor");
const logic::Symbol kBlock("block");

logic::Term constant(logic::Symbol s) { return {logic::Term::Kind::Constant, s}; }
}  // namespace

BlocksWorld::BlocksWorld(BlocksWorldParams params) : params_(params) {
  if (params_.blocks < 1) throw std::invalid_argument("blocksworld needs at least one block");
  if (params_.step_cap < 1) throw std::invalid_argument("step cap must be >= 1");
  for (int i = 1; i <= params_.blocks; ++i) {
    blocks_.emplace_back("b" + std::to_string(i));
    objects_.add(blocks_.back(), kBlock);
  }
  spec_.predicates.declare("on", {"block", "block"});
  spec_.predicates.declare("onFloor", {"block"});
  spec_.predicates.declare("clear", {"block"});
  spec_.actions = {
      {kMove, {{logic::Symbol("X"), kBlock}, {logic::Symbol("Y"), kBlock}}},
      {kMoveToFloor, {{logic::Symbol("X"), kBlock}}},
  };
  spec_.rewards = params_.rewards;
  spec_.step_cap = params_.step_cap;
  spec_.default_bias = {"clear(+)", "onFloor(+)", "on(+,-)", "on(-,+)", "on(+,+)", "on(-,-)", "onFloor(-)"};
}

int BlocksWorld::index_of(logic::Symbol block) const {
  auto it = std::find(blocks_.begin(), blocks_.end(), block);
  if (it == blocks_.end()) throw std::invalid_argument("unknown block " + block.name());
  return static_cast<int>(it - blocks_.begin());
}

SymbolicState BlocksWorld::encode(const Layout& below) const {
  std::vector<logic::Atom> atoms;
  std::vector<bool> covered(blocks_.size(), false);
  for (std::size_t i = 0; i < below.size(); ++i) {
    if (below[i]) {
      covered[*below[i]] = true;
      atoms.push_back({kOn, {constant(blocks_[i]), constant(blocks_[*below[i]])}});
    } else {
      atoms.push_back({kOnFloor, {constant(blocks_[i])}});
    }
  }
  for (std::size_t i = 0; i < below.size(); ++i)
    if (!covered[i]) atoms.push_back({kClear, {constant(blocks_[i])}});
  return SymbolicState(std::move(atoms), objects_);
}

BlocksWorld::Layout BlocksWorld::decode(const SymbolicState& state) const {
  Layout below(blocks_.size());
  for (const auto& a : state.with_predicate(kOn)) below[index_of(a.args[0].name())] = index_of(a.args[1].name());
  return below;
}

SymbolicState BlocksWorld::reset(std::uint64_t seed) const {
  Rng rng(seed);
  const int n = params_.blocks;
  while (true) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
    // Each block either starts a new tower or lands on top of an existing one.
    Layout below(n);
    std::vector<int> tops;
    for (int b : order) {
      const std::size_t choice = uniform_index(rng, tops.size() + 1);
      if (choice == tops.size()) {
        tops.push_back(b);
      } else {
        below[b] = tops[choice];
        tops[choice] = b;
      }
    }
    if (n == 1 || tops.size() > 1) return encode(below);
  }
}

std::vector<GroundAction> BlocksWorld::legal_actions(const SymbolicState& state) const {
  std::vector<GroundAction> out;
  if (is_goal(state)) return out;
  const auto clear = state.with_predicate(kClear);
  for (const auto& x : clear) {
    for (const auto& y : clear)
      if (x.args[0] != y.args[0]) out.emplace_back(logic::Atom{kMove, {x.args[0], y.args[0]}});
    if (!state.contains({kOnFloor, {x.args[0]}})) out.emplace_back(logic::Atom{kMoveToFloor, {x.args[0]}});
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool BlocksWorld::is_goal(const SymbolicState& state) const {
  return state.with_predicate(kClear).size() == 1 && state.with_predicate(kOnFloor).size() == 1;
}

SymbolicState BlocksWorld::successor(const SymbolicState& state, const GroundAction& action) const {
  Layout below = decode(state);
  const int x = index_of(action.args()[0].name());
  if (action.name() == kMove)
    below[x] = index_of(action.args()[1].name());
  else
    below[x].reset();
  return encode(below);
}

}  // namespace rael::env
