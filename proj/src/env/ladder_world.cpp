#include "rael/env/ladder_world.hpp"

#include <algorithm>

#include "rael/util/random.hpp"

namespace rael::env {

namespace {
const logic::Symbol kPlayer("player1");
const logic::Symbol kMonkey("monkey1");
const logic::Symbol kPlayerAt("playerAt");
const logic::Symbol kLadderAt("ladderAt");
const logic::Symbol kMonkeyAt("monkeyAt");
const logic::Symbol kMonkeyPhase("monkeyPhase");
const logic::Symbol kOnLadder("onLadder");
const logic::Symbol kLeftOfLadder("leftOfLadder");
const logic::Symbol kRightOfLadder("rightOfLadder");
const logic::Symbol kAtTopLevel("atTopLevel");
const logic::Symbol kMonkeyDown("monkeyDown");
const logic::Symbol kMonkeyUp("monkeyUp");
const logic::Symbol kMonkeyLeft("monkeyLeft");
const logic::Symbol kMonkeyRight("monkeyRight");
const logic::Symbol kUnderMonkey("underMonkey");
const logic::Symbol kPunched("punched");
const logic::Symbol kMoveLeft("move_left");
const logic::Symbol kMoveRight("move_right");
const logic::Symbol kWait("wait");
const logic::Symbol kGoUp("go_up");

logic::Term constant(logic::Symbol s) { return {logic::Term::Kind::Constant, s}; }

int index_in(const std::vector<logic::Symbol>& syms, logic::Symbol s) {
  auto it = std::find(syms.begin(), syms.end(), s);
  if (it == syms.end()) throw std::invalid_argument("ladderworld: unknown constant " + s.name());
  return static_cast<int>(it - syms.begin());
}
}  // namespace

LadderWorld::LadderWorld(LadderWorldParams params) : params_(params) {
  if (params_.levels < 2) throw std::invalid_argument("ladderworld needs at least 2 levels");
  if (params_.threat && params_.levels < 3) throw std::invalid_argument("the monkey needs a middle level (levels >= 3)");
  if (params_.columns < 3) throw std::invalid_argument("ladderworld needs at least 3 columns");
  if (params_.max_ladders_per_level < 1 || params_.max_ladders_per_level > params_.columns / 3)
    throw std::invalid_argument("max_ladders_per_level must be in [1, columns/3]");
  if (params_.monkey_period < 2) throw std::invalid_argument("monkey period must be >= 2");
  if (params_.step_cap < 1) throw std::invalid_argument("step cap must be >= 1");

  for (int i = 0; i < params_.levels; ++i) level_syms_.emplace_back("lv" + std::to_string(i));
  for (int i = 0; i < params_.columns; ++i) column_syms_.emplace_back("col" + std::to_string(i));
  if (params_.threat)
    for (int i = 0; i < params_.monkey_period; ++i) phase_syms_.emplace_back("ph" + std::to_string(i));

  auto& p = spec_.predicates;
  p.declare("playerAt", {"player", "level", "column"});
  p.declare("ladderAt", {"ladder", "level", "column"});
  p.declare("onLadder", {"player", "ladder"});
  p.declare("leftOfLadder", {"player", "ladder"});
  p.declare("rightOfLadder", {"player", "ladder"});
  p.declare("atTopLevel", {"player"});
  p.declare("punched", {"player"});
  if (params_.threat) {
    p.declare("monkeyAt", {"monkey", "level", "column"});
    p.declare("monkeyPhase", {"monkey", "phase"});
    p.declare("monkeyDown", {"monkey"});
    p.declare("monkeyUp", {"monkey"});
    p.declare("monkeyLeft", {"player", "monkey"});
    p.declare("monkeyRight", {"player", "monkey"});
    p.declare("underMonkey", {"player", "monkey"});
  }
  const logic::Symbol player_cls("player"), ladder_cls("ladder");
  spec_.actions = {
      {kGoUp, {{logic::Symbol("P"), player_cls}, {logic::Symbol("L"), ladder_cls}}},
      {kMoveLeft, {{logic::Symbol("P"), player_cls}}},
      {kMoveRight, {{logic::Symbol("P"), player_cls}}},
      {kWait, {{logic::Symbol("P"), player_cls}}},
  };
  spec_.rewards = params_.rewards;
  spec_.step_cap = params_.step_cap;
  spec_.default_bias = {"onLadder(+,-)", "onLadder(+,+)", "leftOfLadder(+,-)", "rightOfLadder(+,-)"};
  if (params_.threat)
    for (const char* m : {"monkeyLeft(+,-)", "monkeyRight(+,-)", "underMonkey(+,-)", "monkeyDown(+)", "monkeyUp(+)"})
      spec_.default_bias.emplace_back(m);
}

logic::Symbol LadderWorld::ladder_name(int i) const { return logic::Symbol("ladder" + std::to_string(i + 1)); }

SymbolicState LadderWorld::encode(const Layout& s) const {
  logic::ObjectTable objects;
  objects.add(kPlayer, logic::Symbol("player"));
  for (auto l : level_syms_) objects.add(l, logic::Symbol("level"));
  for (auto c : column_syms_) objects.add(c, logic::Symbol("column"));

  std::vector<logic::Atom> atoms;
  const auto P = constant(kPlayer);
  atoms.push_back({kPlayerAt, {P, constant(level_syms_[s.player_level]), constant(column_syms_[s.player_column])}});
  for (std::size_t i = 0; i < s.ladders.size(); ++i) {
    const auto name = ladder_name(static_cast<int>(i));
    const auto& ld = s.ladders[i];
    objects.add(name, logic::Symbol("ladder"));
    atoms.push_back({kLadderAt, {constant(name), constant(level_syms_[ld.level]), constant(column_syms_[ld.column])}});
    if (ld.level != s.player_level) continue;
    const auto rel = s.player_column == ld.column  ? kOnLadder
                     : s.player_column < ld.column ? kLeftOfLadder
                                                   : kRightOfLadder;
    atoms.push_back({rel, {P, constant(name)}});
  }
  if (s.player_level == params_.levels - 1) atoms.push_back({kAtTopLevel, {P}});
  if (s.punched) atoms.push_back({kPunched, {P}});

  if (params_.threat) {
    const auto M = constant(kMonkey);
    objects.add(kMonkey, logic::Symbol("monkey"));
    for (auto ph : phase_syms_) objects.add(ph, logic::Symbol("phase"));
    atoms.push_back({kMonkeyAt, {M, constant(level_syms_[kMonkeyLevel]), constant(column_syms_[s.monkey_column])}});
    atoms.push_back({kMonkeyPhase, {M, constant(phase_syms_[s.monkey_phase])}});
    atoms.push_back({monkey_down(s.monkey_phase) ? kMonkeyDown : kMonkeyUp, {M}});
    if (s.player_level == kMonkeyLevel) {
      if (s.monkey_column == s.player_column - 1) atoms.push_back({kMonkeyLeft, {P, M}});
      if (s.monkey_column == s.player_column + 1) atoms.push_back({kMonkeyRight, {P, M}});
      if (s.monkey_column == s.player_column) atoms.push_back({kUnderMonkey, {P, M}});
    }
  }
  return SymbolicState(std::move(atoms), std::move(objects));
}

LadderWorld::Layout LadderWorld::decode(const SymbolicState& state) const {
  Layout s;
  for (const auto& a : state.with_predicate(kPlayerAt)) {
    s.player_level = index_in(level_syms_, a.args[1].name());
    s.player_column = index_in(column_syms_, a.args[2].name());
  }
  for (const auto& a : state.with_predicate(kLadderAt)) {
    const int idx = std::stoi(a.args[0].name().name().substr(6)) - 1;
    if (idx < 0) throw std::invalid_argument("bad ladder name " + a.args[0].name().name());
    if (static_cast<int>(s.ladders.size()) <= idx) s.ladders.resize(idx + 1);
    s.ladders[idx] = {index_in(level_syms_, a.args[1].name()), index_in(column_syms_, a.args[2].name())};
  }
  for (const auto& a : state.with_predicate(kMonkeyAt)) s.monkey_column = index_in(column_syms_, a.args[2].name());
  for (const auto& a : state.with_predicate(kMonkeyPhase)) s.monkey_phase = index_in(phase_syms_, a.args[1].name());
  s.punched = !state.with_predicate(kPunched).empty();
  return s;
}

SymbolicState LadderWorld::reset(std::uint64_t seed) const {
  Rng rng(seed);
  Layout s;
  const int cols = params_.columns;
  for (int level = 0; level + 1 < params_.levels; ++level) {
    const int count = 1 + static_cast<int>(uniform_index(rng, params_.max_ladders_per_level));
    std::vector<int> columns(cols);
    for (int c = 0; c < cols; ++c) columns[c] = c;
    for (int i = 0; i < count; ++i) {
      std::swap(columns[i], columns[i + uniform_index(rng, cols - i)]);
      s.ladders.push_back({level, columns[i]});
    }
  }
  std::stable_sort(s.ladders.begin(), s.ladders.end(), [](const Ladder& a, const Ladder& b) {
    return a.level != b.level ? a.level < b.level : a.column < b.column;
  });
  s.player_level = 0;
  s.player_column = static_cast<int>(uniform_index(rng, cols));
  if (params_.threat) {
    // Never on a ladder foot or landing spot of the monkey's level.
    std::vector<int> free;
    for (int c = 0; c < cols; ++c) {
      const bool blocked = std::any_of(s.ladders.begin(), s.ladders.end(), [&](const Ladder& l) {
        return l.column == c && (l.level == kMonkeyLevel || l.level == kMonkeyLevel - 1);
      });
      if (!blocked) free.push_back(c);
    }
    s.monkey_column = free[uniform_index(rng, free.size())];
    s.monkey_phase = static_cast<int>(uniform_index(rng, params_.monkey_period));
  }
  return encode(s);
}

std::vector<GroundAction> LadderWorld::legal_actions(const SymbolicState& state) const {
  std::vector<GroundAction> out;
  if (is_terminal(state)) return out;
  const auto P = constant(kPlayer);
  for (const auto& a : state.with_predicate(kOnLadder)) out.emplace_back(logic::Atom{kGoUp, {P, a.args[1]}});
  const Layout s = decode(state);
  if (s.player_column > 0) out.emplace_back(logic::Atom{kMoveLeft, {P}});
  if (s.player_column + 1 < params_.columns) out.emplace_back(logic::Atom{kMoveRight, {P}});
  out.emplace_back(logic::Atom{kWait, {P}});
  std::sort(out.begin(), out.end());
  return out;
}

bool LadderWorld::is_goal(const SymbolicState& state) const { return !state.with_predicate(kAtTopLevel).empty(); }

bool LadderWorld::is_failure(const SymbolicState& state) const { return !state.with_predicate(kPunched).empty(); }

SymbolicState LadderWorld::successor(const SymbolicState& state, const GroundAction& action) const {
  Layout s = decode(state);
  if (action.name() == kMoveLeft) {
    --s.player_column;
  } else if (action.name() == kMoveRight) {
    ++s.player_column;
  } else if (action.name() == kGoUp) {
    ++s.player_level;
  }
  if (params_.threat) {
    if (s.player_level == kMonkeyLevel && s.player_column == s.monkey_column && monkey_down(s.monkey_phase))
      s.punched = true;
    s.monkey_phase = (s.monkey_phase + 1) % params_.monkey_period;
  }
  return encode(s);
}

}  // namespace rael::env
