#include "rael/logic/match.hpp"

#include <algorithm>

namespace rael::logic {

std::optional<Substitution> unify(const Atom& pattern, const Atom& ground, const Substitution& seed) {
  if (pattern.predicate != ground.predicate || pattern.arity() != ground.arity()) return std::nullopt;
  Substitution out = seed;
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    const Term& g = ground.args[i];
    if (p.is_variable()) {
      if (!out.bind(p.name(), g.name())) return std::nullopt;
    } else if (p != g) {
      return std::nullopt;
    }
  }
  return out;
}

namespace {

// Backtracking θ-subsumption search. Bindings live on a trail so that undoing a
// choice point is a resize.
class Matcher {
 public:
  Matcher(const SymbolicState& state, std::span<const Literal> literals, const Substitution& seed)
      : state_(state) {
    for (const auto& lit : literals) (lit.negated ? negatives_ : positives_).push_back(&lit);
    done_.assign(positives_.size(), false);
    trail_ = seed.bindings();
  }

  template <class OnModel>
  void run(OnModel&& on_model) {
    stop_ = false;
    search(positives_.size(), on_model);
  }

 private:
  const Symbol* lookup(Symbol var) const {
    for (const auto& b : trail_)
      if (b.first == var) return &b.second;
    return nullptr;
  }

  // Binds pattern args against a ground atom; leaves new bindings on the trail.
  bool bind_atom(const Atom& pattern, const Atom& ground) {
    if (pattern.args.size() != ground.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
      const Term& p = pattern.args[i];
      const Symbol value = ground.args[i].name();
      if (!p.is_variable()) {
        if (p.name() != value) return false;
      } else if (const Symbol* bound = lookup(p.name())) {
        if (*bound != value) return false;
      } else {
        trail_.emplace_back(p.name(), value);
      }
    }
    return true;
  }

  int bound_args(const Atom& a) const {
    int n = 0;
    for (const auto& t : a.args)
      if (!t.is_variable() || lookup(t.name())) ++n;
    return n;
  }

  std::size_t pick_literal() const {
    std::size_t best = positives_.size();
    int best_bound = -1;
    std::size_t best_run = 0;
    for (std::size_t i = 0; i < positives_.size(); ++i) {
      if (done_[i]) continue;
      const Atom& a = positives_[i]->atom;
      const int bound = a.arity() == 0 ? 1 << 20 : bound_args(a) * 1024 / static_cast<int>(a.arity());
      const std::size_t run = state_.with_predicate(a.predicate).size();
      if (bound > best_bound || (bound == best_bound && run < best_run)) {
        best = i;
        best_bound = bound;
        best_run = run;
      }
    }
    return best;
  }

  bool negatives_hold() {
    for (const Literal* lit : negatives_) {
      for (const Atom& g : state_.with_predicate(lit->atom.predicate)) {
        const std::size_t mark = trail_.size();
        const bool hit = bind_atom(lit->atom, g);
        trail_.resize(mark);
        if (hit) return false;
      }
    }
    return true;
  }

  template <class OnModel>
  void search(std::size_t remaining, OnModel& on_model) {
    if (stop_) return;
    if (remaining == 0) {
      if (negatives_hold() && on_model(trail_)) stop_ = true;
      return;
    }
    const std::size_t i = pick_literal();
    done_[i] = true;
    const Atom& pattern = positives_[i]->atom;
    for (const Atom& g : state_.with_predicate(pattern.predicate)) {
      const std::size_t mark = trail_.size();
      if (bind_atom(pattern, g)) search(remaining - 1, on_model);
      trail_.resize(mark);
      if (stop_) break;
    }
    done_[i] = false;
  }

  const SymbolicState& state_;
  std::vector<const Literal*> positives_;
  std::vector<const Literal*> negatives_;
  std::vector<bool> done_;
  std::vector<Substitution::Binding> trail_;
  bool stop_ = false;
};

}  // namespace

std::vector<Substitution> matches(const SymbolicState& state, std::span<const Literal> literals,
                                  const Substitution& seed) {
  std::vector<Substitution> out;
  Matcher m(state, literals, seed);
  m.run([&](const std::vector<Substitution::Binding>& trail) {
    Substitution theta;
    for (const auto& [var, value] : trail) theta.bind(var, value);
    out.push_back(std::move(theta));
    return false;
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Substitution> matches(const SymbolicState& state, const Abstraction& abstraction,
                                  const Substitution& seed) {
  return matches(state, std::span<const Literal>(abstraction.literals), seed);
}

bool satisfies(const SymbolicState& state, std::span<const Literal> literals, const Substitution& seed) {
  bool found = false;
  Matcher m(state, literals, seed);
  m.run([&](const auto&) {
    found = true;
    return true;
  });
  return found;
}

bool satisfies(const SymbolicState& state, const Abstraction& abstraction, const Substitution& seed) {
  return satisfies(state, std::span<const Literal>(abstraction.literals), seed);
}

Abstraction apply_substitution(const Abstraction& abstraction, const Substitution& theta) {
  Abstraction out;
  out.literals.reserve(abstraction.literals.size());
  for (const auto& lit : abstraction.literals) out.literals.push_back({theta.apply(lit.atom), lit.negated});
  return out;
}

}  // namespace rael::logic
