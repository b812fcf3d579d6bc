#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rael/logic/state.hpp"
#include "rael/logic/term.hpp"

namespace rael::logic {

/// One-way matching of pattern onto a ground atom, extending seed.
/// Returns nullopt on predicate/arity/constant mismatch or a seed conflict.
std::optional<Substitution> unify(const Atom& pattern, const Atom& ground, const Substitution& seed = {});

/// Every substitution that grounds all positive literals into state.atoms and
/// under which no negated literal has a grounding in the state (negation as
/// failure; variables private to a negated literal are existential inside it).
/// Results extend seed, bind exactly the positive variables, and come back in
/// canonical order. The empty conjunction yields {seed}.
std::vector<Substitution> matches(const SymbolicState& state, std::span<const Literal> literals,
                                  const Substitution& seed = {});
std::vector<Substitution> matches(const SymbolicState& state, const Abstraction& abstraction,
                                  const Substitution& seed = {});

/// True iff matches() would be nonempty; stops at the first model.
bool satisfies(const SymbolicState& state, std::span<const Literal> literals, const Substitution& seed = {});
bool satisfies(const SymbolicState& state, const Abstraction& abstraction, const Substitution& seed = {});

Abstraction apply_substitution(const Abstraction& abstraction, const Substitution& theta);

}  // namespace rael::logic
