#pragma once

// Brute-force reference for θ-subsumption matching, plus a random case
// generator. Deliberately naive: enumerate every assignment of constants to
// variables and test literal membership with SymbolicState::contains.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "rael/logic/state.hpp"
#include "rael/logic/term.hpp"

namespace rael::testing {

inline logic::Atom ground_with(const logic::Atom& a, const std::vector<logic::Symbol>& vars,
                               const std::vector<logic::Symbol>& values) {
  logic::Atom out{a.predicate, {}};
  for (const auto& t : a.args) {
    if (!t.is_variable()) {
      out.args.push_back(t);
      continue;
    }
    const auto it = std::find(vars.begin(), vars.end(), t.name());
    out.args.push_back(it == vars.end() ? t : logic::Term(logic::Term::Kind::Constant, values[it - vars.begin()]));
  }
  return out;
}

// Calls f(values) for every tuple in constants^k.
template <class F>
void for_each_tuple(std::size_t k, const std::vector<logic::Symbol>& constants, F&& f) {
  std::vector<std::size_t> idx(k, 0);
  std::vector<logic::Symbol> values(k);
  if (k > 0 && constants.empty()) return;
  while (true) {
    for (std::size_t i = 0; i < k; ++i) values[i] = constants[idx[i]];
    f(values);
    std::size_t i = 0;
    while (i < k && ++idx[i] == constants.size()) idx[i++] = 0;
    if (i == k) return;
  }
}

inline std::vector<logic::Substitution> brute_force_matches(const logic::SymbolicState& state,
                                                            const logic::Abstraction& phi) {
  std::vector<logic::Symbol> constants;
  for (const auto& [obj, cls] : state.objects().entries()) constants.push_back(obj);
  const auto vars = phi.positive_variables();

  std::vector<logic::Substitution> out;
  for_each_tuple(vars.size(), constants, [&](const std::vector<logic::Symbol>& values) {
    for (const auto& lit : phi.literals) {
      const auto g = ground_with(lit.atom, vars, values);
      if (!lit.negated) {
        if (!state.contains(g)) return;
        continue;
      }
      // Remaining variables are local to the negated literal.
      std::vector<logic::Symbol> local;
      for (const auto& t : g.args)
        if (t.is_variable() && std::find(local.begin(), local.end(), t.name()) == local.end())
          local.push_back(t.name());
      bool grounded = false;
      for_each_tuple(local.size(), constants, [&](const std::vector<logic::Symbol>& lv) {
        if (state.contains(ground_with(g, local, lv))) grounded = true;
      });
      if (grounded) return;
    }
    logic::Substitution theta;
    for (std::size_t i = 0; i < vars.size(); ++i) theta.bind(vars[i], values[i]);
    out.push_back(theta);
  });
  std::sort(out.begin(), out.end());
  return out;
}

struct RandomLogicCase {
  logic::SymbolicState state;
  logic::Abstraction phi;
};

// States of up to max_atoms atoms over predicates p/1, q/2, r/2 and up to 5
// constants; abstractions of 1-3 literals over up to max_vars variables.
inline RandomLogicCase random_logic_case(std::mt19937_64& rng, std::size_t max_atoms = 12, std::size_t max_vars = 3,
                                         bool allow_negation = false) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  const std::vector<std::pair<std::string, std::size_t>> preds = {{"p", 1}, {"q", 2}, {"r", 2}};
  const std::size_t n_const = 2 + pick(4);
  std::vector<logic::Symbol> consts;
  logic::ObjectTable objects;
  for (std::size_t i = 0; i < n_const; ++i) {
    consts.emplace_back("c" + std::to_string(i));
    objects.add(consts.back(), logic::Symbol("obj"));
  }
  std::vector<logic::Atom> atoms;
  const std::size_t n_atoms = pick(max_atoms + 1);
  for (std::size_t i = 0; i < n_atoms; ++i) {
    const auto& [name, arity] = preds[pick(preds.size())];
    logic::Atom a{logic::Symbol(name), {}};
    for (std::size_t k = 0; k < arity; ++k)
      a.args.push_back(logic::Term(logic::Term::Kind::Constant, consts[pick(consts.size())]));
    atoms.push_back(a);
  }
  RandomLogicCase c{logic::SymbolicState(atoms, objects), {}};
  const std::vector<std::string> var_names = {"X", "Y", "Z"};
  const std::size_t n_vars = 1 + pick(std::min<std::size_t>(max_vars, var_names.size()));
  const std::size_t n_lits = 1 + pick(3);
  for (std::size_t i = 0; i < n_lits; ++i) {
    const auto& [name, arity] = preds[pick(preds.size())];
    logic::Literal lit{{logic::Symbol(name), {}}, allow_negation && i > 0 && pick(3) == 0};
    for (std::size_t k = 0; k < arity; ++k) {
      if (pick(5) == 0)
        lit.atom.args.push_back(logic::Term(logic::Term::Kind::Constant, consts[pick(consts.size())]));
      else
        lit.atom.args.push_back(logic::Term::variable(var_names[pick(n_vars)]));
    }
    c.phi.literals.push_back(lit);
  }
  return c;
}

}  // namespace rael::testing
