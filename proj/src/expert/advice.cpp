#include "rael/expert/advice.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "rael/logic/match.hpp"
#include "rael/logic/syntax.hpp"

namespace rael::expert {

namespace {

std::string variable_for(const std::string& constant) {
  if (std::isdigit(static_cast<unsigned char>(constant.front()))) return "K" + constant;
  std::string v = constant;
  v.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(v.front())));
  return v;
}

}  // namespace

void validate(const AdviceEntry& entry, const env::EnvironmentSpec& spec) {
  if (entry.preferred.empty()) throw AdviceError("advice needs at least one preferred action");
  try {
    spec.predicates.check(entry.condition);
  } catch (const logic::SignatureError& e) {
    throw AdviceError(std::string("abstraction: ") + e.what());
  }
  const auto bound = entry.condition.positive_variables();
  for (const auto& p : entry.preferred) {
    const auto* tmpl = spec.find_action(p.predicate);
    if (!tmpl) throw AdviceError("unknown action '" + p.predicate.name() + "'");
    if (tmpl->arity() != p.arity())
      throw AdviceError("action " + logic::print(p) + " needs " + std::to_string(tmpl->arity()) + " arguments");
    for (const auto& t : p.args)
      if (t.is_variable() && std::find(bound.begin(), bound.end(), t.name()) == bound.end())
        throw AdviceError("variable " + t.name().name() + " of " + logic::print(p) +
                          " is not bound by a positive literal of the abstraction");
  }
}

std::vector<env::GroundAction> groundings(const AdviceEntry& entry, const logic::SymbolicState& state) {
  std::set<env::GroundAction> out;
  for (const auto& theta : logic::matches(state, entry.condition))
    for (const auto& p : entry.preferred) {
      auto atom = theta.apply(p);
      if (atom.is_ground()) out.insert(env::GroundAction(std::move(atom)));
    }
  return {out.begin(), out.end()};
}

bool AdviceMemory::covers(const logic::SymbolicState& state) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const AdviceEntry& e) { return logic::satisfies(state, e.condition); });
}

std::vector<env::GroundAction> AdviceMemory::preferred(const logic::SymbolicState& state,
                                                       std::span<const env::GroundAction> legal) const {
  std::set<env::GroundAction> out;
  for (const auto& e : entries_)
    for (auto& a : groundings(e, state))
      if (std::binary_search(legal.begin(), legal.end(), a)) out.insert(std::move(a));
  return {out.begin(), out.end()};
}

logic::Abstraction lift_state(const logic::SymbolicState& state, std::map<logic::Symbol, logic::Symbol>* renaming) {
  std::map<logic::Symbol, logic::Symbol> names;
  std::set<std::string> used;
  for (const auto& [obj, cls] : state.objects().entries()) {
    std::string v = variable_for(obj.name());
    while (!used.insert(v).second) v += "_";
    names.emplace(obj, logic::Symbol(v));
  }
  logic::Abstraction phi;
  for (const auto& a : state.atoms()) {
    logic::Atom lifted{a.predicate, {}};
    for (const auto& t : a.args) lifted.args.push_back(logic::Term(logic::Term::Kind::Variable, names.at(t.name())));
    phi.literals.push_back({std::move(lifted), false});
  }
  if (renaming) *renaming = std::move(names);
  return phi;
}

AdviceEntry to_entry(const AdviceResponse& response, const AdviceRequest& request, const env::EnvironmentSpec& spec) {
  if (response.declined) throw AdviceError("response is a decline");
  if (response.request_id != request.id)
    throw AdviceError("response answers request " + std::to_string(response.request_id) + ", pending is " +
                      std::to_string(request.id));
  if (response.preferred.empty()) throw AdviceError("advice needs at least one preferred action");

  for (const auto& p : response.preferred) {
    if (!p.is_ground()) continue;
    const env::GroundAction a(p);
    if (!std::binary_search(request.legal.begin(), request.legal.end(), a))
      throw AdviceError("action " + a.str() + " is not legal in the queried state");
  }

  AdviceEntry entry;
  if (response.abstraction) {
    entry.condition = *response.abstraction;
    entry.preferred = response.preferred;
  } else {
    std::map<logic::Symbol, logic::Symbol> renaming;
    entry.condition = lift_state(request.state, &renaming);
    for (const auto& p : response.preferred) {
      logic::Atom lifted{p.predicate, {}};
      for (const auto& t : p.args) {
        if (t.is_variable()) throw AdviceError("action " + logic::print(p) + " has variables but no abstraction");
        auto it = renaming.find(t.name());
        if (it == renaming.end()) throw AdviceError("action " + logic::print(p) + " names an unknown object");
        lifted.args.push_back(logic::Term(logic::Term::Kind::Variable, it->second));
      }
      entry.preferred.push_back(std::move(lifted));
    }
  }
  validate(entry, spec);

  if (!logic::satisfies(request.state, entry.condition))
    throw AdviceError("abstraction " + logic::print(entry.condition) + " does not hold in the queried state");
  AdviceMemory one;
  one.insert(entry);
  if (one.preferred(request.state, request.legal).empty())
    throw AdviceError("no preferred action is legal in the queried state");
  return entry;
}

}  // namespace rael::expert
