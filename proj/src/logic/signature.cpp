#include "rael/logic/signature.hpp"

#include "rael/logic/syntax.hpp"

namespace rael::logic {

void SignatureTable::declare(PredicateSignature sig) {
  if (sig.name.name() == "true") throw SignatureError("'true' is reserved");
  if (const auto* existing = find(sig.name)) {
    if (existing->arg_classes != sig.arg_classes)
      throw SignatureError("predicate " + sig.name.name() + " redeclared with a different signature");
    return;
  }
  sigs_.push_back(std::move(sig));
}

void SignatureTable::declare(std::string_view name, std::initializer_list<std::string_view> arg_classes) {
  PredicateSignature sig{Symbol(name), {}};
  for (auto c : arg_classes) sig.arg_classes.emplace_back(c);
  declare(std::move(sig));
}

const PredicateSignature* SignatureTable::find(Symbol name) const {
  for (const auto& s : sigs_)
    if (s.name == name) return &s;
  return nullptr;
}

void SignatureTable::check(const Atom& atom) const {
  const auto* sig = find(atom.predicate);
  if (!sig) throw SignatureError("unknown predicate '" + atom.predicate.name() + "'");
  if (sig->arity() != atom.arity())
    throw SignatureError("predicate '" + atom.predicate.name() + "' has arity " + std::to_string(sig->arity()) +
                         ", got " + print(atom));
}

void SignatureTable::check(const Abstraction& abstraction) const {
  for (const auto& lit : abstraction.literals) check(lit.atom);
}

void SignatureTable::check_ground(const Atom& atom, const ObjectTable& objects) const {
  check(atom);
  const auto* sig = find(atom.predicate);
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const auto cls = objects.class_of(atom.args[i].name());
    if (!cls) throw SignatureError("unknown object '" + atom.args[i].name().name() + "' in " + print(atom));
    if (*cls != sig->arg_classes[i])
      throw SignatureError("argument " + std::to_string(i + 1) + " of " + print(atom) + " must be " +
                           sig->arg_classes[i].name() + ", got " + cls->name());
  }
}

}  // namespace rael::logic
