#include "rael/logic/term.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace rael::logic {

namespace {

bool is_ident_tail(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

void hash_combine(std::size_t& seed, std::size_t v) { seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2); }

}  // namespace

bool is_variable_name(std::string_view name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name.front())) && is_ident_tail(name.substr(1));
}

bool is_constant_name(std::string_view name) {
  if (name.empty()) return false;
  const auto c = static_cast<unsigned char>(name.front());
  return (std::islower(c) || std::isdigit(c)) && is_ident_tail(name.substr(1));
}

Term Term::from_name(std::string_view name) {
  if (is_variable_name(name)) return variable(name);
  if (is_constant_name(name)) return constant(name);
  throw std::invalid_argument("not a term name: '" + std::string(name) + "'");
}

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

std::vector<Symbol> Abstraction::variables() const {
  std::vector<Symbol> out;
  for (const auto& lit : literals)
    for (const auto& t : lit.atom.args)
      if (t.is_variable() && std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
  return out;
}

std::vector<Symbol> Abstraction::positive_variables() const {
  std::vector<Symbol> out;
  for (const auto& lit : literals) {
    if (lit.negated) continue;
    for (const auto& t : lit.atom.args)
      if (t.is_variable() && std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
  }
  return out;
}

Substitution::Substitution(std::initializer_list<Binding> bindings) {
  for (const auto& [var, value] : bindings)
    if (!bind(var, value)) throw std::invalid_argument("conflicting binding for " + var.name());
}

std::optional<Symbol> Substitution::lookup(Symbol var) const {
  for (const auto& [v, c] : bindings_)
    if (v == var) return c;
  return std::nullopt;
}

bool Substitution::bind(Symbol var, Symbol value) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), var,
                             [](const Binding& b, Symbol v) { return b.first < v; });
  if (it != bindings_.end() && it->first == var) return it->second == value;
  bindings_.insert(it, {var, value});
  return true;
}

Term Substitution::apply(const Term& t) const {
  if (!t.is_variable()) return t;
  if (auto c = lookup(t.name())) return Term(Term::Kind::Constant, *c);
  return t;
}

Atom Substitution::apply(const Atom& a) const {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(apply(t));
  return out;
}

std::size_t hash_value(const Term& t) {
  std::size_t h = t.name().hash();
  hash_combine(h, static_cast<std::size_t>(t.kind()));
  return h;
}

std::size_t hash_value(const Atom& a) {
  std::size_t h = a.predicate.hash();
  for (const auto& t : a.args) hash_combine(h, hash_value(t));
  return h;
}

}  // namespace rael::logic
