#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rael/logic/symbol.hpp"

namespace rael::logic {

/// A constant (lowercase-initial name) or a variable (uppercase-initial name).
class Term {
 public:
  enum class Kind : std::uint8_t { Constant, Variable };

  Term() = default;
  Term(Kind kind, Symbol name) : kind_(kind), name_(name) {}

  static Term constant(std::string_view name) { return {Kind::Constant, Symbol(name)}; }
  static Term variable(std::string_view name) { return {Kind::Variable, Symbol(name)}; }
  /// Picks the kind from the lexical class of the first character.
  static Term from_name(std::string_view name);

  Kind kind() const { return kind_; }
  Symbol name() const { return name_; }
  bool is_variable() const { return kind_ == Kind::Variable; }
  bool is_constant() const { return kind_ == Kind::Constant; }

  friend bool operator==(const Term&, const Term&) = default;
  friend std::strong_ordering operator<=>(const Term&, const Term&) = default;

 private:
  Kind kind_ = Kind::Constant;
  Symbol name_;
};

bool is_variable_name(std::string_view name);
bool is_constant_name(std::string_view name);

struct Atom {
  Symbol predicate;
  std::vector<Term> args;

  Atom() = default;
  Atom(Symbol p, std::vector<Term> a) : predicate(p), args(std::move(a)) {}

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend std::strong_ordering operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of literals; the empty conjunction holds in every state.
struct Abstraction {
  std::vector<Literal> literals;

  bool empty() const { return literals.empty(); }
  /// Distinct variables in order of first occurrence.
  std::vector<Symbol> variables() const;
  /// Variables occurring in at least one positive literal.
  std::vector<Symbol> positive_variables() const;

  friend bool operator==(const Abstraction&, const Abstraction&) = default;
};

/// Finite map from variables to constants, kept sorted by variable name.
class Substitution {
 public:
  using Binding = std::pair<Symbol, Symbol>;

  Substitution() = default;
  Substitution(std::initializer_list<Binding> bindings);

  std::optional<Symbol> lookup(Symbol var) const;
  /// Binds var to value; false if var is already bound to something else.
  bool bind(Symbol var, Symbol value);

  const std::vector<Binding>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  Term apply(const Term& t) const;
  Atom apply(const Atom& a) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;
  friend std::strong_ordering operator<=>(const Substitution&, const Substitution&) = default;

 private:
  std::vector<Binding> bindings_;
};

std::size_t hash_value(const Term& t);
std::size_t hash_value(const Atom& a);

}  // namespace rael::logic

template <>
struct std::hash<rael::logic::Atom> {
  std::size_t operator()(const rael::logic::Atom& a) const noexcept { return rael::logic::hash_value(a); }
};
