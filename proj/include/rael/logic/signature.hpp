#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rael/logic/state.hpp"
#include "rael/logic/term.hpp"

namespace rael::logic {

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PredicateSignature {
  Symbol name;
  std::vector<Symbol> arg_classes;

  std::size_t arity() const { return arg_classes.size(); }
};

/// Declared predicates of one environment. Arity is fixed per name.
class SignatureTable {
 public:
  void declare(PredicateSignature sig);
  /// Convenience: declare("on", {"block", "block"}).
  void declare(std::string_view name, std::initializer_list<std::string_view> arg_classes);

  const PredicateSignature* find(Symbol name) const;
  const std::vector<PredicateSignature>& all() const { return sigs_; }

  /// Throws SignatureError on unknown predicate or wrong arity.
  void check(const Atom& atom) const;
  void check(const Abstraction& abstraction) const;
  /// Also checks that each constant argument has the declared class.
  void check_ground(const Atom& atom, const ObjectTable& objects) const;

 private:
  std::vector<PredicateSignature> sigs_;
};

}  // namespace rael::logic
