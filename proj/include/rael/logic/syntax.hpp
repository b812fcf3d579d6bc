#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rael/logic/state.hpp"
#include "rael/logic/term.hpp"

// Text syntax shared by config files, model files, and the wire protocol:
//
//   atom         pred(arg1,arg2)   or a bare name for 0-ary predicates
//   literal      atom | !atom
//   conjunction  literal, literal, ...   ("true" or empty text is the empty conjunction)
//
// Variables start uppercase, constants lowercase or with a digit. Whitespace is
// ignored between tokens. print() output parses back to an equal value.

namespace rael::logic {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t column)
      : std::runtime_error(what + " at column " + std::to_string(column + 1)), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

Term parse_term(std::string_view text);
Atom parse_atom(std::string_view text);
Literal parse_literal(std::string_view text);
Abstraction parse_abstraction(std::string_view text);
/// Atoms separated by `sep` (',' for states, '|' for action sets).
std::vector<Atom> parse_atom_list(std::string_view text, char sep = ',');

std::string print(const Term& t);
std::string print(const Atom& a);
std::string print(const Literal& l);
std::string print(const Abstraction& a);
std::string print(const Substitution& s);
/// Atoms of the state in canonical order, comma-separated.
std::string print(const SymbolicState& s);
std::string print_atom_list(const std::vector<Atom>& atoms, std::string_view sep = ", ");

}  // namespace rael::logic
