#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "rael/logic/signature.hpp"
#include "rael/logic/term.hpp"

namespace rael::learner {

enum class ArgMode { Input, Output, Constant };

/// One literal template, written pred(+,-,#): '+' reuses a bound variable of
/// the declared class, '-' introduces a fresh variable, '#' enumerates the
/// constants declared for that argument class.
struct ModeDeclaration {
  logic::Symbol predicate;
  std::vector<ArgMode> modes;
};

struct LanguageBias {
  std::vector<ModeDeclaration> templates;
  std::map<logic::Symbol, std::vector<logic::Symbol>> constants;
  int max_new_vars = 2;
  int max_literals = 1;

  /// Lines are either mode declarations ("on(+,-)") or constant declarations
  /// ("#pos: p0 p1 p2"). Throws logic::SignatureError if a template names an
  /// undeclared predicate or has the wrong arity, std::invalid_argument on bad syntax.
  static LanguageBias parse(const std::vector<std::string>& lines, const logic::SignatureTable& signatures);
};

struct BoundVariable {
  logic::Symbol name;
  logic::Symbol cls;

  friend bool operator==(const BoundVariable&, const BoundVariable&) = default;
};

/// A candidate node test: a conjunction plus the variables it introduces.
struct NodeTest {
  std::vector<logic::Literal> literals;
  std::vector<BoundVariable> new_vars;
};

/// Name of the n-th variable introduced below the root (V1, V2, ...).
logic::Symbol fresh_variable(int n);
/// Root variables A1..Ak stand for the action arguments.
logic::Symbol action_variable(int i);

/// Every test the bias allows below a path that has bound `bound`; fresh
/// variables are numbered from next_var. Deterministic and duplicate-free.
std::vector<NodeTest> generate_candidate_tests(std::span<const BoundVariable> bound, const LanguageBias& bias,
                                               const logic::SignatureTable& signatures, int next_var);

}  // namespace rael::learner
