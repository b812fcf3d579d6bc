#include "rael/learner/language_bias.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "rael/logic/syntax.hpp"

namespace rael::learner {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

ModeDeclaration parse_mode(const std::string& line) {
  const auto open = line.find('(');
  ModeDeclaration d;
  if (open == std::string::npos) {
    d.predicate = logic::Symbol(trim(line));
    if (!logic::is_constant_name(d.predicate.name())) throw std::invalid_argument("bad mode declaration: " + line);
    return d;
  }
  const auto close = line.rfind(')');
  if (close == std::string::npos || close < open) throw std::invalid_argument("bad mode declaration: " + line);
  d.predicate = logic::Symbol(trim(line.substr(0, open)));
  if (!logic::is_constant_name(d.predicate.name())) throw std::invalid_argument("bad mode declaration: " + line);
  std::stringstream args(line.substr(open + 1, close - open - 1));
  std::string tok;
  while (std::getline(args, tok, ',')) {
    tok = trim(tok);
    if (tok == "+") d.modes.push_back(ArgMode::Input);
    else if (tok == "-") d.modes.push_back(ArgMode::Output);
    else if (tok == "#") d.modes.push_back(ArgMode::Constant);
    else if (!tok.empty() || !d.modes.empty()) throw std::invalid_argument("bad mode '" + tok + "' in " + line);
  }
  return d;
}

// Cartesian expansion of one mode declaration.
void expand(const ModeDeclaration& decl, const logic::PredicateSignature& sig, std::span<const BoundVariable> bound,
            const LanguageBias& bias, int next_var, std::vector<NodeTest>& out) {
  const std::size_t arity = decl.modes.size();
  std::vector<std::vector<logic::Term>> choices(arity);
  std::vector<BoundVariable> fresh;
  for (std::size_t k = 0; k < arity; ++k) {
    const auto cls = sig.arg_classes[k];
    switch (decl.modes[k]) {
      case ArgMode::Input:
        for (const auto& v : bound)
          if (v.cls == cls) choices[k].push_back(logic::Term(logic::Term::Kind::Variable, v.name));
        break;
      case ArgMode::Output: {
        const auto name = fresh_variable(next_var + static_cast<int>(fresh.size()));
        fresh.push_back({name, cls});
        choices[k].push_back(logic::Term(logic::Term::Kind::Variable, name));
        break;
      }
      case ArgMode::Constant:
        if (auto it = bias.constants.find(cls); it != bias.constants.end())
          for (auto c : it->second) choices[k].push_back(logic::Term(logic::Term::Kind::Constant, c));
        break;
    }
    if (choices[k].empty()) return;
  }
  if (static_cast<int>(fresh.size()) > bias.max_new_vars) return;

  std::vector<std::size_t> idx(arity, 0);
  while (true) {
    NodeTest t;
    logic::Literal lit{{decl.predicate, {}}, false};
    for (std::size_t k = 0; k < arity; ++k) lit.atom.args.push_back(choices[k][idx[k]]);
    t.literals.push_back(std::move(lit));
    t.new_vars = fresh;
    out.push_back(std::move(t));
    std::size_t k = 0;
    while (k < arity && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == arity) break;
  }
}

std::vector<NodeTest> single_literal_tests(std::span<const BoundVariable> bound, const LanguageBias& bias,
                                           const logic::SignatureTable& signatures, int next_var) {
  std::vector<NodeTest> out;
  for (const auto& decl : bias.templates) {
    const auto* sig = signatures.find(decl.predicate);
    if (!sig) throw logic::SignatureError("language bias names unknown predicate " + decl.predicate.name());
    expand(decl, *sig, bound, bias, next_var, out);
  }
  return out;
}

}  // namespace

logic::Symbol fresh_variable(int n) { return logic::Symbol("V" + std::to_string(n)); }
logic::Symbol action_variable(int i) { return logic::Symbol("A" + std::to_string(i)); }

LanguageBias LanguageBias::parse(const std::vector<std::string>& lines, const logic::SignatureTable& signatures) {
  LanguageBias bias;
  for (const auto& raw : lines) {
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("constant declaration needs ':': " + line);
      const logic::Symbol cls(trim(line.substr(1, colon - 1)));
      std::stringstream ss(line.substr(colon + 1));
      std::string c;
      while (ss >> c) {
        if (!logic::is_constant_name(c)) throw std::invalid_argument("bad constant '" + c + "' in " + line);
        bias.constants[cls].emplace_back(c);
      }
      continue;
    }
    auto decl = parse_mode(line);
    const auto* sig = signatures.find(decl.predicate);
    if (!sig) throw logic::SignatureError("language bias names unknown predicate '" + decl.predicate.name() + "'");
    if (sig->arity() != decl.modes.size())
      throw logic::SignatureError("mode declaration " + line + " does not match arity " +
                                  std::to_string(sig->arity()));
    bias.templates.push_back(std::move(decl));
  }
  return bias;
}

std::vector<NodeTest> generate_candidate_tests(std::span<const BoundVariable> bound, const LanguageBias& bias,
                                               const logic::SignatureTable& signatures, int next_var) {
  std::vector<NodeTest> out;
  std::set<std::string> seen;
  auto keep = [&](NodeTest t) {
    logic::Abstraction conj{t.literals};
    if (seen.insert(logic::print(conj)).second) out.push_back(std::move(t));
  };

  const auto firsts = single_literal_tests(bound, bias, signatures, next_var);
  for (const auto& t : firsts) keep(t);
  if (bias.max_literals < 2) return out;

  for (const auto& first : firsts) {
    std::vector<BoundVariable> extended(bound.begin(), bound.end());
    extended.insert(extended.end(), first.new_vars.begin(), first.new_vars.end());
    const int next = next_var + static_cast<int>(first.new_vars.size());
    for (const auto& second : single_literal_tests(extended, bias, signatures, next)) {
      if (second.literals.front() == first.literals.front()) continue;
      if (static_cast<int>(first.new_vars.size() + second.new_vars.size()) > bias.max_new_vars) continue;
      NodeTest t = first;
      t.literals.push_back(second.literals.front());
      t.new_vars.insert(t.new_vars.end(), second.new_vars.begin(), second.new_vars.end());
      keep(std::move(t));
    }
  }
  return out;
}

}  // namespace rael::learner
