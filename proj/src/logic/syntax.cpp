#include "rael/logic/syntax.hpp"

#include <cctype>

namespace rael::logic {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string_view ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return text_.substr(start, pos_ - start);
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " in '" + std::string(text_) + "'", pos_);
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Term read_term(Lexer& lx) {
  const std::size_t at = lx.pos();
  const auto name = lx.ident();
  if (is_variable_name(name)) return Term::variable(name);
  if (is_constant_name(name)) return Term::constant(name);
  throw ParseError("bad term name '" + std::string(name) + "'", at);
}

Atom read_atom(Lexer& lx) {
  const std::size_t at = lx.pos();
  const auto name = lx.ident();
  if (!is_constant_name(name)) throw ParseError("predicate must start lowercase: '" + std::string(name) + "'", at);
  Atom a{Symbol(name), {}};
  if (lx.accept('(')) {
    if (!lx.accept(')')) {
      do {
        a.args.push_back(read_term(lx));
      } while (lx.accept(','));
      lx.expect(')');
    }
  }
  return a;
}

Literal read_literal(Lexer& lx) {
  Literal l;
  l.negated = lx.accept('!');
  l.atom = read_atom(lx);
  return l;
}

bool is_true_keyword(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b) == "true";
}

}  // namespace

Term parse_term(std::string_view text) {
  Lexer lx(text);
  Term t = read_term(lx);
  if (!lx.at_end()) lx.fail("trailing input");
  return t;
}

Atom parse_atom(std::string_view text) {
  Lexer lx(text);
  Atom a = read_atom(lx);
  if (!lx.at_end()) lx.fail("trailing input");
  return a;
}

Literal parse_literal(std::string_view text) {
  Lexer lx(text);
  Literal l = read_literal(lx);
  if (!lx.at_end()) lx.fail("trailing input");
  return l;
}

Abstraction parse_abstraction(std::string_view text) {
  Abstraction out;
  Lexer lx(text);
  if (lx.at_end() || is_true_keyword(text)) return out;
  do {
    out.literals.push_back(read_literal(lx));
  } while (lx.accept(','));
  if (!lx.at_end()) lx.fail("trailing input");
  return out;
}

std::vector<Atom> parse_atom_list(std::string_view text, char sep) {
  std::vector<Atom> out;
  Lexer lx(text);
  if (lx.at_end()) return out;
  do {
    out.push_back(read_atom(lx));
  } while (lx.accept(sep));
  if (!lx.at_end()) lx.fail("trailing input");
  return out;
}

std::string print(const Term& t) { return t.name().name(); }

std::string print(const Atom& a) {
  std::string s = a.predicate.name();
  if (a.args.empty()) return s;
  s += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += a.args[i].name().name();
  }
  s += ')';
  return s;
}

std::string print(const Literal& l) { return (l.negated ? "!" : "") + print(l.atom); }

std::string print(const Abstraction& a) {
  if (a.empty()) return "true";
  std::string s;
  for (std::size_t i = 0; i < a.literals.size(); ++i) {
    if (i) s += ", ";
    s += print(a.literals[i]);
  }
  return s;
}

std::string print(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, value] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += var.name() + "->" + value.name();
  }
  return out + "}";
}

std::string print(const SymbolicState& s) { return print_atom_list(s.atoms()); }

std::string print_atom_list(const std::vector<Atom>& atoms, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += sep;
    out += print(atoms[i]);
  }
  return out;
}

}  // namespace rael::logic
