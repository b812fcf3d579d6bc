#include "rael/learner/boosted_q.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rael/logic/syntax.hpp"

namespace rael::learner {

namespace {

constexpr const char* kHeader = "rael-model 1";

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_tree(std::ostringstream& out, const RegressionTree& tree, int i) {
  const auto& n = tree.nodes()[i];
  if (n.leaf()) {
    out << "leaf " << real(n.value) << '\n';
    return;
  }
  out << "split " << real(n.value) << ' ' << logic::print(logic::Abstraction{n.test}) << '\n';
  write_tree(out, tree, n.yes);
  write_tree(out, tree, n.no);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  bool next(std::string& keyword, std::string& rest) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto sp = line.find(' ');
      keyword = line.substr(0, sp);
      rest = sp == std::string::npos ? "" : line.substr(sp + 1);
      return true;
    }
    return false;
  }

  void expect(const std::string& want, std::string& rest) {
    std::string kw;
    if (!next(kw, rest)) fail("unexpected end of model, wanted '" + want + "'");
    if (kw != want) fail("expected '" + want + "', found '" + kw + "'");
  }

  double number(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end == text.c_str()) fail("expected a number, found '" + text + "'");
    if (!std::isfinite(v)) fail("non-finite value");
    return v;
  }

  int line() const { return line_no_; }
  [[noreturn]] void fail(const std::string& what) const { throw ModelFormatError(what, line_no_); }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

int read_tree(Reader& r, std::vector<RegressionTree::Node>& nodes, int depth) {
  if (depth > 64) r.fail("tree too deep");
  std::string kw, rest;
  if (!r.next(kw, rest)) r.fail("unexpected end of tree");
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (kw == "leaf") {
    nodes[id].value = r.number(rest);
    return id;
  }
  if (kw != "split") r.fail("expected 'leaf' or 'split', found '" + kw + "'");
  const auto sp = rest.find(' ');
  if (sp == std::string::npos) r.fail("split needs a value and a test");
  nodes[id].value = r.number(rest.substr(0, sp));
  try {
    nodes[id].test = logic::parse_abstraction(rest.substr(sp + 1)).literals;
  } catch (const logic::ParseError& e) {
    r.fail(e.what());
  }
  if (nodes[id].test.empty()) r.fail("split test is empty");
  const int yes = read_tree(r, nodes, depth + 1);
  const int no = read_tree(r, nodes, depth + 1);
  nodes[id].yes = yes;
  nodes[id].no = no;
  return id;
}

double mse(std::span<const double> targets, std::span<const double> pred) {
  double s = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) s += (targets[i] - pred[i]) * (targets[i] - pred[i]);
  return targets.empty() ? 0.0 : s / static_cast<double>(targets.size());
}

}  // namespace

BoostedQFunction BoostedQFunction::constant(const std::vector<env::ActionTemplate>& actions, double value) {
  BoostedQFunction q;
  for (const auto& a : actions) q.set({a, value, {}});
  return q;
}

double BoostedQFunction::predict(const logic::SymbolicState& state, const env::GroundAction& action) const {
  const auto& e = ensemble(action.name());
  if (action.args().size() != e.action.arity())
    throw UnknownTemplate("action " + action.str() + " does not match the arity of its template");
  double q = e.initial;
  if (e.stages.empty()) return q;
  const auto binding = action_binding(action);
  for (const auto& stage : e.stages) q += stage.rate * stage.tree.evaluate(state, binding);
  return q;
}

bool BoostedQFunction::knows(logic::Symbol action) const {
  return std::any_of(ensembles_.begin(), ensembles_.end(), [&](const Ensemble& e) { return e.action.name == action; });
}

const BoostedQFunction::Ensemble& BoostedQFunction::ensemble(logic::Symbol action) const {
  for (const auto& e : ensembles_)
    if (e.action.name == action) return e;
  throw UnknownTemplate("no ensemble for action template '" + action.name() + "'");
}

void BoostedQFunction::set(Ensemble ensemble) {
  auto it = std::lower_bound(ensembles_.begin(), ensembles_.end(), ensemble.action.name,
                             [](const Ensemble& e, logic::Symbol s) { return e.action.name < s; });
  if (it != ensembles_.end() && it->action.name == ensemble.action.name)
    *it = std::move(ensemble);
  else
    ensembles_.insert(it, std::move(ensemble));
}

std::string BoostedQFunction::serialize() const {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& e : ensembles_) {
    out << "ensemble " << e.action.name.name();
    for (const auto& p : e.action.params) out << ' ' << p.name.name() << ':' << p.cls.name();
    out << '\n' << "initial " << real(e.initial) << '\n';
    for (const auto& s : e.stages) {
      out << "stage " << real(s.rate) << '\n';
      write_tree(out, s.tree, 0);
    }
    out << "end\n";
  }
  return out.str();
}

BoostedQFunction BoostedQFunction::deserialize(std::string_view text) {
  Reader r(text);
  std::string kw, rest;
  if (!r.next(kw, rest) || kw + " " + rest != kHeader) r.fail("missing '" + std::string(kHeader) + "' header");
  BoostedQFunction q;
  while (r.next(kw, rest)) {
    if (kw != "ensemble") r.fail("expected 'ensemble', found '" + kw + "'");
    Ensemble e;
    std::istringstream head(rest);
    std::string name, param;
    head >> name;
    if (!logic::is_constant_name(name)) r.fail("bad action name '" + name + "'");
    e.action.name = logic::Symbol(name);
    while (head >> param) {
      const auto colon = param.find(':');
      if (colon == std::string::npos) r.fail("parameter needs name:class, found '" + param + "'");
      e.action.params.push_back({logic::Symbol(param.substr(0, colon)), logic::Symbol(param.substr(colon + 1))});
    }
    if (q.knows(e.action.name)) r.fail("duplicate ensemble '" + name + "'");
    r.expect("initial", rest);
    e.initial = r.number(rest);
    while (true) {
      if (!r.next(kw, rest)) r.fail("unexpected end of ensemble");
      if (kw == "end") break;
      if (kw != "stage") r.fail("expected 'stage' or 'end', found '" + kw + "'");
      Stage s;
      s.rate = r.number(rest);
      std::vector<RegressionTree::Node> nodes;
      read_tree(r, nodes, 0);
      try {
        s.tree = RegressionTree(std::move(nodes));
      } catch (const std::invalid_argument& ex) {
        r.fail(ex.what());
      }
      e.stages.push_back(std::move(s));
    }
    q.set(std::move(e));
  }
  return q;
}

bool operator==(const BoostedQFunction& a, const BoostedQFunction& b) {
  if (a.ensembles_.size() != b.ensembles_.size()) return false;
  for (std::size_t i = 0; i < a.ensembles_.size(); ++i) {
    const auto& x = a.ensembles_[i];
    const auto& y = b.ensembles_[i];
    if (x.action.name != y.action.name || x.action.arity() != y.action.arity() || x.initial != y.initial ||
        x.stages.size() != y.stages.size())
      return false;
    for (std::size_t k = 0; k < x.action.arity(); ++k)
      if (x.action.params[k].name != y.action.params[k].name || x.action.params[k].cls != y.action.params[k].cls)
        return false;
    for (std::size_t k = 0; k < x.stages.size(); ++k)
      if (x.stages[k].rate != y.stages[k].rate || !(x.stages[k].tree == y.stages[k].tree)) return false;
  }
  return true;
}

std::vector<double> q_values(const BoostedQFunction& q, const logic::SymbolicState& state,
                             std::span<const env::GroundAction> actions) {
  std::vector<double> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(q.predict(state, a));
  return out;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

BoostedQFunction fit_boosted(std::span<const TrainingExample> buffer, const BoostedQFunction& previous,
                             const LanguageBias& bias, const logic::SignatureTable& signatures,
                             const BoostingParams& params, FitReport* report) {
  for (const auto& ex : buffer) {
    if (!previous.knows(ex.action.name()))
      throw UnknownTemplate("no ensemble for action template '" + ex.action.name().name() + "'");
    if (!std::isfinite(ex.target)) throw std::invalid_argument("non-finite target for " + ex.action.str());
  }

  BoostedQFunction out = previous;
  for (const auto& prior : previous.ensembles()) {
    TemplateData data(prior.action, buffer);
    if (data.size() == 0) continue;
    const auto targets = data.targets();

    BoostedQFunction::Ensemble e{prior.action, 0.0, {}};
    if (params.initial) {
      e.initial = *params.initial;
    } else {
      for (double t : targets) e.initial += t;
      e.initial /= static_cast<double>(targets.size());
    }
    std::vector<double> pred(targets.size(), e.initial), residual(targets.size()), fitted;
    std::vector<double> history{mse(targets, pred)};
    for (int m = 0; m < params.stages; ++m) {
      for (std::size_t i = 0; i < targets.size(); ++i) residual[i] = targets[i] - pred[i];
      auto tree = fit_tree(data, residual, bias, signatures, params.tree, &fitted);
      for (std::size_t i = 0; i < targets.size(); ++i) pred[i] += params.learning_rate * fitted[i];
      e.stages.push_back({std::move(tree), params.learning_rate});
      history.push_back(mse(targets, pred));
    }
    if (report) report->mse[prior.action.name] = std::move(history);
    out.set(std::move(e));
  }
  return out;
}

}  // namespace rael::learner
