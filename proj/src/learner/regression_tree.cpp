#include "rael/learner/regression_tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "rael/logic/match.hpp"
#include "rael/logic/syntax.hpp"

namespace rael::learner {

namespace {

struct Stats {
  double n = 0.0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double count, double s, double sq) {
    n += count;
    sum += s;
    sumsq += sq;
  }
  double sse() const { return n > 0.0 ? std::max(0.0, sumsq - sum * sum / n) : 0.0; }
};

// n * VR = SSE(all) - SSE(yes) - SSE(no).
double variance_reduction(const Stats& all, const Stats& yes) {
  const Stats no{all.n - yes.n, all.sum - yes.sum, all.sumsq - yes.sumsq};
  return (all.sse() - yes.sse() - no.sse()) / all.n;
}

std::string query_key(std::span<const logic::Literal> query) {
  std::string key;
  for (const auto& lit : query) {
    if (!key.empty()) key += ", ";
    key += logic::print(lit);
  }
  return key;
}

class TreeBuilder {
 public:
  TreeBuilder(TemplateData& data, std::span<const double> residuals, const LanguageBias& bias,
              const logic::SignatureTable& signatures, const TreeParams& params, std::vector<double>* fitted)
      : data_(data), residuals_(residuals), bias_(bias), signatures_(signatures), params_(params), fitted_(fitted),
        slot_(data.instance_count(), -1) {}

  RegressionTree build() {
    std::vector<std::size_t> all(data_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto roots = root_variables(data_.action());
    grow(all, {}, roots, 1, 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  int grow(const std::vector<std::size_t>& examples, std::vector<logic::Literal> path,
           std::vector<BoundVariable> bound, int next_var, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    // Residuals are shifted by the node mean to keep the variance sums well conditioned.
    double mean = 0.0;
    for (auto e : examples) mean += residuals_[e];
    mean = examples.empty() ? 0.0 : mean / static_cast<double>(examples.size());
    nodes_[id].value = mean;

    const auto n = static_cast<int>(examples.size());
    if (depth >= params_.max_depth || n < 2 * params_.min_leaf || n < 2) return finish_leaf(id, examples);

    // Aggregate per instance: all examples of one (state, action) pair route together.
    std::vector<std::size_t> present;
    std::vector<Stats> per;
    Stats total;
    for (auto e : examples) {
      const auto inst = data_.instance_of(e);
      if (slot_[inst] < 0) {
        slot_[inst] = static_cast<int>(present.size());
        present.push_back(inst);
        per.emplace_back();
      }
      const double r = residuals_[e] - mean;
      per[slot_[inst]].add(1.0, r, r * r);
      total.add(1.0, r, r * r);
    }
    for (auto inst : present) slot_[inst] = -1;

    const auto candidates = generate_candidate_tests(bound, bias_, signatures_, next_var);
    std::optional<std::size_t> best;
    double best_score = 0.0;
    std::vector<logic::Literal> query = path;
    std::vector<char> best_holds, holds(present.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      query.resize(path.size());
      query.insert(query.end(), candidates[c].literals.begin(), candidates[c].literals.end());
      const auto key = query_key(query);
      Stats yes;
      for (std::size_t k = 0; k < present.size(); ++k) {
        holds[k] = data_.holds(present[k], query, key);
        if (holds[k]) yes.add(per[k].n, per[k].sum, per[k].sumsq);
      }
      if (yes.n < params_.min_leaf || total.n - yes.n < params_.min_leaf) continue;
      const double score = variance_reduction(total, yes);
      if (!best || score > best_score) {
        best = c;
        best_score = score;
        best_holds = holds;
      }
    }
    if (!best || best_score < params_.min_gain) return finish_leaf(id, examples);

    for (std::size_t k = 0; k < present.size(); ++k) slot_[present[k]] = best_holds[k] ? 1 : 0;
    std::vector<std::size_t> yes_examples, no_examples;
    for (auto e : examples) (slot_[data_.instance_of(e)] == 1 ? yes_examples : no_examples).push_back(e);
    for (auto inst : present) slot_[inst] = -1;

    const auto& test = candidates[*best];
    nodes_[id].test = test.literals;
    auto yes_path = path;
    yes_path.insert(yes_path.end(), test.literals.begin(), test.literals.end());
    auto yes_bound = bound;
    yes_bound.insert(yes_bound.end(), test.new_vars.begin(), test.new_vars.end());
    const int yes_id = grow(yes_examples, std::move(yes_path), std::move(yes_bound),
                            next_var + static_cast<int>(test.new_vars.size()), depth + 1);
    const int no_id = grow(no_examples, std::move(path), std::move(bound), next_var, depth + 1);
    nodes_[id].yes = yes_id;
    nodes_[id].no = no_id;
    return id;
  }

  int finish_leaf(int id, const std::vector<std::size_t>& examples) {
    if (fitted_)
      for (auto e : examples) (*fitted_)[e] = nodes_[id].value;
    return id;
  }

  TemplateData& data_;
  std::span<const double> residuals_;
  const LanguageBias& bias_;
  const logic::SignatureTable& signatures_;
  const TreeParams& params_;
  std::vector<double>* fitted_;
  std::vector<int> slot_;
  std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

logic::Substitution action_binding(const env::GroundAction& action) {
  logic::Substitution theta;
  for (std::size_t i = 0; i < action.args().size(); ++i)
    theta.bind(action_variable(static_cast<int>(i) + 1), action.args()[i].name());
  return theta;
}

std::vector<BoundVariable> root_variables(const env::ActionTemplate& action) {
  std::vector<BoundVariable> out;
  for (std::size_t i = 0; i < action.params.size(); ++i)
    out.push_back({action_variable(static_cast<int>(i) + 1), action.params[i].cls});
  return out;
}

std::optional<Split> best_split(std::span<const double> targets, std::span<const std::vector<bool>> covers,
                                int min_leaf, double min_gain) {
  if (targets.empty()) return std::nullopt;
  double mean = 0.0;
  for (double t : targets) mean += t;
  mean /= static_cast<double>(targets.size());
  Stats total;
  for (double t : targets) total.add(1.0, t - mean, (t - mean) * (t - mean));

  std::optional<Split> best;
  for (std::size_t j = 0; j < covers.size(); ++j) {
    if (covers[j].size() != targets.size()) throw std::invalid_argument("coverage vector size mismatch");
    Stats yes;
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (covers[j][i]) yes.add(1.0, targets[i] - mean, (targets[i] - mean) * (targets[i] - mean));
    if (yes.n < min_leaf || total.n - yes.n < min_leaf) continue;
    const double score = variance_reduction(total, yes);
    if (!best || score > best->score) best = Split{j, score};
  }
  if (best && best->score < min_gain) return std::nullopt;
  return best;
}

RegressionTree RegressionTree::leaf(double value) {
  RegressionTree t;
  t.nodes_[0].value = value;
  return t;
}

RegressionTree::RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("regression tree needs at least one node");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.leaf() != (n.no < 0)) throw std::invalid_argument("inner node needs both children");
    if (!n.leaf() && (n.yes <= static_cast<int>(i) || n.no <= static_cast<int>(i) ||
                      n.yes >= static_cast<int>(nodes_.size()) || n.no >= static_cast<int>(nodes_.size())))
      throw std::invalid_argument("child index out of range");
  }
}

double RegressionTree::evaluate(const logic::SymbolicState& state, const logic::Substitution& binding) const {
  std::vector<logic::Literal> query;
  int i = 0;
  while (!nodes_[i].leaf()) {
    const auto& node = nodes_[i];
    const auto mark = query.size();
    query.insert(query.end(), node.test.begin(), node.test.end());
    if (logic::satisfies(state, query, binding)) {
      i = node.yes;
    } else {
      query.resize(mark);
      i = node.no;
    }
  }
  return nodes_[i].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int out = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out = std::max(out, d[i]);
    if (!nodes_[i].leaf()) d[nodes_[i].yes] = d[nodes_[i].no] = d[i] + 1;
  }
  return out;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf(); }));
}

bool operator==(const RegressionTree& a, const RegressionTree& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[i];
    if (x.test != y.test || x.value != y.value || x.yes != y.yes || x.no != y.no) return false;
  }
  return true;
}

TemplateData::TemplateData(const env::ActionTemplate& action, std::span<const TrainingExample> examples)
    : action_(action) {
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_hash;
  for (const auto& ex : examples) {
    if (ex.action.name() != action.name) continue;
    if (ex.action.args().size() != action.arity())
      throw std::invalid_argument("example " + ex.action.str() + " does not match template arity");
    const std::size_t h = ex.state.hash() ^ (logic::hash_value(ex.action.atom()) * 0x9e3779b97f4a7c15ULL);
    auto binding = action_binding(ex.action);
    auto& bucket = by_hash[h];
    std::optional<std::size_t> found;
    for (auto inst : bucket)
      if (instances_[inst].binding == binding && *instances_[inst].state == ex.state) {
        found = inst;
        break;
      }
    if (!found) {
      found = instances_.size();
      instances_.push_back({&ex.state, std::move(binding)});
      bucket.push_back(*found);
    }
    instance_of_.push_back(*found);
    targets_.push_back(ex.target);
  }
}

bool TemplateData::holds(std::size_t instance, std::span<const logic::Literal> query, const std::string& key) {
  auto& row = cache_[key];
  if (row.empty()) row.assign(instances_.size(), -1);
  auto& v = row[instance];
  if (v < 0) v = logic::satisfies(*instances_[instance].state, query, instances_[instance].binding) ? 1 : 0;
  return v == 1;
}

RegressionTree fit_tree(TemplateData& data, std::span<const double> residuals, const LanguageBias& bias,
                        const logic::SignatureTable& signatures, const TreeParams& params,
                        std::vector<double>* fitted) {
  if (residuals.size() != data.size()) throw std::invalid_argument("one residual per example required");
  if (fitted) fitted->assign(data.size(), 0.0);
  if (data.size() == 0) return RegressionTree::leaf(0.0);
  return TreeBuilder(data, residuals, bias, signatures, params, fitted).build();
}

}  // namespace rael::learner
