#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rael/env/environment.hpp"
#include "rael/learner/language_bias.hpp"
#include "rael/logic/state.hpp"

namespace rael::learner {

struct TrainingExample {
  logic::SymbolicState state;
  env::GroundAction action;
  double target = 0.0;
};

struct TreeParams {
  int max_depth = 4;
  int min_leaf = 5;
  double min_gain = 1e-6;
};

/// Binds the root variables A1..Ak to the action's arguments.
logic::Substitution action_binding(const env::GroundAction& action);
std::vector<BoundVariable> root_variables(const env::ActionTemplate& action);

struct Split {
  std::size_t index = 0;
  double score = 0.0;
};

/// Weighted variance reduction of splitting `targets` by covers[j]. Picks the
/// highest-scoring test among those leaving at least min_leaf examples per
/// side; earlier tests win ties. nullopt when nothing reaches min_gain.
std::optional<Split> best_split(std::span<const double> targets, std::span<const std::vector<bool>> covers,
                                int min_leaf, double min_gain);

/// Binary tree stored in preorder-indexed nodes; node 0 is the root.
class RegressionTree {
 public:
  struct Node {
    std::vector<logic::Literal> test;
    double value = 0.0;
    int yes = -1;
    int no = -1;

    bool leaf() const { return yes < 0; }
  };

  RegressionTree() : nodes_{Node{}} {}
  static RegressionTree leaf(double value);
  explicit RegressionTree(std::vector<Node> nodes);

  /// The yes branch is taken iff the path query (yes-side tests so far plus
  /// this node's test) has a model extending `binding`.
  double evaluate(const logic::SymbolicState& state, const logic::Substitution& binding) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;
  std::size_t leaf_count() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&);

 private:
  std::vector<Node> nodes_;
};

/// The examples of one action template grouped by distinct (state, action)
/// pair. Memoizes which pairs satisfy which queries so that every boosting
/// stage reuses earlier match results. Holds pointers into `examples`.
class TemplateData {
 public:
  TemplateData(const env::ActionTemplate& action, std::span<const TrainingExample> examples);

  const env::ActionTemplate& action() const { return action_; }
  std::size_t size() const { return instance_of_.size(); }
  std::size_t instance_count() const { return instances_.size(); }
  std::size_t instance_of(std::size_t example) const { return instance_of_[example]; }
  std::span<const double> targets() const { return targets_; }

  bool holds(std::size_t instance, std::span<const logic::Literal> query, const std::string& key);

 private:
  struct Instance {
    const logic::SymbolicState* state;
    logic::Substitution binding;
  };

  env::ActionTemplate action_;
  std::vector<Instance> instances_;
  std::vector<std::size_t> instance_of_;
  std::vector<double> targets_;
  std::unordered_map<std::string, std::vector<std::int8_t>> cache_;
};

/// Greedy top-down fit of `residuals` (one per example of data). If fitted is
/// given it receives the tree's value for every example.
RegressionTree fit_tree(TemplateData& data, std::span<const double> residuals, const LanguageBias& bias,
                        const logic::SignatureTable& signatures, const TreeParams& params,
                        std::vector<double>* fitted = nullptr);

}  // namespace rael::learner
