#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rael/learner/regression_tree.hpp"

namespace rael::learner {

class UnknownTemplate : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class ModelFormatError : public std::runtime_error {
 public:
  ModelFormatError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct BoostingParams {
  TreeParams tree;
  int stages = 10;
  double learning_rate = 0.5;
  /// F0 for every template; the mean target when unset.
  std::optional<double> initial;
};

/// One boosted ensemble per action template: Q(z,a) = F0 + sum of rate * tree(z,a).
class BoostedQFunction {
 public:
  struct Stage {
    RegressionTree tree;
    double rate = 1.0;
  };
  struct Ensemble {
    env::ActionTemplate action;
    double initial = 0.0;
    std::vector<Stage> stages;
  };

  BoostedQFunction() = default;
  static BoostedQFunction constant(const std::vector<env::ActionTemplate>& actions, double value);

  /// Throws UnknownTemplate if action's template has no ensemble.
  double predict(const logic::SymbolicState& state, const env::GroundAction& action) const;

  bool knows(logic::Symbol action) const;
  const Ensemble& ensemble(logic::Symbol action) const;
  const std::vector<Ensemble>& ensembles() const { return ensembles_; }
  /// Inserts or replaces, keeping ensembles ordered by action name.
  void set(Ensemble ensemble);

  std::string serialize() const;
  static BoostedQFunction deserialize(std::string_view text);

  friend bool operator==(const BoostedQFunction&, const BoostedQFunction&);

 private:
  std::vector<Ensemble> ensembles_;
};

/// Q(state, a) for each action, in the given order.
std::vector<double> q_values(const BoostedQFunction& q, const logic::SymbolicState& state,
                             std::span<const env::GroundAction> actions);
/// First index of the maximum. Legal actions come canonically ordered, so this
/// is the lexicographic tie-break.
std::size_t argmax(std::span<const double> values);

struct FitReport {
  /// Training MSE after F0 and after each stage, per template that had data.
  std::map<logic::Symbol, std::vector<double>> mse;
};

/// Refits every template of `previous` that has examples in buffer; the rest
/// keep their previous ensemble. Examples of templates unknown to previous
/// raise UnknownTemplate.
BoostedQFunction fit_boosted(std::span<const TrainingExample> buffer, const BoostedQFunction& previous,
                             const LanguageBias& bias, const logic::SignatureTable& signatures,
                             const BoostingParams& params, FitReport* report = nullptr);

}  // namespace rael::learner
