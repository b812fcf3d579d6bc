#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rael/expert/advice.hpp"

namespace rael::expert {

class RulesParseError : public std::runtime_error {
 public:
  RulesParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct OracleRule {
  std::string id;
  AdviceEntry entry;
};

/// One rule per line: `condition => action1 | action2`. Blank lines and lines
/// starting with '#' are skipped. Rules are named r1, r2, ... in file order
/// unless the line starts with `name:`. Every rule is validated against spec.
std::vector<OracleRule> parse_rules(std::string_view text, const env::EnvironmentSpec& spec);
std::vector<OracleRule> load_rules(const std::string& path, const env::EnvironmentSpec& spec);

enum class OracleMode { ActionOnly, WithAbstraction };

/// Answers from the first rule (file order) whose condition has a legal
/// preferred grounding in the queried state; declines when none does. In
/// action-only mode it names the legal ground actions and omits the abstraction.
class ScriptedOracle : public Expert {
 public:
  ScriptedOracle(std::vector<OracleRule> rules, OracleMode mode) : rules_(std::move(rules)), mode_(mode) {}

  std::optional<AdviceResponse> advise(const AdviceRequest& request) override;

  const std::vector<OracleRule>& rules() const { return rules_; }
  OracleMode mode() const { return mode_; }

 private:
  std::vector<OracleRule> rules_;
  OracleMode mode_;
};

}  // namespace rael::expert
