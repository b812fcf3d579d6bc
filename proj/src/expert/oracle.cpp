#include "rael/expert/oracle.hpp"

#include <fstream>
#include <sstream>

#include "rael/logic/syntax.hpp"

namespace rael::expert {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<OracleRule> parse_rules(std::string_view text, const env::EnvironmentSpec& spec) {
  std::vector<OracleRule> rules;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    OracleRule rule;
    rule.id = "r" + std::to_string(rules.size() + 1);
    const auto arrow = line.find("=>");
    if (arrow == std::string::npos) throw RulesParseError("rule needs '=>'", line_no);
    auto lhs = line.substr(0, arrow);
    if (const auto colon = lhs.find(':'); colon != std::string::npos) {
      rule.id = trim(lhs.substr(0, colon));
      lhs = lhs.substr(colon + 1);
      if (rule.id.empty()) throw RulesParseError("empty rule name", line_no);
    }
    try {
      rule.entry.condition = logic::parse_abstraction(lhs);
      rule.entry.preferred = logic::parse_atom_list(line.substr(arrow + 2), '|');
      validate(rule.entry, spec);
    } catch (const logic::ParseError& e) {
      throw RulesParseError(e.what(), line_no);
    } catch (const AdviceError& e) {
      throw RulesParseError(e.what(), line_no);
    }
    for (const auto& r : rules)
      if (r.id == rule.id) throw RulesParseError("duplicate rule name '" + rule.id + "'", line_no);
    rules.push_back(std::move(rule));
  }
  if (rules.empty()) throw RulesParseError("rules file has no rules", line_no);
  return rules;
}

std::vector<OracleRule> load_rules(const std::string& path, const env::EnvironmentSpec& spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rules file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str(), spec);
}

std::optional<AdviceResponse> ScriptedOracle::advise(const AdviceRequest& request) {
  AdviceResponse response;
  response.request_id = request.id;
  for (const auto& rule : rules_) {
    AdviceMemory one;
    one.insert(rule.entry);
    const auto legal = one.preferred(request.state, request.legal);
    if (legal.empty()) continue;
    if (mode_ == OracleMode::WithAbstraction) {
      response.abstraction = rule.entry.condition;
      response.preferred = rule.entry.preferred;
    } else {
      for (const auto& a : legal) response.preferred.push_back(a.atom());
    }
    return response;
  }
  response.declined = true;
  return response;
}

}  // namespace rael::expert
