#include "rael/harness/wire.hpp"

#include <cstdio>
#include <sstream>

#include "rael/logic/syntax.hpp"

namespace rael::harness {

namespace {

std::vector<std::string> action_strings(const std::vector<env::GroundAction>& actions) {
  std::vector<std::string> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.str());
  return out;
}

std::vector<std::string> atom_strings(const std::vector<logic::Atom>& atoms) {
  std::vector<std::string> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(logic::print(a));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

json to_json(const engine::IterationMetrics& m) {
  return {{"iteration", m.iteration},           {"mean_return", m.mean_return}, {"max_entropy", m.max_entropy},
          {"budget_remaining", m.budget_remaining}, {"buffer_size", m.buffer_size}, {"seed", m.seed}};
}

json to_json(const expert::AdviceRequest& r) {
  return {{"id", r.id},
          {"state", logic::print(r.state)},
          {"atoms", atom_strings(r.state.atoms())},
          {"legal", action_strings(r.legal)},
          {"greedy", r.greedy.str()},
          {"entropy", r.entropy},
          {"iteration", r.iteration},
          {"budget_remaining", r.budget_remaining}};
}

json to_json(const expert::AdviceEntry& e) {
  return {{"condition", logic::print(e.condition)}, {"preferred", atom_strings(e.preferred)}};
}

json to_json(const engine::QueryRecord& q) {
  json j{{"iteration", q.iteration},
         {"request_id", q.request_id},
         {"state", logic::print(q.state)},
         {"entropy", q.entropy},
         {"outcome", engine::to_string(q.outcome)}};
  if (q.entry) j["entry"] = to_json(*q.entry);
  if (!q.reason.empty()) j["reason"] = q.reason;
  return j;
}

json to_json(const expert::FidelityReport& report, double threshold) {
  json rules = json::array();
  for (const auto& r : report.rules)
    rules.push_back({{"id", r.id},
                     {"matched", r.matched},
                     {"agreed", r.agreed},
                     {"agreement", r.agreement()},
                     {"uncovered", r.uncovered},
                     {"satisfied", r.satisfied}});
  return {{"fidelity", report.fidelity},
          {"counted", report.counted},
          {"satisfied", report.satisfied},
          {"threshold", threshold},
          {"rules", rules}};
}

json ledger_json(const engine::BudgetLedger& ledger, const expert::AdviceMemory& memory) {
  json entries = json::array();
  for (const auto& e : memory.entries()) entries.push_back(to_json(e));
  json queries = json::array();
  for (const auto& q : ledger.history()) queries.push_back(to_json(q));
  return {{"budget", ledger.budget()},
          {"spent", ledger.spent()},
          {"remaining", ledger.remaining()},
          {"entries", entries},
          {"queries", queries}};
}

json render_json(const env::Environment& env, const logic::SymbolicState& state) {
  json objects = json::array();
  for (const auto& e : state.objects().entries())
    objects.push_back({{"name", e.first.name()}, {"class", e.second.name()}});
  return {{"env", env.name()},
          {"objects", objects},
          {"atoms", atom_strings(state.atoms())},
          {"legal", action_strings(env.legal_actions(state))},
          {"goal", env.is_goal(state)},
          {"failure", env.is_failure(state)}};
}

expert::AdviceResponse response_from_json(const json& body) {
  if (!body.is_object()) throw WireError("body must be a JSON object");
  expert::AdviceResponse r;
  try {
    r.request_id = body.at("request_id").get<std::uint64_t>();
    r.declined = body.value("declined", false);
    if (body.contains("preferred"))
      for (const auto& a : body.at("preferred")) r.preferred.push_back(logic::parse_atom(a.get<std::string>()));
    if (body.contains("abstraction") && !body.at("abstraction").is_null())
      r.abstraction = logic::parse_abstraction(body.at("abstraction").get<std::string>());
  } catch (const json::exception& e) {
    throw WireError(std::string("malformed response: ") + e.what());
  } catch (const logic::ParseError& e) {
    throw WireError(e.what());
  } catch (const std::invalid_argument& e) {
    throw WireError(e.what());
  }
  return r;
}

std::string metrics_header() { return "iteration\tmean_return\tmax_entropy\tbudget_remaining\tbuffer_size\tseed\n"; }

std::string metrics_row(const engine::IterationMetrics& m) {
  return std::to_string(m.iteration) + '\t' + fmt(m.mean_return) + '\t' + fmt(m.max_entropy) + '\t' +
         std::to_string(m.budget_remaining) + '\t' + std::to_string(m.buffer_size) + '\t' + std::to_string(m.seed) +
         '\n';
}

std::vector<engine::IterationMetrics> parse_metrics(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<engine::IterationMetrics> out;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line.rfind("iteration", 0) == 0) continue;
    std::istringstream row(line);
    engine::IterationMetrics m;
    if (!(row >> m.iteration >> m.mean_return >> m.max_entropy >> m.budget_remaining >> m.buffer_size >> m.seed))
      throw WireError("metrics line " + std::to_string(n) + " is malformed");
    out.push_back(m);
  }
  return out;
}

}  // namespace rael::harness
