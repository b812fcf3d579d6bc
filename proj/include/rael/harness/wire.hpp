#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rael/engine/trainer.hpp"
#include "rael/expert/fidelity.hpp"

namespace rael::harness {

using nlohmann::json;

/// Thrown when a JSON body does not have the expected shape.
class WireError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json to_json(const engine::IterationMetrics& m);
json to_json(const expert::AdviceRequest& r);
json to_json(const expert::AdviceEntry& e);
json to_json(const engine::QueryRecord& q);
json to_json(const expert::FidelityReport& report, double threshold);
json ledger_json(const engine::BudgetLedger& ledger, const expert::AdviceMemory& memory);
/// Objects with classes, atoms and legal actions of a state.
json render_json(const env::Environment& env, const logic::SymbolicState& state);

/// {request_id, preferred: [atom...], abstraction?: "lit, lit", declined?: bool}.
/// Syntax errors raise WireError.
expert::AdviceResponse response_from_json(const json& body);

/// Tab-separated metrics, one header line then one row per iteration.
std::string metrics_header();
std::string metrics_row(const engine::IterationMetrics& m);
std::vector<engine::IterationMetrics> parse_metrics(const std::string& text);

}  // namespace rael::harness
