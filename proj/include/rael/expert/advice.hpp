#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rael/env/environment.hpp"
#include "rael/logic/term.hpp"

namespace rael::expert {

/// Advice that fails validation; the message is the reason shown to the adviser.
class AdviceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Where the advice applies (condition) and which actions it prefers there.
/// Preferred patterns are action atoms whose variables come from the condition.
struct AdviceEntry {
  logic::Abstraction condition;
  std::vector<logic::Atom> preferred;

  friend bool operator==(const AdviceEntry&, const AdviceEntry&) = default;
};

/// Throws AdviceError unless preferred is nonempty, every pattern names a known
/// action template with the right arity, every pattern variable is bound by a
/// positive literal of the condition, and the condition uses declared predicates.
void validate(const AdviceEntry& entry, const env::EnvironmentSpec& spec);

/// Preferred actions of entry grounded by every match of its condition in
/// state; sorted and unique. Only ground results are kept.
std::vector<env::GroundAction> groundings(const AdviceEntry& entry, const logic::SymbolicState& state);

class AdviceMemory {
 public:
  void insert(AdviceEntry entry) { entries_.push_back(std::move(entry)); }
  const std::vector<AdviceEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Some entry's condition matches state.
  bool covers(const logic::SymbolicState& state) const;
  /// Legal groundings of the preferred sets of all entries matching state.
  std::vector<env::GroundAction> preferred(const logic::SymbolicState& state,
                                           std::span<const env::GroundAction> legal) const;

 private:
  std::vector<AdviceEntry> entries_;
};

struct AdviceRequest {
  std::uint64_t id = 0;
  logic::SymbolicState state;
  std::vector<env::GroundAction> legal;
  env::GroundAction greedy;
  double entropy = 0.0;
  int iteration = 0;
  int budget_remaining = 0;
};

struct AdviceResponse {
  std::uint64_t request_id = 0;
  /// Action atoms; ground, or patterns over the abstraction's variables.
  std::vector<logic::Atom> preferred;
  std::optional<logic::Abstraction> abstraction;
  bool declined = false;
};

/// The whole state as an abstraction, each constant replaced by its own
/// variable (b1 -> B1). `renaming` receives the constant-to-variable map.
logic::Abstraction lift_state(const logic::SymbolicState& state, std::map<logic::Symbol, logic::Symbol>* renaming = nullptr);

/// Turns an accepted response into a memory entry. Without an abstraction the
/// full lifted state is used and ground preferred actions are lifted with the
/// same renaming. Throws AdviceError if the response is a decline, answers a
/// different request, or fails validation: ground preferred actions must be
/// legal in the request state, the condition must match that state, and some
/// preferred grounding there must be legal.
AdviceEntry to_entry(const AdviceResponse& response, const AdviceRequest& request, const env::EnvironmentSpec& spec);

/// A source of advice. nullopt means no answer arrived in time.
class Expert {
 public:
  virtual ~Expert() = default;
  virtual std::optional<AdviceResponse> advise(const AdviceRequest& request) = 0;
};

}  // namespace rael::expert
