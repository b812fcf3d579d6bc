#include "rael/engine/trainer.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "rael/logic/syntax.hpp"

namespace rael::engine {

namespace {

// Legal actions, Q values and advised actions per state under one fixed Q.
class ValueCache {
 public:
  struct Entry {
    std::vector<env::GroundAction> legal;
    std::vector<double> q;
    std::optional<std::vector<env::GroundAction>> preferred;
  };

  ValueCache(const learner::BoostedQFunction& q, const env::Environment& env) : q_(q), env_(env) {}

  Entry& get(const logic::SymbolicState& s) {
    auto it = entries_.find(s);
    if (it != entries_.end()) return it->second;
    Entry e;
    e.legal = env_.legal_actions(s);
    e.q = learner::q_values(q_, s, e.legal);
    return entries_.emplace(s, std::move(e)).first->second;
  }

  const std::vector<env::GroundAction>& preferred(const logic::SymbolicState& s, const expert::AdviceMemory& memory) {
    auto& e = get(s);
    if (!e.preferred) e.preferred = memory.preferred(s, e.legal);
    return *e.preferred;
  }

  double q_of(const logic::SymbolicState& s, const env::GroundAction& a) {
    const auto& e = get(s);
    const auto it = std::lower_bound(e.legal.begin(), e.legal.end(), a);
    if (it == e.legal.end() || *it != a) return q_.predict(s, a);
    return e.q[it - e.legal.begin()];
  }

  double max_q(const logic::SymbolicState& s) {
    const auto& e = get(s);
    return e.q.empty() ? 0.0 : *std::max_element(e.q.begin(), e.q.end());
  }

 private:
  const learner::BoostedQFunction& q_;
  const env::Environment& env_;
  std::unordered_map<logic::SymbolicState, Entry> entries_;
};

double compute_target(const env::Transition& t, ValueCache& cache, const expert::AdviceMemory& memory,
                      bool advice_active, const Schedules& s, MarginStats& margin) {
  const double current = s.alpha_blend < 1.0 ? cache.q_of(t.state, t.action) : 0.0;
  const double next_max = t.terminal ? 0.0 : cache.max_q(t.next);
  double target = bellman_target(t.reward, t.terminal, next_max, current, s.gamma, s.alpha_blend);
  if (!advice_active) return target;
  const auto& preferred = cache.preferred(t.state, memory);
  if (!std::binary_search(preferred.begin(), preferred.end(), t.action)) return target;

  const auto& e = cache.get(t.state);
  target = advice_projection(target, t.action, e.legal, e.q, preferred, s.delta);
  ++margin.advised;
  for (std::size_t i = 0; i < e.legal.size(); ++i)
    if (!std::binary_search(preferred.begin(), preferred.end(), e.legal[i]) && target < e.q[i] + s.delta) {
      ++margin.violations;
      break;
    }
  return target;
}

}  // namespace

void TrainConfig::validate() const {
  schedules.validate();
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (n_train < 1) throw std::invalid_argument("n_train must be >= 1");
  if (n_eval < 1) throw std::invalid_argument("n_eval must be >= 1");
  if (buffer_cap < 1) throw std::invalid_argument("buffer_cap must be >= 1");
  if (budget < 0) throw std::invalid_argument("budget must be >= 0");
  if (learner.stages < 0) throw std::invalid_argument("boosting stages must be >= 0");
  if (!(learner.learning_rate > 0.0 && learner.learning_rate <= 1.0))
    throw std::invalid_argument("learning rate must lie in (0,1]");
  if (learner.tree.max_depth < 0) throw std::invalid_argument("max depth must be >= 0");
  if (learner.tree.min_leaf < 1) throw std::invalid_argument("min leaf must be >= 1");
}

EvalResult evaluate_and_rank(const learner::BoostedQFunction& q, const env::Environment& env,
                             std::span<const std::uint64_t> reset_seeds, double tau) {
  if (reset_seeds.empty()) throw std::invalid_argument("evaluation needs at least one rollout");
  EvalResult out;
  std::unordered_set<logic::SymbolicState> seen;
  std::size_t visit = 0;
  double total = 0.0;
  for (auto seed : reset_seeds) {
    env::Episode ep(env, seed);
    while (!ep.done()) {
      const auto legal = env.legal_actions(ep.state());
      const auto values = learner::q_values(q, ep.state(), legal);
      if (seen.insert(ep.state()).second)
        out.ranked.push_back({ep.state(), entropy(policy_distribution(values, tau)), visit});
      ++visit;
      ep.step(legal[learner::argmax(values)]);
    }
    total += ep.total_reward();
  }
  out.mean_return = total / static_cast<double>(reset_seeds.size());
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const UncertaintyRecord& a, const UncertaintyRecord& b) { return a.entropy > b.entropy; });
  return out;
}

const char* to_string(QueryRecord::Outcome outcome) {
  switch (outcome) {
    case QueryRecord::Outcome::Accepted: return "accepted";
    case QueryRecord::Outcome::Declined: return "declined";
    case QueryRecord::Outcome::Timeout: return "timeout";
    case QueryRecord::Outcome::Invalid: return "invalid";
  }
  return "?";
}

BudgetLedger::BudgetLedger(int budget) : budget_(budget) {
  if (budget < 0) throw std::invalid_argument("budget must be >= 0");
}

void BudgetLedger::record(QueryRecord query) {
  if (query.outcome == QueryRecord::Outcome::Accepted) {
    if (remaining() <= 0) throw std::logic_error("advice accepted with no budget left");
    ++spent_;
  }
  history_.push_back(std::move(query));
}

std::optional<QueryRecord> maybe_query_expert(std::span<const UncertaintyRecord> ranked, BudgetLedger& ledger,
                                              expert::AdviceMemory& memory, expert::Expert& expert,
                                              const learner::BoostedQFunction& q, const env::Environment& env,
                                              int iteration, std::uint64_t request_id) {
  if (ledger.remaining() <= 0) return std::nullopt;
  const UncertaintyRecord* target = nullptr;
  auto declined = [&](const logic::SymbolicState& s) {
    return std::any_of(ledger.history().begin(), ledger.history().end(), [&](const QueryRecord& q) {
      return q.outcome == QueryRecord::Outcome::Declined && q.state == s;
    });
  };
  for (const auto& r : ranked)
    if (!memory.covers(r.state) && !declined(r.state)) {
      target = &r;
      break;
    }
  if (!target) return std::nullopt;

  expert::AdviceRequest request;
  request.id = request_id;
  request.state = target->state;
  request.legal = env.legal_actions(target->state);
  request.greedy = request.legal[learner::argmax(learner::q_values(q, target->state, request.legal))];
  request.entropy = target->entropy;
  request.iteration = iteration;
  request.budget_remaining = ledger.remaining();

  QueryRecord record;
  record.iteration = iteration;
  record.request_id = request_id;
  record.state = target->state;
  record.entropy = target->entropy;

  const auto response = expert.advise(request);
  if (!response) {
    record.outcome = QueryRecord::Outcome::Timeout;
    record.reason = "expert unavailable";
    spdlog::warn("expert unavailable for request {} at iteration {}; continuing without advice", request_id,
                 iteration);
  } else if (response->declined) {
    record.outcome = QueryRecord::Outcome::Declined;
  } else {
    try {
      auto entry = expert::to_entry(*response, request, env.spec());
      memory.insert(entry);
      record.entry = std::move(entry);
      record.outcome = QueryRecord::Outcome::Accepted;
    } catch (const expert::AdviceError& e) {
      record.outcome = QueryRecord::Outcome::Invalid;
      record.reason = e.what();
      spdlog::warn("rejected advice for request {}: {}", request_id, e.what());
    }
  }
  ledger.record(record);
  return record;
}

TrainResult rael_train(const TrainConfig& config, const env::Environment& env, expert::Expert* expert,
                       TrainObserver* observer, const std::atomic<bool>* cancel) {
  config.validate();
  const auto& spec = env.spec();
  TrainResult result{learner::BoostedQFunction::constant(spec.actions, config.initial_q), {}, {},
                     BudgetLedger(config.budget), {}, false};
  auto cancelled = [&] { return cancel && cancel->load(); };

  Rng train_rng(derive_seed(config.seed, 1));
  std::vector<std::uint64_t> eval_seeds;
  for (int k = 0; k < config.n_eval; ++k) eval_seeds.push_back(derive_seed(derive_seed(config.seed, 2), k));

  std::vector<env::Transition> transitions;
  std::vector<learner::TrainingExample> examples;
  std::uint64_t next_request = 1;

  for (int t = 0; t < config.iterations; ++t) {
    if (cancelled()) {
      result.cancelled = true;
      break;
    }
    const double p_explore = config.schedules.explore.at(t);
    const double rho = config.schedules.advice.at(t);
    const bool advice_active = rho > 0.0 && !result.memory.empty();

    if (observer) observer->on_phase(t, "train");
    {
      ValueCache cache(result.q, env);
      for (int k = 0; k < config.n_train; ++k) {
        env::Episode ep(env, train_rng());
        while (!ep.done()) {
          auto& entry = cache.get(ep.state());
          static const std::vector<env::GroundAction> none;
          const auto& preferred = result.memory.empty() ? none : cache.preferred(ep.state(), result.memory);
          const auto sel = select_action(entry.legal, entry.q, preferred, p_explore, rho, train_rng);
          auto tr = ep.step(entry.legal[sel.index]);
          if (observer) observer->on_step(t, tr, sel.branch);
          if (!config.refresh_targets) {
            const double target =
                compute_target(tr, cache, result.memory, advice_active, config.schedules, result.margin);
            examples.push_back({tr.state, tr.action, target});
          }
          transitions.push_back(std::move(tr));
        }
        if (cancelled()) break;
      }

      if (transitions.size() > config.buffer_cap) {
        const auto drop = static_cast<std::ptrdiff_t>(transitions.size() - config.buffer_cap);
        transitions.erase(transitions.begin(), transitions.begin() + drop);
        if (!config.refresh_targets) examples.erase(examples.begin(), examples.begin() + drop);
      }
      if (config.refresh_targets) {
        examples.clear();
        examples.reserve(transitions.size());
        for (const auto& tr : transitions)
          examples.push_back(
              {tr.state, tr.action,
               compute_target(tr, cache, result.memory, advice_active, config.schedules, result.margin)});
      }
    }
    if (cancelled()) {
      result.cancelled = true;
      break;
    }

    if (observer) observer->on_phase(t, "fit");
    result.q = learner::fit_boosted(examples, result.q, config.bias, spec.predicates, config.learner);

    if (observer) observer->on_phase(t, "evaluate");
    const auto eval = evaluate_and_rank(result.q, env, eval_seeds, config.schedules.tau);

    if (expert) {
      if (observer) observer->on_phase(t, "query");
      const auto query = maybe_query_expert(eval.ranked, result.ledger, result.memory, *expert, result.q, env, t,
                                            next_request);
      if (query) {
        ++next_request;
        if (observer) observer->on_query(*query);
      }
    }

    IterationMetrics m;
    m.iteration = t;
    m.mean_return = eval.mean_return;
    m.max_entropy = eval.ranked.empty() ? 0.0 : eval.ranked.front().entropy;
    m.budget_remaining = result.ledger.remaining();
    m.buffer_size = transitions.size();
    m.seed = config.seed;
    result.metrics.push_back(m);
    if (observer) observer->on_iteration(m, result.q);
  }
  return result;
}

}  // namespace rael::engine
