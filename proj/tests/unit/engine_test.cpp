#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <numeric>

#include "rael/engine/trainer.hpp"
#include "rael/env/blocks_world.hpp"
#include "rael/expert/oracle.hpp"
#include "rael/logic/syntax.hpp"
#include "support/chain_world.hpp"

namespace rael::engine {
namespace {

using env::GroundAction;

std::vector<GroundAction> actions(std::initializer_list<const char*> names) {
  std::vector<GroundAction> out;
  for (auto n : names) out.push_back(GroundAction::parse(n));
  std::sort(out.begin(), out.end());
  return out;
}

// Replays canned answers; records every request it sees.
class CannedExpert : public expert::Expert {
 public:
  std::deque<std::optional<expert::AdviceResponse>> answers;
  std::vector<expert::AdviceRequest> seen;
  std::optional<expert::AdviceResponse> fallback;

  std::optional<expert::AdviceResponse> advise(const expert::AdviceRequest& r) override {
    seen.push_back(r);
    auto a = fallback;
    if (!answers.empty()) {
      a = answers.front();
      answers.pop_front();
    }
    if (a) a->request_id = r.id;
    return a;
  }
};

expert::AdviceResponse decline() {
  expert::AdviceResponse r;
  r.declined = true;
  return r;
}

expert::AdviceResponse lifted(const char* abstraction, const char* action) {
  expert::AdviceResponse r;
  r.abstraction = logic::parse_abstraction(abstraction);
  r.preferred = {logic::parse_atom(action)};
  return r;
}

TEST(Policy, ConstantValuesGiveUniformDistribution) {
  for (double c : {-7.0, 0.0, 3.5, 1e6}) {
    const std::vector<double> q(4, c);
    for (double p : policy_distribution(q, 1.0)) EXPECT_NEAR(p, 0.25, 1e-15);
  }
}

TEST(Policy, DominantActionTakesAllMass) {
  const std::vector<double> q{1000.0, 0.0};
  const auto pi = policy_distribution(q, 1.0);
  EXPECT_NEAR(pi[0], 1.0, 1e-12);
  EXPECT_NEAR(pi[1], 0.0, 1e-12);
}

TEST(Policy, TwoActionClosedForm) {
  const std::vector<double> q{1.0, 0.0};
  const auto pi = policy_distribution(q, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(pi[0], e / (e + 1.0), 1e-15);
  EXPECT_NEAR(pi[1], 1.0 / (e + 1.0), 1e-15);
  EXPECT_NEAR(pi[0], 0.7311, 1e-4);
}

TEST(Policy, SumsToOneAndRejectsBadInput) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(1 + trial % 9);
    for (auto& v : q) v = (uniform01(rng) - 0.5) * 200.0;
    const auto pi = policy_distribution(q, 0.1 + uniform01(rng) * 5);
    EXPECT_NEAR(std::accumulate(pi.begin(), pi.end(), 0.0), 1.0, 1e-12);
  }
  EXPECT_THROW(policy_distribution(std::vector<double>{}, 1.0), std::invalid_argument);
  EXPECT_THROW(policy_distribution(std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST(Entropy, KnownValuesAndBounds) {
  EXPECT_NEAR(entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), std::log(4.0), 1e-12);
  EXPECT_EQ(entropy(std::vector<double>{1.0, 0.0, 0.0}), 0.0);
  Rng rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> q(1 + trial % 12);
    for (auto& v : q) v = (uniform01(rng) - 0.5) * 20.0;
    const double h = entropy(policy_distribution(q, 1.0));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(q.size())) + 1e-12);
  }
}

TEST(Schedules, DecayWithFloor) {
  const DecaySchedule s{0.9, 0.95, 0.05};
  EXPECT_DOUBLE_EQ(s.at(0), 0.9);
  EXPECT_NEAR(s.at(1), 0.855, 1e-15);
  EXPECT_DOUBLE_EQ(s.at(1000), 0.05);
  for (int t = 0; t < 100; ++t) EXPECT_LE(s.at(t + 1), s.at(t));
  EXPECT_THROW((DecaySchedule{1.2, 0.9, 0.0}.validate("x")), std::invalid_argument);
  EXPECT_THROW((DecaySchedule{0.5, 0.0, 0.0}.validate("x")), std::invalid_argument);
  Schedules bad;
  bad.gamma = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {};
  bad.delta = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_NO_THROW(Schedules{}.validate());
}

TEST(SelectAction, BranchesFollowTheSharedDraw) {
  const auto legal = actions({"a", "b", "c"});
  const std::vector<double> q{0.0, 2.0, 2.0};
  const auto pref = actions({"c"});
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto s = select_action(legal, q, pref, 1.0, 1.0, rng);
    EXPECT_EQ(s.branch, Branch::Explore);
  }
  for (int i = 0; i < 200; ++i) {
    const auto s = select_action(legal, q, pref, 0.0, 0.0, rng);
    EXPECT_EQ(s.branch, Branch::Greedy);
    EXPECT_EQ(s.index, 1u);  // first of the tied maxima
  }
  for (int i = 0; i < 200; ++i) {
    const auto s = select_action(legal, q, pref, 0.0, 1.0, rng);
    EXPECT_EQ(s.branch, Branch::Advice);
    EXPECT_EQ(s.index, 2u);
  }
  for (int i = 0; i < 200; ++i) EXPECT_EQ(select_action(legal, q, {}, 0.0, 1.0, rng).branch, Branch::Greedy);
}

TEST(SelectAction, RejectsIllegalPreferenceAndShapeMismatch) {
  const auto legal = actions({"a", "b"});
  Rng rng(1);
  EXPECT_THROW(select_action(legal, std::vector<double>{0, 0}, actions({"z"}), 0.0, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(select_action(legal, std::vector<double>{0}, {}, 0.0, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(select_action({}, std::vector<double>{}, {}, 0.0, 0.0, rng), std::invalid_argument);
}

TEST(SelectAction, RhoZeroConsumesTheSameRandomnessWithOrWithoutAdvice) {
  const auto legal = actions({"a", "b", "c", "d"});
  const std::vector<double> q{1.0, 0.0, 3.0, 2.0};
  Rng r1(77), r2(77);
  for (int i = 0; i < 1000; ++i) {
    const auto x = select_action(legal, q, actions({"a"}), 0.3, 0.0, r1);
    const auto y = select_action(legal, q, {}, 0.3, 0.0, r2);
    ASSERT_EQ(x.index, y.index);
    ASSERT_EQ(x.branch, y.branch);
  }
}

TEST(BellmanTarget, Examples) {
  EXPECT_DOUBLE_EQ(bellman_target(-50.0, true, 123.0, 7.0, 0.9, 1.0), -50.0);
  EXPECT_DOUBLE_EQ(bellman_target(-1.0, false, 5.0, 0.0, 0.9, 1.0), 3.5);
  EXPECT_DOUBLE_EQ(bellman_target(-1.0, false, 5.0, 1.0, 0.9, 0.5), 0.5 * 1.0 + 0.5 * 3.5);
  EXPECT_DOUBLE_EQ(bellman_target(10.0, true, 0.0, 0.0, 0.0, 1.0), 10.0);
}

TEST(AdviceProjection, Examples) {
  const auto legal = actions({"a", "b", "c"});
  const std::vector<double> q{2.0, 0.5, -1.0};
  const auto pref = actions({"b"});
  EXPECT_DOUBLE_EQ(advice_projection(1.0, GroundAction::parse("b"), legal, q, pref, 0.1), 2.1);
  EXPECT_DOUBLE_EQ(advice_projection(5.0, GroundAction::parse("b"), legal, q, pref, 0.1), 5.0);
  EXPECT_DOUBLE_EQ(advice_projection(1.0, GroundAction::parse("a"), legal, q, pref, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(advice_projection(-3.0, GroundAction::parse("a"), legal, q, legal, 0.1), -3.0);
}

TEST(EvaluateAndRank, ConstantQGivesMaximalEntropyEverywhere) {
  env::BlocksWorld bw({3, 6, {}});
  const auto q = learner::BoostedQFunction::constant(bw.spec().actions, 0.0);
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto r = evaluate_and_rank(q, bw, seeds, 1.0);
  ASSERT_FALSE(r.ranked.empty());
  std::size_t most = 0;
  for (const auto& u : r.ranked) {
    const auto n = bw.legal_actions(u.state).size();
    EXPECT_NEAR(u.entropy, std::log(static_cast<double>(n)), 1e-12);
    most = std::max(most, n);
  }
  // The top record is the earliest visit among the states with the most actions.
  std::size_t first_visit = SIZE_MAX;
  for (const auto& u : r.ranked)
    if (bw.legal_actions(u.state).size() == most) first_visit = std::min(first_visit, u.visit);
  EXPECT_EQ(r.ranked.front().visit, first_visit);
  for (std::size_t i = 1; i < r.ranked.size(); ++i) {
    EXPECT_GE(r.ranked[i - 1].entropy, r.ranked[i].entropy);
    if (r.ranked[i - 1].entropy == r.ranked[i].entropy) EXPECT_LT(r.ranked[i - 1].visit, r.ranked[i].visit);
  }
}

learner::BoostedQFunction chain_q(const testing::ChainWorld& chain, double p0adv, double p0stay, double p1adv,
                                  double p1stay) {
  // Depth-one trees on at(p0) per template, built through the text format.
  auto text = [&](double adv0, double adv1, double stay0, double stay1) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "rael-model 1\nensemble advance\ninitial 0\nstage 1\nsplit 0 at(p0)\nleaf %.17g\nleaf %.17g\nend\n"
                  "ensemble stay\ninitial 0\nstage 1\nsplit 0 at(p0)\nleaf %.17g\nleaf %.17g\nend\n",
                  adv0, adv1, stay0, stay1);
    return std::string(buf);
  };
  auto q = learner::BoostedQFunction::deserialize(text(p0adv, p1adv, p0stay, p1stay));
  EXPECT_DOUBLE_EQ(q.predict(chain.at(0), GroundAction::parse("advance")), p0adv);
  EXPECT_DOUBLE_EQ(q.predict(chain.at(1), GroundAction::parse("stay")), p1stay);
  return q;
}

TEST(EvaluateAndRank, ChainEntropiesMatchHandComputation) {
  testing::ChainWorld chain;
  const auto q = chain_q(chain, 1.0, 0.0, 5.0, 5.0);
  const std::vector<std::uint64_t> seeds{0};
  const auto r = evaluate_and_rank(q, chain, seeds, 1.0);
  ASSERT_EQ(r.ranked.size(), 2u);
  // p1 ties (ln 2) and ranks first; p0 has the 1-vs-0 gap.
  const double e = std::exp(1.0);
  const double h0 = -(e / (e + 1)) * std::log(e / (e + 1)) - (1 / (e + 1)) * std::log(1 / (e + 1));
  EXPECT_EQ(r.ranked[0].state, chain.at(1));
  EXPECT_NEAR(r.ranked[0].entropy, std::log(2.0), 1e-12);
  EXPECT_EQ(r.ranked[1].state, chain.at(0));
  EXPECT_NEAR(r.ranked[1].entropy, h0, 1e-12);
  EXPECT_DOUBLE_EQ(r.mean_return, -1.0 + 10.0);
}

TEST(EvaluateAndRank, DominantActionsGiveNearZeroEntropy) {
  testing::ChainWorld chain;
  const auto q = chain_q(chain, 100.0, 0.0, 100.0, 0.0);
  const std::vector<std::uint64_t> seeds{0, 1};
  for (const auto& u : evaluate_and_rank(q, chain, seeds, 1.0).ranked) EXPECT_LT(u.entropy, 1e-40);
}

struct QueryFixture : ::testing::Test {
  env::BlocksWorld bw{{3, 20, {}}};
  learner::BoostedQFunction q = learner::BoostedQFunction::constant(bw.spec().actions, 0.0);
  expert::AdviceMemory memory;

  std::vector<UncertaintyRecord> ranked() {
    std::vector<UncertaintyRecord> out;
    env::BlocksWorld::Layout floor(3), two_and_one{std::nullopt, 0, std::nullopt};
    out.push_back({bw.encode(floor), 1.8, 0});
    out.push_back({bw.encode(two_and_one), 1.1, 1});
    return out;
  }
};

TEST_F(QueryFixture, ZeroBudgetNeverQueries) {
  BudgetLedger ledger(0);
  CannedExpert ex;
  EXPECT_FALSE(maybe_query_expert(ranked(), ledger, memory, ex, q, bw, 0, 1));
  EXPECT_TRUE(ex.seen.empty());
  EXPECT_TRUE(memory.empty());
}

TEST_F(QueryFixture, BudgetOfThreeAllowsExactlyThreeQueries) {
  BudgetLedger ledger(3);
  CannedExpert ex;
  ex.fallback = lifted("clear(X), clear(Y)", "move(X,Y)");
  const auto r = ranked();
  for (int it = 0; it < 6; ++it) {
    expert::AdviceMemory fresh;  // keep the top state uncovered
    maybe_query_expert(r, ledger, fresh, ex, q, bw, it, it + 1);
  }
  EXPECT_EQ(ex.seen.size(), 3u);
  EXPECT_EQ(ledger.history().size(), 3u);
  EXPECT_EQ(ledger.remaining(), 0);
  EXPECT_THROW(ledger.record({0, 9, {}, 0.0, QueryRecord::Outcome::Accepted, std::nullopt, {}}), std::logic_error);
}

TEST_F(QueryFixture, CoveredStatesAreSkipped) {
  BudgetLedger ledger(5);
  CannedExpert ex;
  ex.fallback = lifted("onFloor(X), clear(X), onFloor(Y), clear(Y), !on(Z,W)", "move(X,Y)");
  const auto r = ranked();
  const auto first = maybe_query_expert(r, ledger, memory, ex, q, bw, 0, 1);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->state, r[0].state);
  EXPECT_EQ(first->outcome, QueryRecord::Outcome::Accepted);
  ex.fallback = lifted("on(X,Y), clear(X), clear(Z), onFloor(Z)", "move(X,Z)");
  const auto second = maybe_query_expert(r, ledger, memory, ex, q, bw, 1, 2);
  ASSERT_TRUE(second);
  EXPECT_EQ(second->state, r[1].state);
  EXPECT_FALSE(maybe_query_expert(r, ledger, memory, ex, q, bw, 2, 3));
  EXPECT_EQ(ledger.spent(), 2u);
}

TEST_F(QueryFixture, DeclineTimeoutAndInvalidSpendNothing) {
  BudgetLedger ledger(2);
  CannedExpert ex;
  auto bad = lifted("clear(X)", "fly(X)");  // no such action template
  ex.answers = {decline(), std::nullopt, bad};
  const auto r = ranked();
  const auto a = maybe_query_expert(r, ledger, memory, ex, q, bw, 0, 1);
  EXPECT_EQ(a->outcome, QueryRecord::Outcome::Declined);
  EXPECT_EQ(a->state, r[0].state);
  const auto b = maybe_query_expert(r, ledger, memory, ex, q, bw, 1, 2);
  EXPECT_EQ(b->outcome, QueryRecord::Outcome::Timeout);
  EXPECT_EQ(b->state, r[1].state);  // the declined state is not asked again
  const auto c = maybe_query_expert(r, ledger, memory, ex, q, bw, 2, 3);
  EXPECT_EQ(c->outcome, QueryRecord::Outcome::Invalid);
  EXPECT_FALSE(c->reason.empty());
  EXPECT_EQ(ledger.remaining(), 2);
  EXPECT_TRUE(memory.empty());
  EXPECT_EQ(ledger.history().size(), 3u);
}

TEST_F(QueryFixture, RequestCarriesTheQueriedContext) {
  BudgetLedger ledger(4);
  CannedExpert ex;
  ex.fallback = decline();
  maybe_query_expert(ranked(), ledger, memory, ex, q, bw, 7, 42);
  ASSERT_EQ(ex.seen.size(), 1u);
  const auto& req = ex.seen.front();
  EXPECT_EQ(req.id, 42u);
  EXPECT_EQ(req.iteration, 7);
  EXPECT_EQ(req.budget_remaining, 4);
  EXPECT_DOUBLE_EQ(req.entropy, 1.8);
  EXPECT_EQ(req.legal, bw.legal_actions(req.state));
  EXPECT_EQ(req.greedy, req.legal.front());
}

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig c;
  c.iterations = 4;
  c.n_train = 2;
  c.n_eval = 3;
  c.seed = seed;
  c.learner.stages = 4;
  return c;
}

TEST(Train, ZeroIterationsReturnsInitialConstant) {
  env::BlocksWorld bw({3, 20, {}});
  auto c = small_config(1);
  c.iterations = 0;
  c.initial_q = 2.5;
  const auto r = rael_train(c, bw, nullptr);
  EXPECT_TRUE(r.metrics.empty());
  EXPECT_EQ(r.q, learner::BoostedQFunction::constant(bw.spec().actions, 2.5));
}

struct StepLog : TrainObserver {
  std::vector<std::pair<GroundAction, Branch>> steps;
  std::vector<std::string> phases;
  void on_step(int, const env::Transition& t, Branch b) override { steps.emplace_back(t.action, b); }
  void on_phase(int, std::string_view p) override { phases.emplace_back(p); }
};

TEST(Train, DeterministicPerSeedAndEmitsMetrics) {
  env::BlocksWorld bw({3, 20, {}});
  auto c = small_config(3);
  c.bias = learner::LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
  StepLog l1, l2;
  const auto a = rael_train(c, bw, nullptr, &l1);
  const auto b = rael_train(c, bw, nullptr, &l2);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(l1.steps, l2.steps);
  ASSERT_EQ(a.metrics.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(a.metrics[i].iteration, i);
    EXPECT_EQ(a.metrics[i].mean_return, b.metrics[i].mean_return);
    EXPECT_EQ(a.metrics[i].seed, 3u);
  }
  EXPECT_EQ((std::vector<std::string>{l1.phases.begin(), l1.phases.begin() + 3}),
            (std::vector<std::string>{"train", "fit", "evaluate"}));
}

TEST(Train, FullExplorationStoresOnlyExploratoryActions) {
  env::BlocksWorld bw({3, 20, {}});
  auto c = small_config(4);
  c.schedules.explore = {1.0, 1.0, 1.0};
  StepLog log;
  rael_train(c, bw, nullptr, &log);
  ASSERT_FALSE(log.steps.empty());
  for (const auto& [a, b] : log.steps) EXPECT_EQ(b, Branch::Explore);
}

TEST(Train, GreedyEpisodeOnTwoBlocksEndsInGoal) {
  env::BlocksWorld bw({2, 10, {}});
  auto c = small_config(2);
  c.n_train = 1;
  c.iterations = 6;
  c.schedules.explore = {0.0, 1.0, 0.0};
  c.schedules.advice = {0.0, 1.0, 0.0};
  c.bias = learner::LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
  struct Last : TrainObserver {
    std::vector<env::Transition> t;
    void on_step(int, const env::Transition& tr, Branch) override { t.push_back(tr); }
  } log;
  const auto r = rael_train(c, bw, nullptr, &log);
  EXPECT_LE(r.metrics.back().buffer_size, 6u * 10u);
  EXPECT_TRUE(log.t.back().terminal);
  EXPECT_DOUBLE_EQ(r.metrics.back().mean_return, 10.0);
}

TEST(Train, BufferCapKeepsNewestTransitions) {
  env::BlocksWorld bw({3, 20, {}});
  auto c = small_config(5);
  c.buffer_cap = 7;
  for (bool refresh : {false, true}) {
    c.refresh_targets = refresh;
    const auto r = rael_train(c, bw, nullptr);
    for (const auto& m : r.metrics) EXPECT_LE(m.buffer_size, 7u);
  }
}

TEST(Train, BlocksWorldThreeImprovesEarly) {
  // A no-advice learner should beat its first evaluation within a few
  // iterations on most seeds.
  env::BlocksWorld bw({3, 50, {}});
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig c;
    c.iterations = 20;
    c.n_train = 1;
    c.n_eval = 20;
    c.seed = seed;
    c.bias = learner::LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
    const auto r = rael_train(c, bw, nullptr);
    double best_early = -1e9;
    for (int i = 1; i <= 5; ++i) best_early = std::max(best_early, r.metrics[i].mean_return);
    improved += best_early > r.metrics[0].mean_return;
  }
  EXPECT_GE(improved, 4);
}

TEST(Train, AdviceBudgetIsNeverExceeded) {
  env::BlocksWorld bw({4, 30, {}});
  auto rules = expert::parse_rules(
      "onFloor(X), clear(X), on(Y,Z), clear(Y) => move(X,Y)\n"
      "on(X,Y), clear(X), on(Z,W), clear(Z) => move(X,Z)\n",
      bw.spec());
  expert::ScriptedOracle oracle(rules, expert::OracleMode::WithAbstraction);
  auto c = small_config(6);
  c.iterations = 8;
  c.budget = 2;
  const auto r = rael_train(c, bw, &oracle);
  EXPECT_LE(r.ledger.spent(), 2u);
  EXPECT_EQ(r.memory.entries().size(), r.ledger.spent());
  for (std::size_t i = 1; i < r.metrics.size(); ++i)
    EXPECT_LE(r.metrics[i].budget_remaining, r.metrics[i - 1].budget_remaining);
  EXPECT_EQ(r.margin.violations, 0u);
}

TEST(Train, CancelStopsBeforeTheNextIteration) {
  env::BlocksWorld bw({3, 20, {}});
  std::atomic<bool> cancel{true};
  const auto r = rael_train(small_config(1), bw, nullptr, nullptr, &cancel);
  EXPECT_TRUE(r.cancelled);
  EXPECT_TRUE(r.metrics.empty());
}

TEST(Train, RejectsInvalidConfig) {
  env::BlocksWorld bw({3, 20, {}});
  auto c = small_config(1);
  c.n_train = 0;
  EXPECT_THROW(rael_train(c, bw, nullptr), std::invalid_argument);
  c = small_config(1);
  c.budget = -1;
  EXPECT_THROW(rael_train(c, bw, nullptr), std::invalid_argument);
}

}  // namespace
}  // namespace rael::engine
