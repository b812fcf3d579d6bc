#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rael/env/blocks_world.hpp"
#include "rael/learner/boosted_q.hpp"
#include "rael/logic/syntax.hpp"
#include "rael/util/random.hpp"

namespace rael::learner {
namespace {

using env::GroundAction;
using logic::Symbol;

std::vector<std::string> printed(const std::vector<NodeTest>& tests) {
  std::vector<std::string> out;
  for (const auto& t : tests) out.push_back(logic::print(logic::Abstraction{t.literals}));
  return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

logic::SignatureTable blocks_signatures() {
  logic::SignatureTable sigs;
  sigs.declare("on", {"block", "block"});
  sigs.declare("onFloor", {"block"});
  sigs.declare("clear", {"block"});
  return sigs;
}

// Propositional world: 0-ary features f1..fk and one 0-ary action.
struct Propositional {
  explicit Propositional(int k) {
    for (int i = 1; i <= k; ++i) {
      sigs.declare("f" + std::to_string(i), {});
      bias_lines.push_back("f" + std::to_string(i));
    }
    action = {Symbol("act"), {}};
  }
  logic::SymbolicState state(const std::vector<bool>& on) const {
    std::vector<logic::Atom> atoms;
    for (std::size_t i = 0; i < on.size(); ++i)
      if (on[i]) atoms.push_back({Symbol("f" + std::to_string(i + 1)), {}});
    return logic::SymbolicState(atoms, {});
  }
  logic::SignatureTable sigs;
  std::vector<std::string> bias_lines;
  env::ActionTemplate action;
};

std::vector<TrainingExample> separable_data() {
  Propositional p(1);
  std::vector<TrainingExample> data;
  for (int i = 0; i < 4; ++i)
    data.push_back({p.state({i >= 2}), GroundAction::parse("act"), i >= 2 ? 10.0 : 0.0});
  return data;
}

std::vector<TrainingExample> blocks_data(int episodes, std::uint64_t seed) {
  env::BlocksWorld bw({4});
  Rng rng(seed);
  std::vector<TrainingExample> out;
  for (int e = 0; e < episodes; ++e) {
    env::Episode ep(bw, seed * 1000 + e);
    while (!ep.done()) {
      const auto legal = bw.legal_actions(ep.state());
      const auto t = ep.step(legal[uniform_index(rng, legal.size())]);
      const double clear = static_cast<double>(t.next.with_predicate(Symbol("clear")).size());
      out.push_back({t.state, t.action, t.reward - 0.5 * clear});
    }
  }
  return out;
}

logic::SymbolicState rename(const logic::SymbolicState& s, const std::map<Symbol, Symbol>& m) {
  std::vector<logic::Atom> atoms;
  logic::ObjectTable objects;
  for (auto a : s.atoms()) {
    for (auto& t : a.args) t = logic::Term(t.kind(), m.at(t.name()));
    atoms.push_back(a);
  }
  for (const auto& [o, c] : s.objects().entries()) objects.add(m.at(o), c);
  return logic::SymbolicState(atoms, objects);
}

GroundAction rename(const GroundAction& a, const std::map<Symbol, Symbol>& m) {
  auto atom = a.atom();
  for (auto& t : atom.args) t = logic::Term(t.kind(), m.at(t.name()));
  return GroundAction(atom);
}

TEST(LanguageBias, InputOutputModes) {
  logic::SignatureTable sigs;
  sigs.declare("on", {"block", "block"});
  auto bias = LanguageBias::parse({"on(+,-)"}, sigs);
  std::vector<BoundVariable> bound{{Symbol("X"), Symbol("block")}};
  const auto tests = generate_candidate_tests(bound, bias, sigs, 1);
  ASSERT_EQ(tests.size(), 1u);
  EXPECT_EQ(tests[0].literals[0], logic::parse_literal("on(X,V1)"));
  ASSERT_EQ(tests[0].new_vars.size(), 1u);
  EXPECT_EQ(tests[0].new_vars[0].cls, Symbol("block"));
}

TEST(LanguageBias, EmptyBiasHasNoTests) {
  EXPECT_TRUE(generate_candidate_tests({}, LanguageBias{}, blocks_signatures(), 1).empty());
}

TEST(LanguageBias, ActionParametersAreBoundAtRoot) {
  const auto sigs = blocks_signatures();
  auto bias = LanguageBias::parse({"clear(+)", "on(+,-)"}, sigs);
  const env::ActionTemplate move{Symbol("move"), {{Symbol("X"), Symbol("block")}, {Symbol("Y"), Symbol("block")}}};
  const auto roots = root_variables(move);
  const auto tests = printed(generate_candidate_tests(roots, bias, sigs, 1));
  EXPECT_TRUE(contains(tests, "clear(A1)"));
  EXPECT_TRUE(contains(tests, "clear(A2)"));
  EXPECT_TRUE(contains(tests, "on(A1,V1)"));
  EXPECT_EQ(tests.size(), 4u);
}

TEST(LanguageBias, ModesRespectClassesAndConstants) {
  logic::SignatureTable sigs;
  sigs.declare("at", {"player", "pos"});
  auto bias = LanguageBias::parse({"at(+,#)", "#pos: p0 p1"}, sigs);
  std::vector<BoundVariable> bound{{Symbol("P"), Symbol("player")}, {Symbol("Q"), Symbol("pos")}};
  EXPECT_EQ(printed(generate_candidate_tests(bound, bias, sigs, 1)),
            (std::vector<std::string>{"at(P,p0)", "at(P,p1)"}));
}

TEST(LanguageBias, TwoLiteralTestsAndNewVariableCap) {
  const auto sigs = blocks_signatures();
  auto bias = LanguageBias::parse({"on(+,-)", "clear(+)"}, sigs);
  bias.max_literals = 2;
  bias.max_new_vars = 1;
  std::vector<BoundVariable> bound{{Symbol("X"), Symbol("block")}};
  const auto tests = printed(generate_candidate_tests(bound, bias, sigs, 1));
  EXPECT_TRUE(contains(tests, "on(X,V1), clear(V1)"));
  EXPECT_FALSE(contains(tests, "on(X,V1), on(V1,V2)"));
  std::vector<std::string> sorted = tests;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(std::unique(sorted.begin(), sorted.end()), sorted.end());
  EXPECT_EQ(tests, printed(generate_candidate_tests(bound, bias, sigs, 1)));
}

TEST(LanguageBias, RejectsUnknownPredicatesAndBadModes) {
  const auto sigs = blocks_signatures();
  EXPECT_THROW(LanguageBias::parse({"above(+,+)"}, sigs), logic::SignatureError);
  EXPECT_THROW(LanguageBias::parse({"on(+)"}, sigs), logic::SignatureError);
  EXPECT_THROW(LanguageBias::parse({"on(+,*)"}, sigs), std::invalid_argument);
}

TEST(BestSplit, PerfectSeparationScoresTwentyFive) {
  const std::vector<double> y{0, 0, 10, 10};
  const std::vector<std::vector<bool>> covers{{true, false, true, false}, {false, false, true, true}};
  const auto s = best_split(y, covers, 1, 1e-6);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->index, 1u);
  EXPECT_NEAR(s->score, 25.0, 1e-12);
}

TEST(BestSplit, EqualTargetsGiveNoSplit) {
  const std::vector<double> y{3, 3, 3, 3};
  const std::vector<std::vector<bool>> covers{{true, true, false, false}};
  EXPECT_FALSE(best_split(y, covers, 1, 1e-6));
}

TEST(BestSplit, TiesGoToEarlierCandidate) {
  const std::vector<double> y{0, 0, 10, 10};
  const std::vector<std::vector<bool>> covers{{false, false, true, true}, {true, true, false, false}};
  const auto s = best_split(y, covers, 1, 1e-6);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->index, 0u);
}

TEST(BestSplit, MinLeafExcludesLopsidedSplits) {
  const std::vector<double> y{0, 0, 0, 10};
  const std::vector<std::vector<bool>> covers{{false, false, false, true}};
  EXPECT_TRUE(best_split(y, covers, 1, 1e-6));
  EXPECT_FALSE(best_split(y, covers, 2, 1e-6));
}

TEST(FitTree, SingleExampleIsLeaf) {
  Propositional p(1);
  std::vector<TrainingExample> data{{p.state({true}), GroundAction::parse("act"), 3.5}};
  TemplateData td(p.action, data);
  const auto bias = LanguageBias::parse(p.bias_lines, p.sigs);
  const std::vector<double> r{3.5};
  const auto tree = fit_tree(td, r, bias, p.sigs, {4, 1, 1e-6});
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_DOUBLE_EQ(tree.nodes()[0].value, 3.5);
  EXPECT_DOUBLE_EQ(tree.evaluate(p.state({false}), {}), 3.5);
}

TEST(FitTree, SeparableDataGivesDepthOneTree) {
  Propositional p(1);
  const auto data = separable_data();
  TemplateData td(p.action, data);
  const auto bias = LanguageBias::parse(p.bias_lines, p.sigs);
  const auto tree = fit_tree(td, td.targets(), bias, p.sigs, {4, 1, 1e-6});
  EXPECT_EQ(tree.depth(), 1);
  EXPECT_DOUBLE_EQ(tree.evaluate(p.state({true}), {}), 10.0);
  EXPECT_DOUBLE_EQ(tree.evaluate(p.state({false}), {}), 0.0);
}

TEST(FitTree, DepthCapZeroGivesGlobalMean) {
  Propositional p(1);
  const auto data = separable_data();
  TemplateData td(p.action, data);
  const auto bias = LanguageBias::parse(p.bias_lines, p.sigs);
  const auto tree = fit_tree(td, td.targets(), bias, p.sigs, {0, 1, 1e-6});
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_DOUBLE_EQ(tree.nodes()[0].value, 5.0);
}

TEST(FitTree, DuplicateExamplesRouteTogether) {
  Propositional p(2);
  std::vector<TrainingExample> data;
  for (int i = 0; i < 6; ++i) data.push_back({p.state({i % 2 == 0, false}), GroundAction::parse("act"), 1.0 * i});
  TemplateData td(p.action, data);
  EXPECT_EQ(td.size(), 6u);
  EXPECT_EQ(td.instance_count(), 2u);
}

// Exhaustive stump oracle on 0-ary features: every feature split scored by
// direct SSE of the two child means.
TEST(FitTree, PropositionalStumpMatchesExhaustiveOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 5;
    Propositional p(k);
    std::vector<std::vector<bool>> feats;
    std::vector<TrainingExample> data;
    const int n = 8 + trial % 20;
    for (int i = 0; i < n; ++i) {
      std::vector<bool> f(k);
      for (int j = 0; j < k; ++j) f[j] = rng() % 2;
      double y = noise(rng);
      for (int j = 0; j < k; ++j) y += f[j] ? (j + 1) * 0.7 : 0.0;
      feats.push_back(f);
      data.push_back({p.state(f), GroundAction::parse("act"), y});
    }
    const int min_leaf = 1 + trial % 3;

    double best_sse_drop = -1.0;
    for (int j = 0; j < k; ++j) {
      double sy = 0, sn = 0, ny = 0, nn = 0;
      for (int i = 0; i < n; ++i) (feats[i][j] ? (sy += data[i].target, ny += 1) : (sn += data[i].target, nn += 1));
      if (ny < min_leaf || nn < min_leaf) continue;
      const double my = sy / ny, mn = sn / nn, m = (sy + sn) / n;
      double before = 0, after = 0;
      for (int i = 0; i < n; ++i) {
        before += (data[i].target - m) * (data[i].target - m);
        const double c = feats[i][j] ? my : mn;
        after += (data[i].target - c) * (data[i].target - c);
      }
      best_sse_drop = std::max(best_sse_drop, (before - after) / n);
    }

    TemplateData td(p.action, data);
    const auto bias = LanguageBias::parse(p.bias_lines, p.sigs);
    const auto tree = fit_tree(td, td.targets(), bias, p.sigs, {1, min_leaf, 1e-6});
    if (best_sse_drop < 1e-6) {
      EXPECT_EQ(tree.nodes().size(), 1u);
      continue;
    }
    ASSERT_EQ(tree.nodes().size(), 3u) << "trial " << trial;
    const auto& test = tree.nodes()[0].test;
    ASSERT_EQ(test.size(), 1u);
    const int j = std::stoi(test[0].atom.predicate.name().substr(1)) - 1;
    std::vector<double> y;
    std::vector<std::vector<bool>> cov(1);
    for (int i = 0; i < n; ++i) {
      y.push_back(data[i].target);
      cov[0].push_back(feats[i][j]);
    }
    const auto chosen = best_split(y, cov, min_leaf, 0.0);
    ASSERT_TRUE(chosen);
    EXPECT_NEAR(chosen->score, best_sse_drop, 1e-9) << "trial " << trial;
  }
}

TEST(Boosting, ZeroStagesPredictMeanTarget) {
  Propositional p(1);
  const auto data = separable_data();
  const auto q0 = BoostedQFunction::constant({p.action}, 0.0);
  const auto bias = LanguageBias::parse(p.bias_lines, p.sigs);
  BoostingParams params;
  params.stages = 0;
  const auto q = fit_boosted(data, q0, bias, p.sigs, params);
  EXPECT_DOUBLE_EQ(q.predict(p.state({true}), GroundAction::parse("act")), 5.0);
  EXPECT_DOUBLE_EQ(q.predict(p.state({false}), GroundAction::parse("act")), 5.0);
}

TEST(Boosting, OneFullStageFitsSeparableData) {
  Propositional p(1);
  const auto data = separable_data();
  const auto bias = LanguageBias::parse(p.bias_lines, p.sigs);
  BoostingParams params;
  params.stages = 1;
  params.learning_rate = 1.0;
  params.tree.min_leaf = 1;
  FitReport report;
  const auto q = fit_boosted(data, BoostedQFunction::constant({p.action}, 0.0), bias, p.sigs, params, &report);
  EXPECT_LE(report.mse.at(Symbol("act")).back(), 1e-9);
  double mean_residual = 0.0;
  for (const auto& ex : data) mean_residual += ex.target - q.predict(ex.state, ex.action);
  EXPECT_LE(std::abs(mean_residual / data.size()), 1e-9);
}

TEST(Boosting, FreshConstantPredictsZero) {
  const auto sigs = blocks_signatures();
  env::BlocksWorld bw({3});
  const auto q = BoostedQFunction::constant(bw.spec().actions, 0.0);
  const auto s = bw.reset(1);
  for (const auto& a : bw.legal_actions(s)) EXPECT_EQ(q.predict(s, a), 0.0);
  EXPECT_THROW(q.predict(s, GroundAction::parse("jump(b1)")), UnknownTemplate);
}

TEST(Boosting, TrainingMseIsNonIncreasing) {
  env::BlocksWorld bw({4});
  const auto data = blocks_data(20, 3);
  const auto bias = LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
  for (double eta : {0.3, 0.5, 1.0}) {
    BoostingParams params;
    params.learning_rate = eta;
    FitReport report;
    fit_boosted(data, BoostedQFunction::constant(bw.spec().actions, 0.0), bias, bw.spec().predicates, params,
                &report);
    for (const auto& [name, mse] : report.mse)
      for (std::size_t m = 1; m < mse.size(); ++m) EXPECT_LE(mse[m], mse[m - 1] + 1e-12) << name.name() << " " << m;
  }
}

TEST(Boosting, PredictionIsInvariantUnderRenaming) {
  env::BlocksWorld bw({4});
  const auto data = blocks_data(20, 5);
  const auto bias = LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
  const auto q = fit_boosted(data, BoostedQFunction::constant(bw.spec().actions, 0.0), bias, bw.spec().predicates, {});
  std::map<Symbol, Symbol> perm{{Symbol("b1"), Symbol("b3")},
                                {Symbol("b2"), Symbol("b1")},
                                {Symbol("b3"), Symbol("b4")},
                                {Symbol("b4"), Symbol("b2")}};
  for (std::size_t i = 0; i < data.size(); i += 7) {
    const auto& ex = data[i];
    EXPECT_DOUBLE_EQ(q.predict(ex.state, ex.action), q.predict(rename(ex.state, perm), rename(ex.action, perm)));
  }
}

TEST(Boosting, FitIsDeterministicAndSerializationRoundTrips) {
  env::BlocksWorld bw({4});
  const auto data = blocks_data(15, 8);
  const auto bias = LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
  const auto q0 = BoostedQFunction::constant(bw.spec().actions, 0.0);
  const auto a = fit_boosted(data, q0, bias, bw.spec().predicates, {});
  const auto b = fit_boosted(data, q0, bias, bw.spec().predicates, {});
  EXPECT_TRUE(a == b);
  const auto text = a.serialize();
  const auto back = BoostedQFunction::deserialize(text);
  EXPECT_TRUE(back == a);
  EXPECT_EQ(back.serialize(), text);
  for (const auto& ex : data) EXPECT_EQ(back.predict(ex.state, ex.action), a.predict(ex.state, ex.action));
}

TEST(Boosting, TemplatesWithoutExamplesKeepPreviousEnsemble) {
  env::BlocksWorld bw({4});
  auto data = blocks_data(10, 2);
  const auto bias = LanguageBias::parse(bw.spec().default_bias, bw.spec().predicates);
  const auto first = fit_boosted(data, BoostedQFunction::constant(bw.spec().actions, 0.0), bias,
                                 bw.spec().predicates, {});
  std::erase_if(data, [](const TrainingExample& ex) { return ex.action.name() == Symbol("moveToFloor"); });
  for (auto& ex : data) ex.target += 1.0;
  const auto second = fit_boosted(data, first, bias, bw.spec().predicates, {});
  EXPECT_EQ(second.ensemble(Symbol("moveToFloor")).initial, first.ensemble(Symbol("moveToFloor")).initial);
  EXPECT_EQ(second.ensemble(Symbol("moveToFloor")).stages.size(), first.ensemble(Symbol("moveToFloor")).stages.size());
  EXPECT_NE(second.ensemble(Symbol("move")).initial, first.ensemble(Symbol("move")).initial);
}

TEST(ModelFormat, RejectsMalformedText) {
  EXPECT_THROW(BoostedQFunction::deserialize("nonsense"), ModelFormatError);
  EXPECT_THROW(BoostedQFunction::deserialize("rael-model 1\nensemble act\ninitial x\nend\n"), ModelFormatError);
  EXPECT_THROW(BoostedQFunction::deserialize("rael-model 1\nensemble act\ninitial 0\nstage 1\nsplit 0 f1\nleaf 1\n"),
               ModelFormatError);
  const auto q = BoostedQFunction::deserialize("rael-model 1\nensemble act\ninitial 2\nstage 0.5\nleaf 4\nend\n");
  EXPECT_DOUBLE_EQ(q.predict(logic::SymbolicState{}, GroundAction::parse("act")), 4.0);
}

}  // namespace
}  // namespace rael::learner
