#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "rsg/alignment.hpp"
#include "rsg/demo.hpp"
#include "rsg/objective.hpp"
#include "rsg/scenario.hpp"
#include "rsg/trainer.hpp"
#include "support.hpp"

namespace rsg {
namespace {

using testing::alignment_score;
using testing::brute_score;
using testing::fd_gradient;
using testing::Fixture;
using testing::frozen_batch;
using testing::random_tables;
using testing::random_walk;
using testing::relative_error;
using testing::tables_via_api;
using testing::two_subgoal_fixture;

TEST(ScoreTables, MatchesBruteForce) {
  std::mt19937_64 rng(61);
  for (int rep = 0; rep < 300; ++rep) {
    const Fsm f = compile(testing::random_task({"a", "b", "c", "d"}, 3, rng));
    if (f.labeled_count() > 5) continue;
    const std::size_t n = 1 + rng() % 8;
    const ScoreTables t = random_tables(n, f, rng);
    for (bool boundary : {true, false}) {
      const double lambda = rep % 3 == 0 ? 0.5 : 1.0;
      const ScoreResult r = score_tables(f, t, lambda, boundary);
      EXPECT_NEAR(r.score, brute_score(f, t, lambda, boundary), 1e-9);
      ASSERT_FALSE(r.alignment.empty());
      EXPECT_NEAR(alignment_score(f, t, r.alignment, lambda, boundary), r.score, 1e-9);
    }
  }
}

TEST(ScoreTables, AlignmentIsAValidPath) {
  std::mt19937_64 rng(62);
  for (int rep = 0; rep < 100; ++rep) {
    const Fsm f = compile(testing::random_task({"a", "b", "c"}, 3, rng));
    const std::size_t n = 2 + rng() % 6;
    const ScoreResult r = score_tables(f, random_tables(n, f, rng), 1.0, true);
    const auto p = r.alignment.path();
    ASSERT_GE(p.size(), 3u);
    EXPECT_EQ(p.front(), f.start());
    EXPECT_EQ(p.back(), f.terminal());
    for (std::size_t k = 0; k + 1 < p.size(); ++k) EXPECT_TRUE(f.has_edge(p[k], p[k + 1]));
    EXPECT_EQ(r.alignment.transitions.front().index, 0u);
    EXPECT_EQ(r.alignment.transitions.back().index, n - 1);
    for (std::size_t k = 1; k < r.alignment.transitions.size(); ++k) {
      EXPECT_LE(r.alignment.transitions[k - 1].index, r.alignment.transitions[k].index);
    }
  }
}

TEST(ScoreTables, SingleNodeUsesTheOnlyAssignment) {
  const Fsm f = compile(parse_task("a"));
  std::mt19937_64 rng(63);
  const ScoreTables t = random_tables(2, f, rng);
  const ScoreResult r = score_tables(f, t, 1.0, true);
  EXPECT_NEAR(r.score, t.rat(0, 1) + t.inv(0, 1) + t.g(1, 1), 1e-12);
  EXPECT_EQ(r.alignment.node_at, (std::vector<FsmNodeId>{1, 1}));
}

TEST(ScoreTables, OrTakesTheBetterBranch) {
  std::mt19937_64 rng(64);
  for (int rep = 0; rep < 50; ++rep) {
    const Fsm fab = compile(parse_task("a or b"));  // a = 1, b = 2
    const ScoreTables t = random_tables(5, fab, rng);
    auto branch = [&](FsmNodeId v) {
      const Fsm single = compile(TaskAst::atom(v == 1 ? "a" : "b"));
      ScoreTables u(5, single.size());
      for (std::size_t i = 0; i < 5; ++i) {
        if (i < 4) u.rat(i, 1) = t.rat(i, v);
        u.g(i, 1) = t.g(i, v);
        u.inv(i, 1) = t.inv(i, v);
      }
      return score_tables(single, u, 1.0, true).score;
    };
    EXPECT_NEAR(score_tables(fab, t, 1.0, true).score, std::max(branch(1), branch(2)), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Scores on demonstrations

TEST(Score, MatchesBruteForceOnDemonstrations) {
  std::mt19937_64 rng(71);
  const WorldConfig cfg = testing::sized_world(5, 5);
  ScoreConfig sc;
  for (int rep = 0; rep < 40; ++rep) {
    const TaskAst task = testing::random_task({"grab-axe", "mine-wood", "grab-pickaxe"}, 3, rng);
    const Fsm f = compile(task);
    if (f.labeled_count() > 5) continue;
    const Theta th = testing::random_theta(cfg, rng);
    const LearnedClassifier clf(cfg, th);
    const Demonstration d = random_walk(cfg, rng, 1 + rng() % 10, task);
    sc.alpha = rep % 2 ? 1.0 : 3.0;
    const ScoreResult r = score(d, f, clf, cfg, sc);
    const TaskModel model(cfg, f, clf, sc.cost_options());
    const SearchTree tree = rationality_tree(d, model, sc);
    EXPECT_NEAR(r.score, brute_score(f, tables_via_api(d, model, tree, sc.alpha), sc.lambda, true), 1e-9);
  }
}

TEST(Segment, ThenSplitsAtFirstOracleSatisfaction) {
  const WorldConfig cfg = default_world();
  const OracleClassifier oracle(cfg, 1e-3);
  const auto has_axe = oracle_goal("grab-axe", cfg);
  const Scenario sc = parse_scenario("grab-axe then mine-wood", cfg);
  DemoOptions opts;
  opts.noise = 0.0;
  ScoreConfig cfg_score;
  cfg_score.alpha = 5.0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Demonstration d = generate_demo(cfg, sc, seed, opts);
    const Fsm f = compile(d.task);
    const Alignment a = segment(d, f, oracle, cfg, cfg_score);
    ASSERT_EQ(a.transitions.size(), 3u);
    std::size_t first = 0;
    while (!has_axe(d.states[first])) ++first;
    EXPECT_EQ(a.transitions[1].index, first) << "seed " << seed;
  }
}

TEST(Segment, SingleNodeCoversEveryIndex) {
  const WorldConfig cfg = default_world();
  const OracleClassifier oracle(cfg, 1e-3);
  const Demonstration d = generate_demo(cfg, parse_scenario("grab-pickaxe", cfg), 4);
  const Alignment a = segment(d, compile(d.task), oracle, cfg, ScoreConfig{});
  for (auto v : a.node_at) EXPECT_EQ(v, 1u);
  EXPECT_EQ(a.node_at.size(), d.states.size());
}

// ---------------------------------------------------------------------------
// Objective

TEST(Objective, FrozenValueEqualsDpScore) {
  std::mt19937_64 rng(81);
  for (int rep = 0; rep < 10; ++rep) {
    Fixture fx = two_subgoal_fixture(rng);
    ScoreConfig sc;
    sc.alpha = 1.0 + rep % 3;
    for (std::size_t k = 0; k < fx.demos.size(); ++k) {
      const ScoredTask st = score_task(fx.demos[k], fx.tasks[k], fx.cfg, fx.theta, sc);
      ASSERT_TRUE(st.frozen.has_value());
      EXPECT_NEAR(st.frozen->value(fx.theta), st.score, 1e-9);
    }
  }
}

TEST(Objective, ScoreGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(82);
  for (int rep = 0; rep < 5; ++rep) {
    Fixture fx = two_subgoal_fixture(rng);
    const ScoredTask st = score_task(fx.demos[0], fx.tasks[0], fx.cfg, fx.theta, ScoreConfig{});
    ASSERT_TRUE(st.frozen);
    std::vector<double> g(fx.theta.params().size(), 0.0);
    st.frozen->accumulate_gradient(fx.theta, 1.0, g);
    const auto fd = fd_gradient([&](const Theta& th) { return st.frozen->value(th); }, fx.theta);
    EXPECT_LE(relative_error(g, fd), 1e-6);
  }
}

TEST(Loss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(83);
  for (int rep = 0; rep < 5; ++rep) {
    Fixture fx = two_subgoal_fixture(rng);
    LossConfig lc;
    lc.gamma = 0.5;
    lc.beta = 0.7;
    const auto batch = frozen_batch(fx, ScoreConfig{}, rng);
    std::vector<double> g;
    contrastive_loss(batch, fx.theta, lc, &g);
    const auto fd = fd_gradient([&](const Theta& th) { return contrastive_loss(batch, th, lc, nullptr); }, fx.theta);
    EXPECT_LE(relative_error(g, fd), 1e-6);
  }
}

TEST(Loss, GammaZeroIsTheMeanScoreGradient) {
  std::mt19937_64 rng(84);
  Fixture fx = two_subgoal_fixture(rng);
  const auto batch = frozen_batch(fx, ScoreConfig{}, rng);
  LossConfig lc;
  lc.gamma = 0.0;
  std::vector<double> g;
  const double loss = contrastive_loss(batch, fx.theta, lc, &g);
  std::vector<double> expected(g.size(), 0.0);
  double mean = 0.0;
  for (const auto& s : batch) {
    mean += s.scores[0].accumulate_gradient(fx.theta, -1.0 / static_cast<double>(batch.size()), expected);
  }
  EXPECT_NEAR(loss, -mean / static_cast<double>(batch.size()), 1e-9);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(g[j], expected[j], 1e-12);
}

TEST(Loss, IdenticalNegativeGivesLogHalf) {
  std::mt19937_64 rng(85);
  Fixture fx = two_subgoal_fixture(rng);
  const ScoredTask st = score_task(fx.demos[0], fx.tasks[0], fx.cfg, fx.theta, ScoreConfig{});
  ASSERT_TRUE(st.frozen);
  FrozenSample s;
  s.scores = {*st.frozen, *st.frozen};
  LossConfig lc;
  lc.gamma = 0.1;
  for (double beta : {1.0, 3.0}) {
    lc.beta = beta;
    EXPECT_NEAR(contrastive_loss({s}, fx.theta, lc, nullptr), -(st.score + 0.1 * std::log(0.5)), 1e-9);
  }
  EXPECT_NEAR(log_softmax_first({2.0, 2.0}, 1.0), std::log(0.5), 1e-15);
}

TEST(Negatives, ExcludeTheTrueTaskUpToReordering) {
  std::mt19937_64 rng(86);
  const auto pool = enumerate_tasks({"a", "b", "c"}, 3);
  const TaskAst t = parse_task("a or b");
  for (int rep = 0; rep < 50; ++rep) {
    const auto negs = sample_negatives(t, pool, 4, rng);
    EXPECT_EQ(negs.size(), 4u);
    for (const auto& n : negs) EXPECT_NE(canonical_key(n), canonical_key(t));
  }
}

// ---------------------------------------------------------------------------
// Training

std::vector<Demonstration> grab_axe_demos(const WorldConfig& cfg, std::size_t n) {
  std::vector<Demonstration> out;
  const Scenario sc = parse_scenario("grab-axe", cfg);
  const Scenario sc2 = parse_scenario("grab-pickaxe", cfg);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_demo(cfg, i % 2 ? sc2 : sc, i));
  return out;
}

TEST(Train, ZeroEpochsLeavesThetaUnchanged) {
  const WorldConfig cfg = default_world();
  const auto data = grab_axe_demos(cfg, 4);
  TrainConfig tc;
  tc.epochs = 0;
  std::mt19937_64 rng(91);
  const Theta init = testing::random_theta(cfg, rng);
  EXPECT_EQ(train(data, cfg, tc, init).theta, init);
  EXPECT_EQ(train(data, cfg, tc).theta, Theta::zeros_for(cfg));
}

TEST(Train, LearnsTheSingleFeatureSubgoal) {
  const WorldConfig cfg = default_world();
  const auto data = grab_axe_demos(cfg, 24);
  TrainConfig tc;
  tc.epochs = 8;
  tc.score.alpha = 5.0;
  std::size_t records = 0;
  const TrainResult r = train(data, cfg, tc, std::nullopt, [&](const EpochRecord&) { ++records; });
  EXPECT_EQ(records, 8u);
  EXPECT_EQ(r.log.size(), 8u);
  const auto names = feature_schema(cfg);
  const auto idx = [&](const char* f) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), f) - names.begin());
  };
  EXPECT_GT(r.theta.block(r.theta.index_of("grab-axe"), Head::kG)[idx("inv:axe")], 0.0);
  EXPECT_GT(r.theta.block(r.theta.index_of("grab-pickaxe"), Head::kG)[idx("inv:pickaxe")], 0.0);
  std::size_t agree = 0, total = 0;
  for (const auto& d : data) {
    for (const auto& s : d.states) {
      const auto phi = features(s, cfg);
      for (const char* o : {"grab-axe", "grab-pickaxe"}) {
        agree += (eval_G(r.theta, o, phi) >= 0.5) == oracle_goal(o, cfg)(s);
        ++total;
      }
    }
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.99);
}

TEST(Train, LossTrendsDownWithASmallStep) {
  const WorldConfig cfg = default_world();
  const auto data = grab_axe_demos(cfg, 8);
  TrainConfig tc;
  tc.epochs = 20;
  tc.learning_rate = 0.02;
  tc.batch_size = 8;
  const TrainResult r = train(data, cfg, tc);
  std::size_t violations = 0;
  for (std::size_t e = 1; e < r.log.size(); ++e) violations += r.log[e].loss > r.log[e - 1].loss + 1e-12;
  EXPECT_LE(static_cast<double>(violations), 0.05 * static_cast<double>(r.log.size()));
  EXPECT_LT(r.log.back().loss, r.log.front().loss);
}

TEST(Train, DeterministicGivenSeed) {
  const WorldConfig cfg = default_world();
  const auto data = grab_axe_demos(cfg, 6);
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 5;
  EXPECT_EQ(train(data, cfg, tc).theta, train(data, cfg, tc).theta);
}

}  // namespace
}  // namespace rsg
