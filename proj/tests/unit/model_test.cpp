#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <queue>
#include <random>
#include <set>
#include <unordered_set>

#include "rsg/classifier.hpp"
#include "rsg/model.hpp"
#include "support.hpp"

namespace rsg {
namespace {

std::vector<double> random_phi(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> phi(n);
  for (auto& x : phi) x = static_cast<double>(rng() % 2);
  return phi;
}

class ModelTest : public ::testing::Test {
 protected:
  WorldConfig cfg = default_world();
  Theta theta = Theta::zeros_for(cfg);
  std::size_t dim = feature_schema(cfg).size();
};

TEST_F(ModelTest, ZeroParametersGiveOneHalf) {
  const auto phi = features(cfg.empty_state(), cfg);
  for (const auto& o : cfg.subgoal_names()) {
    EXPECT_EQ(eval_G(theta, o, phi), 0.5);
    EXPECT_EQ(eval_I(theta, o, phi), 0.5);
  }
}

TEST_F(ModelTest, BiasIsMonotone) {
  const auto phi = features(cfg.empty_state(), cfg);
  const std::size_t k = theta.index_of("grab-axe");
  double prev = 0.0;
  for (double b : {-5.0, -1.0, 0.0, 1.0, 5.0, 20.0, 40.0}) {
    theta.block(k, Head::kG).back() = b;
    const double g = eval_G(theta, "grab-axe", phi);
    EXPECT_GT(g, prev);
    EXPECT_LE(g, 1.0);
    EXPECT_TRUE(std::isfinite(std::log(g)));
    prev = g;
  }
}

TEST_F(ModelTest, UnknownSubgoal) {
  const auto phi = features(cfg.empty_state(), cfg);
  EXPECT_THROW(eval_G(theta, "fly", phi), std::invalid_argument);
  EXPECT_THROW(grad_log(theta, "fly", phi, Head::kI), std::invalid_argument);
}

TEST_F(ModelTest, HandSetWeightsMatchTheOracleOnReachableStates) {
  const std::size_t k = theta.index_of("grab-axe");
  const auto names = feature_schema(cfg);
  const std::size_t inv_axe = static_cast<std::size_t>(std::find(names.begin(), names.end(), "inv:axe") - names.begin());
  theta.block(k, Head::kG)[inv_axe] = 10.0;
  theta.block(k, Head::kG).back() = -5.0;

  WorldConfig small = testing::sized_world(4, 4);
  GridState s0 = small.empty_state();
  testing::place(s0, small, "axe", 3, 3);
  testing::place(s0, small, "pickaxe", 0, 3);
  testing::place(s0, small, "wall", 1, 1);
  const auto oracle = oracle_goal("grab-axe", small);
  std::unordered_set<GridState, GridStateHash> seen{s0};
  std::queue<GridState> q;
  q.push(s0);
  std::size_t agree = 0;
  while (!q.empty()) {
    const GridState s = q.front();
    q.pop();
    agree += (eval_G(theta, "grab-axe", features(s, small)) >= 0.5) == oracle(s);
    for (Action a : kAllActions) {
      GridState t = transition(s, a, small);
      if (seen.insert(t).second) q.push(t);
    }
  }
  EXPECT_GT(seen.size(), 30u);
  EXPECT_EQ(agree, seen.size());
}

TEST_F(ModelTest, HeadsAreIndependent) {
  std::mt19937_64 rng(2);
  theta = testing::random_theta(cfg, rng);
  const auto phi = random_phi(dim, rng);
  const double i_before = eval_I(theta, "mine-wood", phi);
  for (auto& w : theta.block(theta.index_of("mine-wood"), Head::kG)) w += 3.0;
  EXPECT_EQ(eval_I(theta, "mine-wood", phi), i_before);
}

TEST_F(ModelTest, GradientAtZeroIsHalfFeatures) {
  std::mt19937_64 rng(3);
  const auto phi = random_phi(dim, rng);
  const auto g = grad_log(theta, "craft-boat", phi, Head::kG);
  ASSERT_EQ(g.size(), dim + 1);
  for (std::size_t i = 0; i < dim; ++i) EXPECT_DOUBLE_EQ(g[i], 0.5 * phi[i]);
  EXPECT_DOUBLE_EQ(g[dim], 0.5);
}

TEST_F(ModelTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int rep = 0; rep < 20; ++rep) {
    theta = testing::random_theta(cfg, rng, 0.5);
    const auto phi = random_phi(dim, rng);
    const std::string o = cfg.subgoal_names()[rng() % cfg.subgoals.size()];
    for (Head head : {Head::kG, Head::kI}) {
      const auto g = grad_log(theta, o, phi, head);
      auto eval = [&] {
        return std::log(head == Head::kG ? eval_G(theta, o, phi) : eval_I(theta, o, phi));
      };
      auto block = theta.block(theta.index_of(o), head);
      for (std::size_t j = 0; j < block.size(); ++j) {
        const double keep = block[j];
        block[j] = keep + h;
        const double up = eval();
        block[j] = keep - h;
        const double down = eval();
        block[j] = keep;
        const double fd = (up - down) / (2 * h);
        EXPECT_LE(std::abs(fd - g[j]), 1e-5 * std::max(1.0, std::abs(g[j])));
      }
    }
  }
}

TEST_F(ModelTest, LogOutputPlusLogComplementIdentity) {
  // d/dz [log s(z) + log(1 - s(z))] = 1 - 2 s(z).
  for (double z : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
    const double h = 1e-6;
    const auto f = [](double x) { return log_sigmoid(x) + log_sigmoid(-x); };
    EXPECT_NEAR((f(z + h) - f(z - h)) / (2 * h), 1.0 - 2.0 * sigmoid(z), 1e-8);
  }
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
  EXPECT_NEAR(log_sigmoid(800.0), 0.0, 1e-12);
}

TEST_F(ModelTest, DeterministicOutputs) {
  std::mt19937_64 rng(8);
  theta = testing::random_theta(cfg, rng);
  const auto phi = random_phi(dim, rng);
  EXPECT_EQ(eval_G(theta, "grab-key", phi), eval_G(theta, "grab-key", phi));
}

TEST_F(ModelTest, SparseLogitMatchesDense) {
  std::mt19937_64 rng(9);
  theta = testing::random_theta(cfg, rng);
  GridState s = testing::random_state(cfg, rng, {"tree", "axe", "workbench", "switch"});
  const auto phi = features(s, cfg);
  const auto act = active_features(s, cfg);
  for (std::size_t k = 0; k < cfg.subgoals.size(); ++k) {
    EXPECT_NEAR(theta.logit(k, Head::kG, phi), theta.logit_sparse(k, Head::kG, act), 1e-12);
    EXPECT_NEAR(theta.logit(k, Head::kI, phi), theta.logit_sparse(k, Head::kI, act), 1e-12);
  }
}

TEST_F(ModelTest, SerializeRoundTrip) {
  std::mt19937_64 rng(10);
  theta = testing::random_theta(cfg, rng);
  EXPECT_EQ(deserialize(serialize(theta)), theta);
  const auto path = std::filesystem::temp_directory_path() / "rsg_model_roundtrip.bin";
  save_model(path, theta);
  EXPECT_EQ(load_model(path, schema_hash(cfg)), theta);
  std::filesystem::remove(path);
}

TEST_F(ModelTest, SerializeErrors) {
  std::string bytes = serialize(theta);
  try {
    deserialize(std::string_view(bytes).substr(0, bytes.size() / 2));
    FAIL();
  } catch (const ModelFormatError& e) {
    EXPECT_EQ(e.reason(), ModelFormatError::Reason::kCorrupt);
  }
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  try {
    deserialize(flipped);
    FAIL();
  } catch (const ModelFormatError& e) {
    EXPECT_EQ(e.reason(), ModelFormatError::Reason::kCorrupt);
  }
  std::string old = bytes;
  old[4] = 0;  // version field follows the 4-byte magic
  try {
    deserialize(old);
    FAIL();
  } catch (const ModelFormatError& e) {
    EXPECT_EQ(e.reason(), ModelFormatError::Reason::kVersion);
  }
  const auto path = std::filesystem::temp_directory_path() / "rsg_model_schema.bin";
  save_model(path, theta);
  try {
    load_model(path, schema_hash(cfg) ^ 1);
    FAIL();
  } catch (const ModelFormatError& e) {
    EXPECT_EQ(e.reason(), ModelFormatError::Reason::kSchema);
  }
  std::filesystem::remove(path);
}

// ---------------------------------------------------------------------------
// Classifier wrappers

TEST_F(ModelTest, OracleClassifierOutputs) {
  GridState s = cfg.empty_state();
  testing::give(s, cfg, "axe");
  const OracleClassifier hard(cfg, 0.0);
  const auto sc = hard.evaluate(s);
  const std::size_t axe = hard.index_of("grab-axe");
  const std::size_t wood = hard.index_of("mine-wood");
  EXPECT_EQ(sc.log_g[axe], 0.0);
  EXPECT_EQ(sc.log_i[axe], -INFINITY);
  EXPECT_EQ(sc.log_g[wood], -INFINITY);
  EXPECT_EQ(sc.log_i[wood], 0.0);
  const OracleClassifier soft(cfg, 0.1);
  const auto sc2 = soft.evaluate(s);
  EXPECT_NEAR(sc2.log_g[axe], std::log(0.9), 1e-12);
  EXPECT_NEAR(sc2.log_i[axe], std::log(0.1), 1e-12);
}

TEST_F(ModelTest, LearnedClassifierModes) {
  std::mt19937_64 rng(12);
  theta = testing::random_theta(cfg, rng);
  GridState s = testing::random_state(cfg, rng, {"tree", "axe"});
  const auto phi = features(s, cfg);
  const std::size_t k = theta.index_of("mine-wood");
  const double g = eval_G(theta, "mine-wood", phi);

  const LearnedClassifier sep(cfg, theta, ComplementMode::kSeparate);
  EXPECT_NEAR(sep.evaluate(s).log_g[k], std::log(g), 1e-12);
  EXPECT_NEAR(sep.evaluate(s).log_i[k], std::log(eval_I(theta, "mine-wood", phi)), 1e-12);

  const LearnedClassifier omg(cfg, theta, ComplementMode::kOneMinusG);
  EXPECT_NEAR(omg.evaluate(s).log_i[k], std::log(1.0 - g), 1e-12);

  std::vector<double> th(cfg.subgoals.size(), 0.0);
  th[k] = g + 1e-9;  // just above G: not satisfied
  const LearnedClassifier thr(cfg, theta, ComplementMode::kThresholded, th);
  EXPECT_EQ(thr.evaluate(s).log_g[k], -INFINITY);
  EXPECT_EQ(thr.evaluate(s).log_i[k], 0.0);
  th[k] = g * (1.0 - 1e-9);
  const LearnedClassifier thr2(cfg, theta, ComplementMode::kThresholded, th);
  EXPECT_EQ(thr2.evaluate(s).log_g[k], 0.0);
  EXPECT_EQ(thr2.evaluate(s).log_i[k], -INFINITY);
}

}  // namespace
}  // namespace rsg
