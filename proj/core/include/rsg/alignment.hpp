#pragma once

#include <cstddef>
#include <vector>

#include "rsg/classifier.hpp"
#include "rsg/demo.hpp"
#include "rsg/fsm.hpp"
#include "rsg/planner.hpp"
#include "rsg/search_tree.hpp"

namespace rsg {

struct ScoreConfig {
  double alpha = 1.0;   // inverse rationality
  double lambda = 1.0;  // weight of the transition log terms
  bool boundary_terms = true;
  // Trees for Rat: depth b + c from every demo state; k = 0 disables pruning.
  int tree_b = 2;
  int tree_c = 1;
  std::size_t tree_k = 0;

  PlannerConfig tree_config() const;
  CostOptions cost_options() const { return {lambda, boundary_terms}; }
};

// Per-state inputs of the segmentation DP, indexed [i * fsm_size + v].
struct ScoreTables {
  std::size_t n = 0;          // demo states
  std::size_t fsm_size = 0;
  std::vector<double> log_rat;  // (n - 1) rows: log Rat((s_i, v), a_i)
  std::vector<double> log_g;    // n rows: log G_v(s_i)
  std::vector<double> log_i;    // n rows: log I_v(s_i)

  ScoreTables(std::size_t n_states, std::size_t nodes);
  double& rat(std::size_t i, FsmNodeId v) { return log_rat[i * fsm_size + v]; }
  double& g(std::size_t i, FsmNodeId v) { return log_g[i * fsm_size + v]; }
  double& inv(std::size_t i, FsmNodeId v) { return log_i[i * fsm_size + v]; }
  double rat(std::size_t i, FsmNodeId v) const { return log_rat[i * fsm_size + v]; }
  double g(std::size_t i, FsmNodeId v) const { return log_g[i * fsm_size + v]; }
  double inv(std::size_t i, FsmNodeId v) const { return log_i[i * fsm_size + v]; }
};

struct AlignmentStep {
  std::size_t index;  // state at which the FSM edge is taken
  FsmNodeId from;
  FsmNodeId to;
};

struct Alignment {
  std::vector<FsmNodeId> node_at;          // labeled node acting at each state; last entry is the node left into vT
  std::vector<AlignmentStep> transitions;  // includes the v0 exit and the vT entry
  std::vector<FsmNodeId> path() const;     // v0, ..., vT
  bool empty() const { return node_at.empty(); }
};

struct ScoreResult {
  double score = 0.0;
  Alignment alignment;  // empty when no alignment has finite score
};

// Max over alignments of
//   sum_i log Rat(s_i, v_i, a_i) + lambda * sum over transitions (log G_v + log I_w)
// with edges out of v0 keeping only log I_w (at s_0) and edges into vT only
// log G_v (at s_{n-1}); without boundary terms both are 0. FSM edges consume
// no trajectory step. Ties prefer staying, then lower successor ids.
ScoreResult score_tables(const Fsm& fsm, const ScoreTables& t, double lambda, bool boundary_terms);

// Builds the Rat tree rooted at every (s_i, v) for labeled v and fills the
// tables for `demo`.
ScoreTables make_tables(const Demonstration& demo, const TaskModel& model, const SearchTree& tree, double alpha);
SearchTree rationality_tree(const Demonstration& demo, const TaskModel& model, const ScoreConfig& cfg);

ScoreResult score(const Demonstration& demo, const Fsm& fsm, const Classifier& classifier, const WorldConfig& world,
                  const ScoreConfig& cfg);
Alignment segment(const Demonstration& demo, const Fsm& fsm, const Classifier& classifier, const WorldConfig& world,
                  const ScoreConfig& cfg);

}  // namespace rsg
