#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rsg/alignment.hpp"
#include "rsg/model.hpp"

namespace rsg {

// The score of one (demo, task) pair as a function of theta with the search
// tree, its argmin pointers and the DP alignment held fixed. At the theta it
// was built from, value() equals the DP score.
class FrozenScore {
 public:
  FrozenScore() = default;
  FrozenScore(const Demonstration& demo, const TaskModel& model, const SearchTree& tree, const Alignment& alignment,
              const ScoreConfig& cfg);

  double value(const Theta& theta) const;
  // Adds weight * d value / d theta to grad; returns value.
  double accumulate_gradient(const Theta& theta, double weight, std::vector<double>& grad) const;

  std::size_t rat_sites() const { return sites_.size(); }

 private:
  struct Term {
    std::uint32_t state;
    std::uint32_t subgoal;
    Head head;
    double coef;  // contributes coef * log sigma(logit)
  };
  struct Expr {
    double constant = 0.0;
    std::uint32_t begin = 0, end = 0;  // range in terms_
  };
  struct VNode {
    std::int32_t cost = -1;  // expr id; -1 for a constant node
    std::int32_t next = -1;  // vnode id of the argmin successor
    double constant = 0.0;
  };
  struct SiteEdge {
    std::int32_t cost;   // expr id
    std::int32_t vnode;  // -1 when the action leaves the tree
  };
  struct Site {
    std::vector<SiteEdge> edges;
    std::size_t taken;
  };

  std::uint32_t state_id(const GridState& s, const WorldConfig& world);
  std::int32_t edge_expr(std::int32_t node, std::size_t e, const TaskModel& model, const SearchTree& tree);
  std::int32_t vnode_of(std::int32_t node, const TaskModel& model, const SearchTree& tree);
  void add_transition_terms(std::vector<Term>& out, std::uint32_t state, FsmNodeId v, FsmNodeId w,
                            const TaskModel& model, double sign) const;

  void eval_terms(const Theta& theta, std::vector<double>& expr_values) const;

  double lambda_ = 1.0;
  double alpha_ = 1.0;
  bool boundary_ = true;
  std::vector<std::vector<std::uint16_t>> states_;
  std::vector<Term> terms_;
  std::vector<Expr> exprs_;
  std::vector<VNode> vnodes_;  // successors precede predecessors
  std::vector<Site> sites_;
  std::int32_t direct_ = -1;  // expr of the alignment's transition terms

  // build-time maps
  std::unordered_map<GridState, std::uint32_t, GridStateHash> state_lookup_;
  std::unordered_map<std::int32_t, std::int32_t> vnode_cache_;
};

struct LossConfig {
  double gamma = 0.1;  // contrastive weight
  double beta = 1.0;   // contrastive temperature
};

// One demonstration with its true task first and negatives after.
struct FrozenSample {
  std::vector<FrozenScore> scores;
};

// Mean over samples of -(score_true + gamma * log softmax_beta(scores)[true]).
// With grad non-null, grad is overwritten with the gradient.
double contrastive_loss(const std::vector<FrozenSample>& batch, const Theta& theta, const LossConfig& cfg,
                        std::vector<double>* grad);

// log softmax_beta over scores, evaluated at index 0.
double log_softmax_first(const std::vector<double>& scores, double beta);

}  // namespace rsg
