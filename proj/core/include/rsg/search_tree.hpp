#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rsg/planner.hpp"
#include "rsg/product.hpp"

namespace rsg {

// Cost-to-go assigned to an action whose successor was pruned or never built.
inline constexpr double kOutOfTreeCost = 1e3;

struct TreeEdge {
  AugmentedAction action;
  std::int32_t child = -1;  // -1: leaves the tree
  double cost = 0.0;
};

struct TreeNode {
  AugmentedState x;
  int depth = 0;
  double g = 0.0;
  std::vector<TreeEdge> edges;
  bool pruned = false;
};

// Expansion graph over augmented states. States are deduplicated, so one
// node may be reached from several roots or parents.
struct SearchTree {
  std::vector<TreeNode> nodes;
  std::vector<std::int32_t> roots;
  std::unordered_map<AugmentedState, std::int32_t, AugmentedStateHash> index;
  FsmNodeId terminal = 0;  // vT of the task automaton

  // Filled by value_iteration.
  std::vector<double> value;             // min over actions of J
  std::vector<std::int32_t> best_edge;   // argmin edge, -1 for dead ends
  std::vector<std::int32_t> settle_order;  // successors settle before predecessors

  std::optional<std::int32_t> find(const AugmentedState& x) const;
  // J(x, a) for edge e of node n.
  double action_value(std::int32_t n, std::size_t e) const;
};

// Layer 0 holds the roots. Within a layer, FSM transitions are added node by
// node in topological order of v (new (s, v') nodes join the same layer);
// primitives then build the next layer. Layers deeper than b keep at most k
// nodes per FSM node, chosen by accumulated cost g.
SearchTree build_search_tree(const TaskModel& model, const PlannerConfig& config,
                             std::span<const AugmentedState> roots);

// Cost-to-go by reverse Dijkstra from the vT nodes: J(x, a) = C(x, a) + V(x')
// with V = 0 at vT and kOutOfTreeCost for actions leaving the tree and for
// nodes that cannot reach vT inside the tree.
void value_iteration(SearchTree& tree);

// Softmax of -alpha * J over the actions of node n.
std::vector<double> action_probabilities(const SearchTree& tree, std::int32_t n, double alpha);
std::vector<double> log_action_probabilities(const SearchTree& tree, std::int32_t n, double alpha);

// Rat(s, v, a). Throws std::out_of_range when x is not in the tree or a is
// not one of its actions.
double rationality(const SearchTree& tree, const AugmentedState& x, const AugmentedAction& a, double alpha);
double log_rationality(const SearchTree& tree, const AugmentedState& x, const AugmentedAction& a, double alpha);

}  // namespace rsg
