#include "rsg/search_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace rsg {

std::optional<std::int32_t> SearchTree::find(const AugmentedState& x) const {
  auto it = index.find(x);
  if (it == index.end() || nodes[it->second].pruned) return std::nullopt;
  return it->second;
}

double SearchTree::action_value(std::int32_t n, std::size_t e) const {
  const TreeEdge& edge = nodes[n].edges[e];
  if (edge.child < 0) return kOutOfTreeCost;
  return edge.cost + value[edge.child];
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const TaskModel& model, const PlannerConfig& cfg) : model_(model), cfg_(cfg) {
    const auto order = topological_order(model.fsm());
    rank_.resize(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
  }

  SearchTree build(std::span<const AugmentedState> roots) {
    tree_.terminal = model_.fsm().terminal();
    if (cfg_.b < 1 || cfg_.c < 0) throw std::invalid_argument("search tree needs b >= 1 and c >= 0");
    const Fsm& fsm = model_.fsm();
    const int max_depth = cfg_.b + cfg_.c;
    std::vector<std::vector<std::int32_t>> next_layer(fsm.size());
    for (const auto& r : roots) {
      auto [id, created] = node_for(r, 0, 0.0);
      if (created) {
        tree_.roots.push_back(id);
        next_layer[r.v].push_back(id);
      }
    }

    for (int depth = 0; depth <= max_depth; ++depth) {
      buckets_.assign(fsm.size(), {});
      std::swap(buckets_, next_layer);
      next_layer.assign(fsm.size(), {});
      std::vector<std::int32_t> kept;

      std::vector<FsmNodeId> by_rank(fsm.size());
      for (FsmNodeId v = 0; v < fsm.size(); ++v) by_rank[rank_[v]] = v;
      for (FsmNodeId v : by_rank) {
        auto& bucket = buckets_[v];
        if (depth > cfg_.b && cfg_.k != 0 && bucket.size() > cfg_.k) {
          std::stable_sort(bucket.begin(), bucket.end(),
                           [&](std::int32_t a, std::int32_t b) { return tree_.nodes[a].g < tree_.nodes[b].g; });
          for (std::size_t i = cfg_.k; i < bucket.size(); ++i) tree_.nodes[bucket[i]].pruned = true;
          bucket.resize(cfg_.k);
        }
        if (v == fsm.terminal()) continue;
        for (std::int32_t id : bucket) {
          kept.push_back(id);
          add_transitions(id, depth);
        }
      }
      if (depth == max_depth) break;
      for (std::int32_t id : kept) {
        const AugmentedState x = tree_.nodes[id].x;
        if (fsm.is_super(x.v)) continue;
        for (Action a : kAllActions) {
          const double c = step_cost(x.s, a);
          auto [child, created] = node_for({transition(x.s, a, model_.world()), x.v}, depth + 1, tree_.nodes[id].g + c);
          tree_.nodes[id].edges.push_back({AugmentedAction::step(a), child, c});
          if (created) next_layer[x.v].push_back(child);
        }
      }
    }

    for (auto& n : tree_.nodes) {
      for (auto& e : n.edges) {
        if (e.child >= 0 && tree_.nodes[e.child].pruned) e.child = -1;
      }
    }
    return std::move(tree_);
  }

 private:
  std::pair<std::int32_t, bool> node_for(const AugmentedState& x, int depth, double g) {
    auto [it, inserted] = tree_.index.try_emplace(x, static_cast<std::int32_t>(tree_.nodes.size()));
    if (inserted) {
      TreeNode n;
      n.x = x;
      n.depth = depth;
      n.g = g;
      tree_.nodes.push_back(std::move(n));
    }
    return {it->second, inserted};
  }

  void add_transitions(std::int32_t id, int depth) {
    const Fsm& fsm = model_.fsm();
    const AugmentedState x = tree_.nodes[id].x;
    auto cache = score_cache_.find(x.s);
    if (cache == score_cache_.end()) cache = score_cache_.emplace(x.s, model_.classifier().evaluate(x.s)).first;
    for (FsmNodeId w : fsm.successors(x.v)) {
      const double c = model_.edge_cost(x.v, w, cache->second);
      if (!std::isfinite(c)) continue;
      auto [child, created] = node_for({x.s, w}, depth, tree_.nodes[id].g + c);
      tree_.nodes[id].edges.push_back({AugmentedAction::move_to(w), child, c});
      if (created) buckets_[w].push_back(child);
    }
  }

  const TaskModel& model_;
  const PlannerConfig& cfg_;
  std::vector<std::size_t> rank_;
  std::vector<std::vector<std::int32_t>> buckets_;
  std::unordered_map<GridState, GoalScores, GridStateHash> score_cache_;
  SearchTree tree_;
};

}  // namespace

SearchTree build_search_tree(const TaskModel& model, const PlannerConfig& config, std::span<const AugmentedState> roots) {
  return TreeBuilder(model, config).build(roots);
}

void value_iteration(SearchTree& tree) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = tree.nodes.size();
  tree.value.assign(n, kInf);
  tree.best_edge.assign(n, -1);
  tree.settle_order.clear();

  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> incoming(n);  // (parent, edge index)
  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

  // Seeds: vT nodes at 0; leaves and nodes with an action leaving the tree at
  // the sentinel.
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.pruned) continue;
    if (node.x.v == tree.terminal) {
      tree.value[i] = 0.0;
    } else if (node.edges.empty()) {
      tree.value[i] = kOutOfTreeCost;
    }
    for (std::size_t e = 0; e < node.edges.size(); ++e) {
      const TreeEdge& edge = node.edges[e];
      if (edge.child >= 0) {
        incoming[edge.child].emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(e));
      } else if (kOutOfTreeCost < tree.value[i]) {
        tree.value[i] = kOutOfTreeCost;
        tree.best_edge[i] = static_cast<std::int32_t>(e);
      }
    }
    if (std::isfinite(tree.value[i])) pq.emplace(tree.value[i], static_cast<std::int32_t>(i));
  }

  std::vector<char> settled(n, 0);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (settled[u] || d != tree.value[u]) continue;
    settled[u] = 1;
    tree.settle_order.push_back(u);
    for (const auto& [p, e] : incoming[u]) {
      if (settled[p]) continue;
      const double cand = tree.nodes[p].edges[e].cost + d;
      if (cand < tree.value[p]) {
        tree.value[p] = cand;
        tree.best_edge[p] = e;
        pq.emplace(cand, p);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!settled[i]) {
      tree.value[i] = kOutOfTreeCost;
      tree.best_edge[i] = -1;
    }
  }
}

namespace {

std::vector<double> action_logits(const SearchTree& tree, std::int32_t n, double alpha) {
  const auto& edges = tree.nodes.at(n).edges;
  std::vector<double> z(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) z[e] = -alpha * tree.action_value(n, e);
  return z;
}

std::size_t edge_of(const SearchTree& tree, std::int32_t n, const AugmentedAction& a) {
  const auto& edges = tree.nodes[n].edges;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].action == a) return e;
  }
  throw std::out_of_range("action not available at tree node");
}

std::int32_t node_of(const SearchTree& tree, const AugmentedState& x) {
  auto n = tree.find(x);
  if (!n) throw std::out_of_range("state not in search tree");
  return *n;
}

}  // namespace

std::vector<double> log_action_probabilities(const SearchTree& tree, std::int32_t n, double alpha) {
  std::vector<double> z = action_logits(tree, n, alpha);
  if (z.empty()) return z;
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - m);
  const double lse = m + std::log(sum);
  for (double& v : z) v -= lse;
  return z;
}

std::vector<double> action_probabilities(const SearchTree& tree, std::int32_t n, double alpha) {
  std::vector<double> p = log_action_probabilities(tree, n, alpha);
  for (double& v : p) v = std::exp(v);
  return p;
}

double log_rationality(const SearchTree& tree, const AugmentedState& x, const AugmentedAction& a, double alpha) {
  const std::int32_t n = node_of(tree, x);
  const std::size_t e = edge_of(tree, n, a);
  return log_action_probabilities(tree, n, alpha)[e];
}

double rationality(const SearchTree& tree, const AugmentedState& x, const AugmentedAction& a, double alpha) {
  return std::exp(log_rationality(tree, x, a, alpha));
}

}  // namespace rsg
