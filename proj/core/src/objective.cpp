#include "rsg/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace rsg {

namespace {

double log_sum_exp(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

std::uint32_t FrozenScore::state_id(const GridState& s, const WorldConfig& world) {
  auto [it, inserted] = state_lookup_.try_emplace(s, static_cast<std::uint32_t>(states_.size()));
  if (inserted) states_.push_back(active_features(s, world));
  return it->second;
}

void FrozenScore::add_transition_terms(std::vector<Term>& out, std::uint32_t state, FsmNodeId v, FsmNodeId w,
                                       const TaskModel& model, double sign) const {
  const Fsm& fsm = model.fsm();
  const bool from_start = v == fsm.start();
  const bool to_end = w == fsm.terminal();
  if (!boundary_ && (from_start || to_end)) return;
  if (!from_start) out.push_back({state, static_cast<std::uint32_t>(model.subgoal_of(v)), Head::kG, sign * lambda_});
  if (!to_end) out.push_back({state, static_cast<std::uint32_t>(model.subgoal_of(w)), Head::kI, sign * lambda_});
}

std::int32_t FrozenScore::edge_expr(std::int32_t node, std::size_t e, const TaskModel& model, const SearchTree& tree) {
  const TreeNode& tn = tree.nodes[node];
  const TreeEdge& edge = tn.edges[e];
  Expr ex;
  ex.begin = static_cast<std::uint32_t>(terms_.size());
  if (edge.child < 0) {
    ex.constant = kOutOfTreeCost;
  } else if (edge.action.is_primitive()) {
    ex.constant = edge.cost;
  } else {
    add_transition_terms(terms_, state_id(tn.x.s, model.world()), tn.x.v, edge.action.to, model, -1.0);
  }
  ex.end = static_cast<std::uint32_t>(terms_.size());
  exprs_.push_back(ex);
  return static_cast<std::int32_t>(exprs_.size() - 1);
}

std::int32_t FrozenScore::vnode_of(std::int32_t node, const TaskModel& model, const SearchTree& tree) {
  // Walk the argmin chain to its end or to a known node, then create vnodes
  // back to front so successors get lower ids.
  std::vector<std::int32_t> chain;
  std::int32_t next = -1;
  for (std::int32_t u = node;;) {
    if (auto it = vnode_cache_.find(u); it != vnode_cache_.end()) {
      next = it->second;
      break;
    }
    chain.push_back(u);
    const std::int32_t be = tree.best_edge[u];
    if (be < 0) break;
    const std::int32_t child = tree.nodes[u].edges[be].child;
    if (child < 0) break;
    u = child;
  }
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const std::int32_t u = *it;
    VNode vn;
    const std::int32_t be = tree.best_edge[u];
    if (tree.nodes[u].x.v == tree.terminal) {
      vn.constant = 0.0;
    } else if (be < 0) {
      vn.constant = tree.value[u];
    } else {
      vn.cost = edge_expr(u, static_cast<std::size_t>(be), model, tree);
      vn.next = tree.nodes[u].edges[be].child < 0 ? -1 : next;
    }
    vnodes_.push_back(vn);
    next = static_cast<std::int32_t>(vnodes_.size() - 1);
    vnode_cache_.emplace(u, next);
  }
  return next;
}

FrozenScore::FrozenScore(const Demonstration& demo, const TaskModel& model, const SearchTree& tree,
                         const Alignment& alignment, const ScoreConfig& cfg)
    : lambda_(cfg.lambda), alpha_(cfg.alpha), boundary_(cfg.boundary_terms) {
  if (alignment.empty()) throw std::invalid_argument("cannot freeze an empty alignment");
  const std::size_t n = demo.states.size();

  // Transition terms of the alignment.
  Expr direct;
  direct.begin = static_cast<std::uint32_t>(terms_.size());
  for (const auto& t : alignment.transitions) {
    add_transition_terms(terms_, state_id(demo.states[t.index], model.world()), t.from, t.to, model, 1.0);
  }
  direct.end = static_cast<std::uint32_t>(terms_.size());
  exprs_.push_back(direct);
  direct_ = 0;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const AugmentedState x{demo.states[i], alignment.node_at[i]};
    const auto node = tree.find(x);
    if (!node) throw std::out_of_range("aligned state missing from the search tree");
    const auto& edges = tree.nodes[*node].edges;
    Site site;
    site.taken = edges.size();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].action == AugmentedAction::step(demo.actions[i])) site.taken = e;
      SiteEdge se;
      se.cost = edge_expr(*node, e, model, tree);
      se.vnode = edges[e].child < 0 ? -1 : vnode_of(edges[e].child, model, tree);
      site.edges.push_back(se);
    }
    if (site.taken == edges.size()) throw std::out_of_range("demo action missing from the search tree");
    sites_.push_back(std::move(site));
  }
  state_lookup_.clear();
  vnode_cache_.clear();
}

void FrozenScore::eval_terms(const Theta& theta, std::vector<double>& expr_values) const {
  expr_values.resize(exprs_.size());
  for (std::size_t x = 0; x < exprs_.size(); ++x) {
    const Expr& ex = exprs_[x];
    double v = ex.constant;
    for (std::uint32_t t = ex.begin; t < ex.end; ++t) {
      const Term& term = terms_[t];
      v += term.coef * log_sigmoid(theta.logit_sparse(term.subgoal, term.head, states_[term.state]));
    }
    expr_values[x] = v;
  }
}

double FrozenScore::value(const Theta& theta) const {
  std::vector<double> g;
  return accumulate_gradient(theta, 0.0, g);
}

double FrozenScore::accumulate_gradient(const Theta& theta, double weight, std::vector<double>& grad) const {
  std::vector<double> ev;
  eval_terms(theta, ev);
  std::vector<double> vv(vnodes_.size());
  for (std::size_t u = 0; u < vnodes_.size(); ++u) {
    const VNode& vn = vnodes_[u];
    vv[u] = vn.cost < 0 ? vn.constant : ev[vn.cost] + (vn.next < 0 ? 0.0 : vv[vn.next]);
  }

  double total = ev[direct_];
  const bool want_grad = weight != 0.0;
  std::vector<double> adj_expr(want_grad ? exprs_.size() : 0, 0.0);
  std::vector<double> adj_v(want_grad ? vnodes_.size() : 0, 0.0);
  if (want_grad) adj_expr[direct_] = weight;

  std::vector<double> z;
  for (const Site& site : sites_) {
    z.resize(site.edges.size());
    for (std::size_t e = 0; e < site.edges.size(); ++e) {
      const SiteEdge& se = site.edges[e];
      z[e] = -alpha_ * (ev[se.cost] + (se.vnode < 0 ? 0.0 : vv[se.vnode]));
    }
    const double lse = log_sum_exp(z);
    total += z[site.taken] - lse;
    if (!want_grad) continue;
    for (std::size_t e = 0; e < site.edges.size(); ++e) {
      const double p = std::exp(z[e] - lse);
      const double d = weight * -alpha_ * ((e == site.taken ? 1.0 : 0.0) - p);
      adj_expr[site.edges[e].cost] += d;
      if (site.edges[e].vnode >= 0) adj_v[site.edges[e].vnode] += d;
    }
  }
  if (!want_grad) return total;

  for (std::size_t u = vnodes_.size(); u-- > 0;) {
    const VNode& vn = vnodes_[u];
    if (vn.cost < 0 || adj_v[u] == 0.0) continue;
    adj_expr[vn.cost] += adj_v[u];
    if (vn.next >= 0) adj_v[vn.next] += adj_v[u];
  }

  const std::size_t bs = theta.block_size();
  for (std::size_t x = 0; x < exprs_.size(); ++x) {
    if (adj_expr[x] == 0.0) continue;
    const Expr& ex = exprs_[x];
    for (std::uint32_t t = ex.begin; t < ex.end; ++t) {
      const Term& term = terms_[t];
      const auto& active = states_[term.state];
      const double zt = theta.logit_sparse(term.subgoal, term.head, active);
      const double d = adj_expr[x] * term.coef * sigmoid(-zt);
      const std::size_t off = theta.offset(term.subgoal, term.head);
      for (std::uint16_t f : active) grad[off + f] += d;
      grad[off + bs - 1] += d;
    }
  }
  return total;
}

double log_softmax_first(const std::vector<double>& scores, double beta) {
  std::vector<double> z(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) z[i] = beta * scores[i];
  return z[0] - log_sum_exp(z);
}

double contrastive_loss(const std::vector<FrozenSample>& batch, const Theta& theta, const LossConfig& cfg,
                        std::vector<double>* grad) {
  if (grad) grad->assign(theta.params().size(), 0.0);
  if (batch.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> s, w;
  for (const auto& sample : batch) {
    const auto& fs = sample.scores;
    s.resize(fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j) s[j] = fs[j].value(theta);
    loss -= scale * (s[0] + cfg.gamma * log_softmax_first(s, cfg.beta));
    if (!grad) continue;
    std::vector<double> z(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) z[j] = cfg.beta * s[j];
    const double lse = log_sum_exp(z);
    for (std::size_t j = 0; j < fs.size(); ++j) {
      const double p = std::exp(z[j] - lse);
      // d(score_0 + gamma * log softmax_0) / d score_j
      const double d = (j == 0 ? 1.0 : 0.0) + cfg.gamma * cfg.beta * ((j == 0 ? 1.0 : 0.0) - p);
      fs[j].accumulate_gradient(theta, -scale * d, *grad);
    }
  }
  return loss;
}

}  // namespace rsg
