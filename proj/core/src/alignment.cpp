#include "rsg/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::int64_t kStay = -1;
}  // namespace

PlannerConfig ScoreConfig::tree_config() const {
  PlannerConfig pc;
  pc.lambda = lambda;
  pc.boundary_terms = boundary_terms;
  pc.b = tree_b;
  pc.c = tree_c;
  pc.k = tree_k;
  return pc;
}

ScoreTables::ScoreTables(std::size_t n_states, std::size_t nodes)
    : n(n_states),
      fsm_size(nodes),
      log_rat((n_states > 0 ? n_states - 1 : 0) * nodes, 0.0),
      log_g(n_states * nodes, 0.0),
      log_i(n_states * nodes, 0.0) {}

std::vector<FsmNodeId> Alignment::path() const {
  std::vector<FsmNodeId> out;
  if (transitions.empty()) return out;
  out.push_back(transitions.front().from);
  for (const auto& t : transitions) out.push_back(t.to);
  return out;
}

ScoreResult score_tables(const Fsm& fsm, const ScoreTables& t, double lambda, bool boundary_terms) {
  const std::size_t n = t.n;
  const std::size_t m = fsm.size();
  if (n == 0) throw std::invalid_argument("score needs at least one state");
  const FsmNodeId v0 = fsm.start();
  const FsmNodeId vt = fsm.terminal();
  std::vector<double> f(n * m, kNegInf);
  std::vector<std::int64_t> choice(n * m, kStay);
  auto order = topological_order(fsm);
  std::reverse(order.begin(), order.end());

  for (std::size_t ii = n; ii-- > 0;) {
    for (FsmNodeId v : order) {
      if (fsm.is_super(v)) continue;
      double best = kNegInf;
      std::int64_t arg = -2;
      if (ii + 1 < n) {
        const double stay = t.rat(ii, v) + f[(ii + 1) * m + v];
        if (stay > best) {
          best = stay;
          arg = kStay;
        }
      }
      for (FsmNodeId w : fsm.successors(v)) {
        double cand;
        if (w == vt) {
          if (ii + 1 != n) continue;
          cand = boundary_terms ? lambda * t.g(ii, v) : 0.0;
        } else {
          cand = lambda * (t.g(ii, v) + t.inv(ii, w)) + f[ii * m + w];
        }
        if (cand > best) {
          best = cand;
          arg = w;
        }
      }
      f[ii * m + v] = best;
      choice[ii * m + v] = arg;
    }
  }

  ScoreResult r;
  r.score = kNegInf;
  FsmNodeId first = v0;
  for (FsmNodeId w : fsm.successors(v0)) {
    if (w == vt) continue;
    const double cand = (boundary_terms ? lambda * t.inv(0, w) : 0.0) + f[w];
    if (cand > r.score) {
      r.score = cand;
      first = w;
    }
  }
  if (!(r.score > kNegInf)) return r;

  Alignment& a = r.alignment;
  a.node_at.assign(n, v0);
  a.transitions.push_back({0, v0, first});
  std::size_t i = 0;
  FsmNodeId v = first;
  while (true) {
    const std::int64_t c = choice[i * m + v];
    if (c == kStay) {
      a.node_at[i] = v;
      ++i;
      continue;
    }
    const auto w = static_cast<FsmNodeId>(c);
    a.transitions.push_back({i, v, w});
    if (w == vt) {
      a.node_at[i] = v;
      break;
    }
    v = w;
  }
  return r;
}

SearchTree rationality_tree(const Demonstration& demo, const TaskModel& model, const ScoreConfig& cfg) {
  const Fsm& fsm = model.fsm();
  std::vector<AugmentedState> roots;
  for (std::size_t i = 0; i + 1 < demo.states.size(); ++i) {
    for (FsmNodeId v = 0; v < fsm.size(); ++v) {
      if (!fsm.is_super(v)) roots.push_back({demo.states[i], v});
    }
  }
  const PlannerConfig pc = cfg.tree_config();
  SearchTree tree = build_search_tree(model, pc, roots);
  value_iteration(tree);
  return tree;
}

ScoreTables make_tables(const Demonstration& demo, const TaskModel& model, const SearchTree& tree, double alpha) {
  const Fsm& fsm = model.fsm();
  const std::size_t n = demo.states.size();
  ScoreTables t(n, fsm.size());
  GoalScores sc;
  for (std::size_t i = 0; i < n; ++i) {
    model.classifier().evaluate(demo.states[i], sc);
    for (FsmNodeId v = 0; v < fsm.size(); ++v) {
      if (fsm.is_super(v)) continue;
      const int k = model.subgoal_of(v);
      t.g(i, v) = sc.log_g[k];
      t.inv(i, v) = sc.log_i[k];
      if (i + 1 < n) t.rat(i, v) = log_rationality(tree, {demo.states[i], v}, AugmentedAction::step(demo.actions[i]), alpha);
    }
  }
  return t;
}

ScoreResult score(const Demonstration& demo, const Fsm& fsm, const Classifier& classifier, const WorldConfig& world,
                  const ScoreConfig& cfg) {
  const TaskModel model(world, fsm, classifier, cfg.cost_options());
  const SearchTree tree = rationality_tree(demo, model, cfg);
  return score_tables(fsm, make_tables(demo, model, tree, cfg.alpha), cfg.lambda, cfg.boundary_terms);
}

Alignment segment(const Demonstration& demo, const Fsm& fsm, const Classifier& classifier, const WorldConfig& world,
                  const ScoreConfig& cfg) {
  return score(demo, fsm, classifier, world, cfg).alignment;
}

}  // namespace rsg
