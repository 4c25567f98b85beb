// Shared fixtures and independent oracles for the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "rsg/alignment.hpp"
#include "rsg/classifier.hpp"
#include "rsg/crafting.hpp"
#include "rsg/demo.hpp"
#include "rsg/fsm.hpp"
#include "rsg/model.hpp"
#include "rsg/product.hpp"
#include "rsg/objective.hpp"
#include "rsg/search_tree.hpp"
#include "rsg/task.hpp"
#include "rsg/trainer.hpp"

namespace rsg::testing {

// ---------------------------------------------------------------------------
// Satisfaction by direct recursion over segments [i, j] of an abstract trace.

using Holds = std::function<bool(const SubgoalName&, std::size_t)>;

inline bool brute_sat(const TaskAst& t, std::size_t i, std::size_t j, const Holds& holds);

inline bool brute_chain(const std::vector<const TaskAst*>& parts, std::size_t k, std::size_t i, std::size_t j,
                        const Holds& holds) {
  if (k + 1 == parts.size()) return brute_sat(*parts[k], i, j, holds);
  for (std::size_t m = i + 1; m < j; ++m) {
    if (brute_sat(*parts[k], i, m, holds) && brute_chain(parts, k + 1, m, j, holds)) return true;
  }
  return false;
}

inline bool brute_sat(const TaskAst& t, std::size_t i, std::size_t j, const Holds& holds) {
  switch (t.kind) {
    case TaskKind::kAtom: return j > i && !holds(t.name, i) && holds(t.name, j);
    case TaskKind::kThen: {
      std::vector<const TaskAst*> parts;
      for (const auto& c : t.children) parts.push_back(&c);
      return brute_chain(parts, 0, i, j, holds);
    }
    case TaskKind::kOr:
      for (const auto& c : t.children) {
        if (brute_sat(c, i, j, holds)) return true;
      }
      return false;
    case TaskKind::kAnd: {
      std::vector<std::size_t> perm(t.children.size());
      for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
      do {
        std::vector<const TaskAst*> parts;
        for (auto k : perm) parts.push_back(&t.children[k]);
        if (brute_chain(parts, 0, i, j, holds)) return true;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return false;
    }
  }
  return false;
}

// A trace where truth[i] lists the subgoals holding at state i.
inline bool brute_satisfies(const std::vector<std::set<SubgoalName>>& truth, const TaskAst& t) {
  if (truth.size() < 2) return false;
  return brute_sat(t, 0, truth.size() - 1,
                   [&](const SubgoalName& o, std::size_t i) { return truth[i].count(o) > 0; });
}

// ---------------------------------------------------------------------------
// Random ASTs over a vocabulary, distinct atoms.

inline TaskAst random_task(const std::vector<SubgoalName>& vocab, std::size_t max_atoms, std::mt19937_64& rng) {
  std::vector<SubgoalName> pool = vocab;
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, std::min(max_atoms, pool.size()))(rng);
  pool.resize(n);
  std::function<TaskAst(std::vector<SubgoalName>)> build = [&](std::vector<SubgoalName> atoms) -> TaskAst {
    if (atoms.size() == 1) return TaskAst::atom(atoms[0]);
    const std::size_t parts = std::uniform_int_distribution<std::size_t>(2, atoms.size())(rng);
    std::vector<std::vector<SubgoalName>> groups(parts);
    for (std::size_t k = 0; k < atoms.size(); ++k) groups[k < parts ? k : rng() % parts].push_back(atoms[k]);
    std::vector<TaskAst> kids;
    for (auto& g : groups) kids.push_back(build(g));
    switch (rng() % 3) {
      case 0: return TaskAst::then(std::move(kids));
      case 1: return TaskAst::any(std::move(kids));
      default: return TaskAst::all(std::move(kids));
    }
  };
  return build(pool);
}

// ---------------------------------------------------------------------------
// Worlds.

inline void place(GridState& s, const WorldConfig& cfg, std::string_view type, int x, int y, std::uint8_t state = 0) {
  s.objects.push_back({static_cast<std::uint16_t>(cfg.object_type_id(type)), static_cast<std::int16_t>(x),
                       static_cast<std::int16_t>(y), state});
  s.normalize();
}

inline void give(GridState& s, const WorldConfig& cfg, std::string_view item, int count = 1) {
  s.inventory[cfg.item_id(item)] = static_cast<std::uint8_t>(s.inventory[cfg.item_id(item)] + count);
}

inline WorldConfig sized_world(int w, int h) {
  WorldConfig cfg = default_world();
  cfg.width = w;
  cfg.height = h;
  return cfg;
}

// A map with a few of the catalog objects on free cells.
inline GridState random_state(const WorldConfig& cfg, std::mt19937_64& rng, const std::vector<std::string>& types) {
  GridState s = cfg.empty_state();
  std::vector<Pos> cells;
  for (int y = 0; y < cfg.height; ++y) {
    for (int x = 0; x < cfg.width; ++x) cells.push_back({x, y});
  }
  std::shuffle(cells.begin(), cells.end(), rng);
  std::size_t next = 0;
  s.agent = cells[next++];
  for (const auto& t : types) {
    const Pos p = cells[next++];
    place(s, cfg, t, p.x, p.y);
  }
  return s;
}

// Theta with weights and biases drawn uniformly from [-scale, scale].
inline Theta random_theta(const WorldConfig& cfg, std::mt19937_64& rng, double scale = 1.0) {
  Theta th = Theta::zeros_for(cfg);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& p : th.params()) p = u(rng);
  return th;
}

// ---------------------------------------------------------------------------
// Product-graph Dijkstra with edge costs computed from the classifier heads
// directly, independent of TaskModel.

inline double oracle_edge_cost(const Fsm& fsm, const Classifier& clf, const GridState& s, FsmNodeId v, FsmNodeId w,
                               double lambda, bool boundary) {
  const GoalScores sc = clf.evaluate(s);
  double c = 0.0;
  if (!fsm.is_super(v)) {
    if (w != fsm.terminal() || boundary) c -= lambda * sc.log_g[clf.index_of(fsm.label(v))];
  }
  if (!fsm.is_super(w)) {
    if (v != fsm.start() || boundary) c -= lambda * sc.log_i[clf.index_of(fsm.label(w))];
  }
  return c;
}

inline double dijkstra_product(const WorldConfig& cfg, const Fsm& fsm, const Classifier& clf, const GridState& s0,
                               double lambda = 1.0, bool boundary = true) {
  using Key = std::pair<double, std::size_t>;
  std::vector<AugmentedState> states;
  std::unordered_map<AugmentedState, std::size_t, AugmentedStateHash> id;
  std::vector<double> dist;
  auto get = [&](const AugmentedState& x) {
    auto [it, ins] = id.try_emplace(x, states.size());
    if (ins) {
      states.push_back(x);
      dist.push_back(INFINITY);
    }
    return it->second;
  };
  std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
  const std::size_t start = get({s0, fsm.start()});
  dist[start] = 0.0;
  pq.emplace(0.0, start);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    const AugmentedState x = states[u];
    if (x.v == fsm.terminal()) return d;
    auto relax = [&](const AugmentedState& y, double c) {
      if (!std::isfinite(c)) return;
      const std::size_t k = get(y);
      if (d + c < dist[k]) {
        dist[k] = d + c;
        pq.emplace(dist[k], k);
      }
    };
    for (FsmNodeId w : fsm.successors(x.v)) relax({x.s, w}, oracle_edge_cost(fsm, clf, x.s, x.v, w, lambda, boundary));
    if (!fsm.is_super(x.v)) {
      for (Action a : kAllActions) relax({transition(x.s, a, cfg), x.v}, 0.1);
    }
  }
  return INFINITY;
}

// ---------------------------------------------------------------------------
// Brute-force alignment: every v0 -> vT path and every placement of its
// inner transitions on state indices 0 <= t_1 <= ... <= t_{m-1} <= n-1.

inline double brute_score(const Fsm& fsm, const ScoreTables& t, double lambda, bool boundary) {
  const std::size_t n = t.n;
  double best = -INFINITY;
  std::vector<FsmNodeId> path;
  std::function<void(FsmNodeId)> walk = [&](FsmNodeId v) {
    if (v == fsm.terminal()) {
      const std::size_t m = path.size();
      std::vector<std::size_t> cut(m + 1, 0);
      cut[m] = n - 1;
      std::function<void(std::size_t)> place = [&](std::size_t k) {
        if (k == m) {
          double s = boundary ? lambda * (t.inv(0, path[0]) + t.g(n - 1, path[m - 1])) : 0.0;
          for (std::size_t q = 0; q < m; ++q) {
            for (std::size_t i = cut[q]; i < cut[q + 1]; ++i) s += t.rat(i, path[q]);
            if (q + 1 < m) s += lambda * (t.g(cut[q + 1], path[q]) + t.inv(cut[q + 1], path[q + 1]));
          }
          best = std::max(best, s);
          return;
        }
        for (std::size_t c = cut[k - 1]; c <= n - 1; ++c) {
          cut[k] = c;
          place(k + 1);
        }
      };
      place(1);
      return;
    }
    for (FsmNodeId w : fsm.successors(v)) {
      if (w != fsm.terminal()) path.push_back(w);
      walk(w);
      if (w != fsm.terminal()) path.pop_back();
    }
  };
  walk(fsm.start());
  return best;
}

// Score of an alignment recomputed from its steps.
inline double alignment_score(const Fsm& fsm, const ScoreTables& t, const Alignment& a, double lambda, bool boundary) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < t.n; ++i) s += t.rat(i, a.node_at[i]);
  for (const auto& st : a.transitions) {
    if (st.from == fsm.start()) s += boundary ? lambda * t.inv(st.index, st.to) : 0.0;
    else if (st.to == fsm.terminal()) s += boundary ? lambda * t.g(st.index, st.from) : 0.0;
    else s += lambda * (t.g(st.index, st.from) + t.inv(st.index, st.to));
  }
  return s;
}

inline ScoreTables random_tables(std::size_t n, const Fsm& fsm, std::mt19937_64& rng) {
  ScoreTables t(n, fsm.size());
  std::uniform_real_distribution<double> u(-3.0, 0.0);
  for (auto& x : t.log_rat) x = u(rng);
  for (auto& x : t.log_g) x = u(rng);
  for (auto& x : t.log_i) x = u(rng);
  return t;
}

inline Demonstration random_walk(const WorldConfig& cfg, std::mt19937_64& rng, std::size_t steps, const TaskAst& task) {
  Demonstration d;
  d.task = task;
  d.states.push_back(random_state(cfg, rng, {"axe", "tree", "workbench", "pickaxe"}));
  for (std::size_t i = 0; i < steps; ++i) {
    d.actions.push_back(kAllActions[rng() % 5]);
    d.states.push_back(transition(d.states.back(), d.actions.back(), cfg));
  }
  return d;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

inline std::vector<double> fd_gradient(const std::function<double(const Theta&)>& f, Theta theta, double h = 1e-6) {
  std::vector<double> g(theta.params().size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double keep = theta.params()[j];
    theta.params()[j] = keep + h;
    const double up = f(theta);
    theta.params()[j] = keep - h;
    const double down = f(theta);
    theta.params()[j] = keep;
    g[j] = (up - down) / (2 * h);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Scores and losses on small random instances.

// Tables rebuilt through the public rationality API and the classifier.
inline ScoreTables tables_via_api(const Demonstration& d, const TaskModel& model, const SearchTree& tree, double alpha) {
  const Fsm& f = model.fsm();
  ScoreTables t(d.states.size(), f.size());
  for (std::size_t i = 0; i < d.states.size(); ++i) {
    const GoalScores sc = model.classifier().evaluate(d.states[i]);
    for (FsmNodeId v = 1; v + 1 < f.size(); ++v) {
      const std::size_t k = model.classifier().index_of(f.label(v));
      t.g(i, v) = sc.log_g[k];
      t.inv(i, v) = sc.log_i[k];
      if (i + 1 < d.states.size()) {
        t.rat(i, v) = std::log(rationality(tree, {d.states[i], v}, AugmentedAction::step(d.actions[i]), alpha));
      }
    }
  }
  return t;
}

struct Fixture {
  WorldConfig cfg;
  std::vector<Demonstration> demos;
  std::vector<TaskAst> tasks;
  Theta theta;
};

// A world where only two subgoals are used.
inline Fixture two_subgoal_fixture(std::mt19937_64& rng, WorldConfig cfg = sized_world(5, 5)) {
  Fixture fx;
  fx.cfg = std::move(cfg);
  fx.theta = random_theta(fx.cfg, rng, 0.5);
  const std::vector<TaskAst> pool = {parse_task("grab-axe"), parse_task("grab-pickaxe"),
                                     parse_task("grab-axe then grab-pickaxe"), parse_task("grab-pickaxe then grab-axe"),
                                     parse_task("grab-axe or grab-pickaxe"), parse_task("grab-axe and grab-pickaxe")};
  for (int k = 0; k < 3; ++k) {
    const TaskAst t = pool[rng() % pool.size()];
    fx.demos.push_back(random_walk(fx.cfg, rng, 3 + rng() % 5, t));
    fx.tasks.push_back(t);
  }
  return fx;
}

inline std::vector<FrozenSample> frozen_batch(const Fixture& fx, const ScoreConfig& sc, std::mt19937_64& rng) {
  const auto pool = enumerate_tasks({"grab-axe", "grab-pickaxe"}, 2);
  std::vector<FrozenSample> batch;
  for (std::size_t k = 0; k < fx.demos.size(); ++k) {
    FrozenSample s;
    auto st = score_task(fx.demos[k], fx.tasks[k], fx.cfg, fx.theta, sc);
    if (!st.frozen) continue;
    s.scores.push_back(*st.frozen);
    for (const auto& neg : sample_negatives(fx.tasks[k], pool, 3, rng)) {
      auto sn = score_task(fx.demos[k], neg, fx.cfg, fx.theta, sc);
      if (sn.frozen) s.scores.push_back(*sn.frozen);
    }
    batch.push_back(std::move(s));
  }
  return batch;
}

}  // namespace rsg::testing
