#include "rsg/planner.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

namespace rsg {

std::string_view plan_status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::kOptimal: return "optimal";
    case PlanStatus::kFirstFound: return "first-found";
    case PlanStatus::kBudget: return "budget";
    case PlanStatus::kNoPlan: return "no-plan";
  }
  return "?";
}

std::vector<GridState> Plan::env_states() const {
  std::vector<GridState> out;
  if (states.empty()) return out;
  out.push_back(states.front().s);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].is_primitive()) out.push_back(states[i + 1].s);
  }
  return out;
}

std::vector<Action> Plan::primitive_actions() const {
  std::vector<Action> out;
  for (const auto& a : actions) {
    if (a.is_primitive()) out.push_back(a.primitive);
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  AugmentedState x;
  double g = kInf;
  std::int64_t parent = -1;
  AugmentedAction via;
  double step = 0.0;
  bool closed = false;
};

struct Entry {
  double g;
  std::uint64_t seq;
  std::size_t node;
  bool operator>(const Entry& o) const { return g != o.g ? g > o.g : seq > o.seq; }
};

using OpenQueue = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

class Search {
 public:
  Search(const TaskModel& model, const PlannerConfig& cfg) : model_(model), cfg_(cfg), open_(model.fsm().size()),
                                                             expanded_per_node_(model.fsm().size(), 0),
                                                             rng_(cfg.seed) {}

  PlanResult run(const AugmentedState& start) {
    const Fsm& fsm = model_.fsm();
    if (start.v >= fsm.size()) throw std::invalid_argument("start FSM node out of range");
    if (start.v == fsm.terminal()) {
      Plan p;
      p.states.push_back(start);
      return {p, 0, PlanStatus::kOptimal};
    }
    relax(start, 0.0, -1, AugmentedAction{}, 0.0);

    PlanStatus status = PlanStatus::kNoPlan;
    std::vector<FsmNodeId> candidates;
    while (true) {
      candidates.clear();
      bool budget_blocked = false;
      for (FsmNodeId v = 0; v < fsm.size(); ++v) {
        auto& q = open_[v];
        while (!q.empty() && stale(q.top())) q.pop();
        if (q.empty() || q.top().g >= best_) continue;
        if (cfg_.node_budget != 0 && expanded_per_node_[v] >= cfg_.node_budget) {
          budget_blocked = true;
          continue;
        }
        candidates.push_back(v);
      }
      if (candidates.empty()) {
        status = budget_blocked ? PlanStatus::kBudget : (best_node_ >= 0 ? PlanStatus::kOptimal : PlanStatus::kNoPlan);
        break;
      }
      if (cfg_.global_budget != 0 && expanded_ >= cfg_.global_budget) {
        status = PlanStatus::kBudget;
        break;
      }
      const FsmNodeId v = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
      const Entry e = open_[v].top();
      open_[v].pop();
      ++expanded_;
      ++expanded_per_node_[v];
      if (expand(e.node)) {
        status = PlanStatus::kFirstFound;
        break;
      }
    }

    PlanResult result;
    result.expanded = expanded_;
    result.status = status;
    if (best_node_ >= 0) result.plan = trace(static_cast<std::size_t>(best_node_));
    return result;
  }

 private:
  bool stale(const Entry& e) const { return nodes_[e.node].closed || e.g != nodes_[e.node].g; }

  const GoalScores& scores(const GridState& s) {
    auto it = score_cache_.find(s);
    if (it == score_cache_.end()) it = score_cache_.emplace(s, model_.classifier().evaluate(s)).first;
    return it->second;
  }

  // Returns the node index when the node was created or improved.
  std::int64_t relax(const AugmentedState& x, double g, std::int64_t parent, const AugmentedAction& via, double step) {
    auto [it, inserted] = index_.try_emplace(x, nodes_.size());
    if (inserted) {
      nodes_.push_back(Node{x, kInf, -1, via, 0.0, false});
    }
    const std::size_t id = it->second;
    Node& n = nodes_[id];
    if (!(g < n.g)) return -1;
    n.g = g;
    n.parent = parent;
    n.via = via;
    n.step = step;
    n.closed = false;
    if (x.v != model_.fsm().terminal()) open_[x.v].push(Entry{g, seq_++, id});
    return static_cast<std::int64_t>(id);
  }

  // Expands a node; true when stop_at_first ends the search.
  bool expand(std::size_t id) {
    nodes_[id].closed = true;
    const AugmentedState x = nodes_[id].x;
    const double g = nodes_[id].g;
    const Fsm& fsm = model_.fsm();
    if (!fsm.is_super(x.v)) {
      for (Action a : kAllActions) {
        const double c = step_cost(x.s, a);
        relax({transition(x.s, a, model_.world()), x.v}, g + c, static_cast<std::int64_t>(id), AugmentedAction::step(a), c);
      }
    }
    const GoalScores& sc = scores(x.s);
    for (FsmNodeId w : fsm.successors(x.v)) {
      const double c = model_.edge_cost(x.v, w, sc);
      if (!std::isfinite(c)) continue;
      const std::int64_t child = relax({x.s, w}, g + c, static_cast<std::int64_t>(id), AugmentedAction::move_to(w), c);
      if (w == fsm.terminal() && child >= 0 && g + c < best_) {
        best_ = g + c;
        best_node_ = child;
        if (cfg_.stop_at_first) return true;
      }
    }
    return false;
  }

  Plan trace(std::size_t id) const {
    std::vector<std::size_t> chain;
    for (std::int64_t n = static_cast<std::int64_t>(id); n >= 0; n = nodes_[n].parent) chain.push_back(n);
    std::reverse(chain.begin(), chain.end());
    Plan p;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const Node& n = nodes_[chain[i]];
      p.states.push_back(n.x);
      if (i > 0) {
        p.actions.push_back(n.via);
        p.step_costs.push_back(n.step);
        p.cost += n.step;
      }
    }
    return p;
  }

  const TaskModel& model_;
  const PlannerConfig& cfg_;
  std::vector<Node> nodes_;
  std::unordered_map<AugmentedState, std::size_t, AugmentedStateHash> index_;
  std::unordered_map<GridState, GoalScores, GridStateHash> score_cache_;
  std::vector<OpenQueue> open_;
  std::vector<std::size_t> expanded_per_node_;
  std::size_t expanded_ = 0;
  std::uint64_t seq_ = 0;
  double best_ = kInf;
  std::int64_t best_node_ = -1;
  std::mt19937_64 rng_;
};

}  // namespace

PlanResult plan(const TaskModel& model, const PlannerConfig& config, const AugmentedState& start) {
  return Search(model, config).run(start);
}

PlanResult plan(const TaskModel& model, const PlannerConfig& config, const GridState& s0) {
  return plan(model, config, AugmentedState{s0, model.fsm().start()});
}

std::string format_plan(const Plan& p, const TaskModel& model) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  double total = 0.0;
  for (std::size_t i = 0; i < p.actions.size(); ++i) {
    total += p.step_costs[i];
    const AugmentedState& x = p.states[i];
    out << describe(x.s, model.world()) << " node=" << x.v << "  " << to_string(p.actions[i], model.fsm())
        << "  cost=" << total << '\n';
  }
  return out.str();
}

}  // namespace rsg
