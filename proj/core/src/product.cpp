#include "rsg/product.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsg {

std::string to_string(const AugmentedAction& a, const Fsm& fsm) {
  if (a.is_primitive()) return std::string(action_name(a.primitive));
  if (a.to == fsm.terminal()) return "-> vT";
  return "-> n" + std::to_string(a.to) + "[" + fsm.label(a.to) + "]";
}

TaskModel::TaskModel(const WorldConfig& world, const Fsm& fsm, const Classifier& classifier, CostOptions options)
    : world_(world), fsm_(fsm), classifier_(classifier), options_(options), node_subgoal_(fsm.size(), -1) {
  for (FsmNodeId v = 0; v < fsm.size(); ++v) {
    if (!fsm.is_super(v)) node_subgoal_[v] = static_cast<int>(classifier.index_of(fsm.label(v)));
  }
}

double TaskModel::edge_cost(FsmNodeId v, FsmNodeId w, const GoalScores& at_s) const {
  const bool from_start = v == fsm_.start();
  const bool to_end = w == fsm_.terminal();
  if (!options_.boundary_terms && (from_start || to_end)) return 0.0;
  double log_term = 0.0;
  if (!from_start) log_term += at_s.log_g[node_subgoal_[v]];
  if (!to_end) log_term += at_s.log_i[node_subgoal_[w]];
  const double cost = -options_.lambda * log_term;
  if (!std::isfinite(cost)) return std::numeric_limits<double>::infinity();
  return cost;
}

AugmentedState augmented_transition(const AugmentedState& x, const AugmentedAction& a, const WorldConfig& world,
                                    const Fsm& fsm) {
  if (a.is_primitive()) {
    if (fsm.is_super(x.v)) throw std::invalid_argument("primitive action at a super node");
    return {transition(x.s, a.primitive, world), x.v};
  }
  if (!fsm.has_edge(x.v, a.to)) {
    throw std::invalid_argument("no FSM edge from node " + std::to_string(x.v) + " to " + std::to_string(a.to));
  }
  return {x.s, a.to};
}

double augmented_cost(const AugmentedState& x, const AugmentedAction& a, const TaskModel& model) {
  if (a.is_primitive()) return step_cost(x.s, a.primitive);
  return model.edge_cost(x.v, a.to, model.classifier().evaluate(x.s));
}

}  // namespace rsg
