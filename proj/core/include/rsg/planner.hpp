#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsg/product.hpp"

namespace rsg {

struct PlannerConfig {
  double lambda = 1.0;
  bool boundary_terms = true;
  // Two-stage tree expansion: complete breadth-first to depth b, then up to
  // c more layers keeping the k cheapest nodes per (FSM node, layer).
  // k = 0 keeps everything.
  int b = 3;
  int c = 15;
  std::size_t k = 10;
  std::size_t node_budget = 5000;  // expansions per FSM node; 0 = unlimited
  std::size_t global_budget = 0;   // total expansions; 0 = unlimited
  bool stop_at_first = false;      // return the first plan reaching vT
  std::uint64_t seed = 0;          // FSM-node sampling

  CostOptions cost_options() const { return {lambda, boundary_terms}; }
};

struct Plan {
  std::vector<AugmentedState> states;  // states.size() == actions.size() + 1
  std::vector<AugmentedAction> actions;
  std::vector<double> step_costs;
  double cost = 0.0;

  // Environment states visited: the start plus one per primitive action.
  std::vector<GridState> env_states() const;
  std::vector<Action> primitive_actions() const;
};

enum class PlanStatus {
  kOptimal,      // every open node costs at least the returned plan
  kFirstFound,   // stop_at_first hit
  kBudget,       // a budget stopped the search; the plan may be suboptimal or missing
  kNoPlan,       // the reachable product space holds no plan
};

std::string_view plan_status_name(PlanStatus s);

struct PlanResult {
  std::optional<Plan> plan;
  std::size_t expanded = 0;
  PlanStatus status = PlanStatus::kNoPlan;
  bool success() const { return plan.has_value(); }
};

// Best-first search over the FSM-augmented process. Each step samples an FSM
// node uniformly among those with open nodes cheaper than the incumbent and
// expands that node's cheapest open state.
PlanResult plan(const TaskModel& model, const PlannerConfig& config, const AugmentedState& start);
PlanResult plan(const TaskModel& model, const PlannerConfig& config, const GridState& s0);

// One line per action: state summary, action, cumulative cost.
std::string format_plan(const Plan& p, const TaskModel& model);

}  // namespace rsg
