#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rsg/classifier.hpp"
#include "rsg/dependency.hpp"
#include "rsg/planner.hpp"

namespace rsg {

enum class GoalSearchMode {
  kGuided,  // instructions grown from the dependency matrix
  kBlind,   // a single attempt on [goal] with the whole budget
};

struct GoalSearchConfig {
  PlannerConfig planner;               // node_budget and global_budget are overridden
  std::size_t total_budget = 25000;    // expansions across all attempts
  std::size_t attempt_budget = 1000;   // expansions per subgoal of an instruction
  std::size_t length_limit = 6;
  double length_bias = 0.9;
  GoalSearchMode mode = GoalSearchMode::kGuided;
};

struct GoalAttempt {
  std::vector<SubgoalName> instruction;
  double priority = 0.0;
  std::size_t expanded = 0;
  bool success = false;
};

struct GoalSearchResult {
  std::optional<Plan> plan;
  std::vector<SubgoalName> instruction;  // the one that produced the plan
  std::size_t expanded = 0;              // summed over attempts
  std::vector<GoalAttempt> attempts;
  bool success() const { return plan.has_value(); }
};

// Pops instructions (then-chains ending in `goal`) by priority, plans for each
// and returns the first plan found. A failed instruction t of length below
// the limit spawns [o] + t for every o not in t with d(o', o) > 0 for some o'
// in t. Equal priorities go to the shorter, then lexicographically smaller
// instruction.
GoalSearchResult plan_to_goal(const SubgoalName& goal, const WorldConfig& world, const Classifier& classifier,
                              const DependencyMatrix& d, const GridState& s0, const GoalSearchConfig& cfg);

std::string format_instruction(const std::vector<SubgoalName>& instruction);  // "a then b then c"

}  // namespace rsg
