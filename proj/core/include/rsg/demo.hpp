#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rsg/crafting.hpp"
#include "rsg/scenario.hpp"
#include "rsg/task.hpp"

namespace rsg {

struct Demonstration {
  std::vector<GridState> states;  // n states
  std::vector<Action> actions;    // n - 1 actions
  TaskAst task;
};

// Throws std::invalid_argument unless actions replay the states exactly.
void check_replay(const Demonstration& d, const WorldConfig& cfg);

class DemoGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DemoOptions {
  double noise = 0.05;          // chance per step of a random non-worsening action
  int max_attempts = 20;        // fresh start states tried before giving up
  std::size_t node_budget = 0;  // planner expansions per FSM node; 0 = unlimited
  std::size_t max_steps = 200;
};

// Plans with hard oracle classifiers from a sampled start state. Each step,
// with probability `noise`, the expert takes a random other action whose
// successor is no farther from completion, then replans. The result satisfies
// the task under the oracle predicates.
Demonstration generate_demo(const WorldConfig& cfg, const Scenario& sc, std::uint64_t seed,
                            const DemoOptions& opts = {});

// Same from a given start state; one attempt.
Demonstration demo_from_state(const WorldConfig& cfg, const TaskAst& task, const GridState& s0, std::uint64_t seed,
                              const DemoOptions& opts = {});

}  // namespace rsg
