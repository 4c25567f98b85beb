#pragma once

#include <string>
#include <vector>

#include "rsg/classifier.hpp"
#include "rsg/crafting.hpp"
#include "rsg/fsm.hpp"

namespace rsg {

struct AugmentedState {
  GridState s;
  FsmNodeId v = 0;
  friend bool operator==(const AugmentedState&, const AugmentedState&) = default;
};

struct AugmentedStateHash {
  std::size_t operator()(const AugmentedState& x) const noexcept {
    return GridStateHash{}(x.s) * 0x9e3779b97f4a7c15ULL + x.v;
  }
};

struct AugmentedAction {
  enum class Kind : std::uint8_t { kPrimitive, kTransition };
  Kind kind = Kind::kPrimitive;
  Action primitive = Action::kUp;
  FsmNodeId to = 0;  // transitions only

  static AugmentedAction step(Action a) { return {Kind::kPrimitive, a, 0}; }
  static AugmentedAction move_to(FsmNodeId v) { return {Kind::kTransition, Action::kUp, v}; }
  bool is_primitive() const { return kind == Kind::kPrimitive; }

  friend bool operator==(const AugmentedAction&, const AugmentedAction&) = default;
};

std::string to_string(const AugmentedAction& a, const Fsm& fsm);

struct CostOptions {
  double lambda = 1.0;
  // When false, edges leaving v0 and entering vT cost nothing.
  bool boundary_terms = true;
};

// Binds a task automaton to a classifier and a world. Holds references: all
// three must outlive the model.
class TaskModel {
 public:
  // Holds references: the world, FSM and classifier must outlive the model.
  TaskModel(const WorldConfig& world, const Fsm& fsm, const Classifier& classifier, CostOptions options = {});
  TaskModel(const WorldConfig&, Fsm&&, const Classifier&, CostOptions = {}) = delete;

  const WorldConfig& world() const { return world_; }
  const Fsm& fsm() const { return fsm_; }
  const Classifier& classifier() const { return classifier_; }
  const CostOptions& options() const { return options_; }

  int subgoal_of(FsmNodeId v) const { return node_subgoal_[v]; }  // -1 for super nodes

  // Cost of the FSM edge v -> w taken at a state with the given scores:
  // -lambda (log G_v + log I_w), with the v0 side dropping log G and the vT
  // side dropping log I. +inf when a term is log 0.
  double edge_cost(FsmNodeId v, FsmNodeId w, const GoalScores& at_s) const;

 private:
  const WorldConfig& world_;
  const Fsm& fsm_;
  const Classifier& classifier_;
  CostOptions options_;
  std::vector<int> node_subgoal_;
};

// Throws std::invalid_argument when a transition is not an edge out of x.v or
// a primitive is attempted at a super node.
AugmentedState augmented_transition(const AugmentedState& x, const AugmentedAction& a, const WorldConfig& world,
                                    const Fsm& fsm);

double augmented_cost(const AugmentedState& x, const AugmentedAction& a, const TaskModel& model);

}  // namespace rsg
