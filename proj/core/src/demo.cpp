#include "rsg/demo.hpp"

#include <random>

#include "rsg/classifier.hpp"
#include "rsg/fsm.hpp"
#include "rsg/planner.hpp"
#include "rsg/product.hpp"

namespace rsg {

void check_replay(const Demonstration& d, const WorldConfig& cfg) {
  if (d.states.empty()) throw std::invalid_argument("demonstration has no states");
  if (d.actions.size() + 1 != d.states.size()) throw std::invalid_argument("demonstration needs one action per step");
  for (std::size_t i = 0; i < d.actions.size(); ++i) {
    if (!(transition(d.states[i], d.actions[i], cfg) == d.states[i + 1])) {
      throw std::invalid_argument("demonstration does not replay at step " + std::to_string(i));
    }
  }
}

Demonstration demo_from_state(const WorldConfig& cfg, const TaskAst& task, const GridState& s0, std::uint64_t seed,
                              const DemoOptions& opts) {
  const Fsm fsm = compile(task);
  const OracleClassifier oracle(cfg, 0.0);
  const TaskModel model(cfg, fsm, oracle, CostOptions{1.0, true});
  PlannerConfig pc;
  pc.node_budget = opts.node_budget;
  pc.seed = seed;
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::bernoulli_distribution flip(opts.noise);

  std::optional<Plan> current = plan(model, pc, AugmentedState{s0, fsm.start()}).plan;
  if (!current) throw DemoGenerationError("no plan for '" + unparse(task) + "' from this start state");

  Demonstration demo;
  demo.task = task;
  demo.states.push_back(s0);
  std::size_t pos = 0;  // index into current->actions
  while (pos < current->actions.size()) {
    const AugmentedAction& step = current->actions[pos];
    if (!step.is_primitive()) {
      ++pos;
      continue;
    }
    if (demo.actions.size() >= opts.max_steps) throw DemoGenerationError("demonstration exceeds the step limit");
    const AugmentedState x = current->states[pos];
    if (opts.noise > 0 && flip(rng)) {
      double remaining = 0.0;
      for (std::size_t j = pos; j < current->step_costs.size(); ++j) remaining += current->step_costs[j];
      std::vector<std::pair<Action, Plan>> options;
      for (Action a : kAllActions) {
        if (a == step.primitive) continue;
        // Cost-to-go after a is 0.1 more than the replanned cost from T(s, a).
        auto p = plan(model, pc, AugmentedState{transition(x.s, a, cfg), x.v}).plan;
        if (p && kStepCost + p->cost <= remaining + 1e-9) options.emplace_back(a, std::move(*p));
      }
      if (!options.empty()) {
        auto& [a, p] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        demo.actions.push_back(a);
        demo.states.push_back(p.states.front().s);
        current = std::move(p);
        pos = 0;
        continue;
      }
    }
    demo.actions.push_back(step.primitive);
    demo.states.push_back(current->states[pos + 1].s);
    ++pos;
  }

  const auto tests = oracle_tests(cfg);
  if (!satisfies(std::span<const GridState>(demo.states), task, tests)) {
    throw DemoGenerationError("generated trajectory does not satisfy '" + unparse(task) + "'");
  }
  return demo;
}

Demonstration generate_demo(const WorldConfig& cfg, const Scenario& sc, std::uint64_t seed, const DemoOptions& opts) {
  std::string last_error;
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(attempt));
    const GridState s0 = sample_state(cfg, sc, rng);
    try {
      return demo_from_state(cfg, sc.task, s0, rng(), opts);
    } catch (const DemoGenerationError& e) {
      last_error = e.what();
    }
  }
  throw DemoGenerationError("gave up on '" + unparse(sc.task) + "' after " + std::to_string(opts.max_attempts) +
                            " attempts: " + last_error);
}

}  // namespace rsg
