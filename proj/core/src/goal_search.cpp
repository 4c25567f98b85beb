#include "rsg/goal_search.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "rsg/fsm.hpp"
#include "rsg/product.hpp"

namespace rsg {

std::string format_instruction(const std::vector<SubgoalName>& instruction) {
  std::string out;
  for (std::size_t i = 0; i < instruction.size(); ++i) {
    if (i > 0) out += " then ";
    out += instruction[i];
  }
  return out;
}

namespace {

struct Candidate {
  double priority;
  std::vector<SubgoalName> instruction;
};

// Max-heap order: higher priority, then shorter, then lexicographically smaller.
struct Lower {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    if (a.instruction.size() != b.instruction.size()) return a.instruction.size() > b.instruction.size();
    return a.instruction > b.instruction;
  }
};

TaskAst chain(const std::vector<SubgoalName>& instruction) {
  if (instruction.size() == 1) return TaskAst::atom(instruction.front());
  std::vector<TaskAst> parts;
  for (const auto& o : instruction) parts.push_back(TaskAst::atom(o));
  return TaskAst::then(std::move(parts));
}

}  // namespace

GoalSearchResult plan_to_goal(const SubgoalName& goal, const WorldConfig& world, const Classifier& classifier,
                              const DependencyMatrix& d, const GridState& s0, const GoalSearchConfig& cfg) {
  classifier.index_of(goal);
  GoalSearchResult result;
  std::priority_queue<Candidate, std::vector<Candidate>, Lower> queue;
  std::set<std::vector<SubgoalName>> seen;
  const std::vector<SubgoalName> seed{goal};
  queue.push({priority(seed, d, cfg.length_bias), seed});
  seen.insert(seed);

  while (!queue.empty() && result.expanded < cfg.total_budget) {
    Candidate c = queue.top();
    queue.pop();

    const Fsm fsm = compile(chain(c.instruction));
    const TaskModel model(world, fsm, classifier, cfg.planner.cost_options());
    PlannerConfig pc = cfg.planner;
    const std::size_t left = cfg.total_budget - result.expanded;
    pc.node_budget = 0;
    pc.global_budget =
        cfg.mode == GoalSearchMode::kBlind ? left : std::min(cfg.attempt_budget * c.instruction.size(), left);
    const PlanResult r = plan(model, pc, s0);
    result.expanded += r.expanded;
    result.attempts.push_back({c.instruction, c.priority, r.expanded, r.success()});
    if (r.success()) {
      result.plan = r.plan;
      result.instruction = c.instruction;
      return result;
    }
    if (cfg.mode == GoalSearchMode::kBlind) break;
    if (c.instruction.size() >= cfg.length_limit) continue;

    for (const auto& o : d.names) {
      if (std::find(c.instruction.begin(), c.instruction.end(), o) != c.instruction.end()) continue;
      const bool needed = std::any_of(c.instruction.begin(), c.instruction.end(),
                                      [&](const SubgoalName& later) { return d.at(later, o) > 0; });
      if (!needed) continue;
      std::vector<SubgoalName> next{o};
      next.insert(next.end(), c.instruction.begin(), c.instruction.end());
      if (!seen.insert(next).second) continue;
      queue.push({priority(next, d, cfg.length_bias), std::move(next)});
    }
  }
  return result;
}

}  // namespace rsg
