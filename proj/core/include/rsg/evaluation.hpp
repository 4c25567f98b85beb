#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsg/classifier.hpp"
#include "rsg/goal_search.hpp"
#include "rsg/planner.hpp"
#include "rsg/scenario.hpp"

namespace rsg {

struct TaskEval {
  std::string task;
  std::size_t runs = 0;
  std::size_t successes = 0;  // plan found and its trajectory satisfies the task under the oracle
  double mean_cost = 0.0;     // over successful runs
  double mean_expanded = 0.0; // over all runs
  double wall_time = 0.0;     // seconds, summed over runs
  double success_rate() const { return runs == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(runs); }
};

struct EvalReport {
  std::vector<TaskEval> tasks;  // in scenario order
  std::size_t runs() const;
  std::size_t successes() const;
  double success_rate() const;
};

struct EvalOptions {
  PlannerConfig planner;
  std::vector<std::uint64_t> seeds;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Start state for (scenario, seed); shared by every harness so runs line up.
GridState eval_start_state(const WorldConfig& world, const Scenario& sc, std::uint64_t seed);

// Plans every scenario from the start state of every seed.
EvalReport evaluate(const WorldConfig& world, const Classifier& classifier, const std::vector<Scenario>& scenarios,
                    const EvalOptions& opts);

// Goal-only search from the start states of `sc`: expansions spent per seed,
// with kNever-style SIZE_MAX for runs that did not reach the oracle goal.
std::vector<std::size_t> goal_search_trials(const SubgoalName& goal, const WorldConfig& world,
                                            const Classifier& classifier, const DependencyMatrix& d,
                                            const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                                            const GoalSearchConfig& cfg, unsigned threads = 0);

// Smallest expansion count n such that at least `rate` of the trials
// succeeded within n expansions; SIZE_MAX if the rate is never reached.
std::size_t expansions_at_success_rate(std::vector<std::size_t> trials, double rate);

void write_report(std::ostream& out, const EvalReport& r);
void write_report_csv(std::ostream& out, const EvalReport& r);

}  // namespace rsg
