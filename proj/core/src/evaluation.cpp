#include "rsg/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include "rsg/fsm.hpp"
#include "rsg/product.hpp"

namespace rsg {

std::size_t EvalReport::runs() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.runs;
  return n;
}

std::size_t EvalReport::successes() const {
  std::size_t n = 0;
  for (const auto& t : tasks) n += t.successes;
  return n;
}

double EvalReport::success_rate() const {
  return runs() == 0 ? 0.0 : static_cast<double>(successes()) / static_cast<double>(runs());
}

GridState eval_start_state(const WorldConfig& world, const Scenario& sc, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL);
  return sample_state(world, sc, rng);
}

namespace {

// Runs job(i) for i in [0, n) on a small pool; results are written by index
// so the reduction order never depends on scheduling.
template <class Job>
void parallel_for(std::size_t n, unsigned threads, Job job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct Run {
  bool success = false;
  double cost = 0.0;
  std::size_t expanded = 0;
  double seconds = 0.0;
};

}  // namespace

EvalReport evaluate(const WorldConfig& world, const Classifier& classifier, const std::vector<Scenario>& scenarios,
                    const EvalOptions& opts) {
  const auto tests = oracle_tests(world);
  const std::size_t ns = opts.seeds.size();
  std::vector<Fsm> fsms;
  for (const auto& sc : scenarios) fsms.push_back(compile(sc.task));
  std::vector<Run> runs(scenarios.size() * ns);
  parallel_for(runs.size(), opts.threads, [&](std::size_t i) {
    const Scenario& sc = scenarios[i / ns];
    const auto t0 = std::chrono::steady_clock::now();
    const GridState s0 = eval_start_state(world, sc, opts.seeds[i % ns]);
    const TaskModel model(world, fsms[i / ns], classifier, opts.planner.cost_options());
    PlannerConfig pc = opts.planner;
    pc.seed = opts.seeds[i % ns];
    const PlanResult r = plan(model, pc, s0);
    Run& out = runs[i];
    out.expanded = r.expanded;
    if (r.plan) {
      const auto states = r.plan->env_states();
      out.success = satisfies(std::span<const GridState>(states), sc.task, tests);
      out.cost = r.plan->cost;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  EvalReport report;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    TaskEval te;
    te.task = format_scenario(scenarios[k]);
    double cost = 0.0, expanded = 0.0;
    for (std::size_t j = 0; j < ns; ++j) {
      const Run& r = runs[k * ns + j];
      ++te.runs;
      expanded += static_cast<double>(r.expanded);
      te.wall_time += r.seconds;
      if (r.success) {
        ++te.successes;
        cost += r.cost;
      }
    }
    te.mean_cost = te.successes ? cost / static_cast<double>(te.successes) : 0.0;
    te.mean_expanded = te.runs ? expanded / static_cast<double>(te.runs) : 0.0;
    report.tasks.push_back(te);
  }
  return report;
}

std::vector<std::size_t> goal_search_trials(const SubgoalName& goal, const WorldConfig& world,
                                            const Classifier& classifier, const DependencyMatrix& d,
                                            const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                                            const GoalSearchConfig& cfg, unsigned threads) {
  const GoalTest holds = oracle_goal(goal, world);
  std::vector<std::size_t> out(seeds.size(), std::numeric_limits<std::size_t>::max());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    const GridState s0 = eval_start_state(world, sc, seeds[i]);
    GoalSearchConfig c = cfg;
    c.planner.seed = seeds[i];
    const GoalSearchResult r = plan_to_goal(goal, world, classifier, d, s0, c);
    if (r.plan && holds(r.plan->states.back().s)) out[i] = r.expanded;
  });
  return out;
}

std::size_t expansions_at_success_rate(std::vector<std::size_t> trials, double rate) {
  if (trials.empty()) return std::numeric_limits<std::size_t>::max();
  std::sort(trials.begin(), trials.end());
  const auto need = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(trials.size()) - 1e-9));
  if (need == 0) return 0;
  return trials[need - 1];
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << std::fixed << std::setprecision(3);
  for (const auto& t : r.tasks) {
    out << t.task << "\n  success " << t.successes << '/' << t.runs << " (" << t.success_rate() << ")"
        << "  mean_cost " << t.mean_cost << "  mean_expanded " << t.mean_expanded << "  wall " << t.wall_time
        << "s\n";
  }
  out << "total success " << r.successes() << '/' << r.runs() << " (" << r.success_rate() << ")\n";
}

void write_report_csv(std::ostream& out, const EvalReport& r) {
  out << "task,runs,successes,success_rate,mean_cost,mean_expanded,wall_time\n";
  out << std::setprecision(10);
  for (const auto& t : r.tasks) {
    std::string task = t.task;
    std::replace(task.begin(), task.end(), '"', '\'');
    out << '"' << task << "\"," << t.runs << ',' << t.successes << ',' << t.success_rate() << ',' << t.mean_cost
        << ',' << t.mean_expanded << ',' << t.wall_time << '\n';
  }
}

}  // namespace rsg
