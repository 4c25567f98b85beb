// rsg: demonstrations, training, planning and evaluation from the command line.
//
// Exit codes: 0 success, 1 runtime failure, 2 planner failure, 3 input error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>

#include "CLI11.hpp"
#include "config_file.hpp"
#include "json.hpp"
#include "rsg/classifier.hpp"
#include "rsg/dataset.hpp"
#include "rsg/demo.hpp"
#include "rsg/dependency.hpp"
#include "rsg/evaluation.hpp"
#include "rsg/fsm.hpp"
#include "rsg/goal_search.hpp"
#include "rsg/model.hpp"
#include "rsg/planner.hpp"
#include "rsg/scenario.hpp"
#include "rsg/trainer.hpp"
#include "rsg/world_io.hpp"

namespace {

using namespace rsg;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitPlanFailure = 2;
constexpr int kExitInput = 3;

// Input problems: bad files, bad flags, unknown subgoals.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::string world_file;
};

WorldConfig world_of(const Common& c) {
  if (c.world_file.empty()) return default_world();
  try {
    return load_world(c.world_file);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

// Environment overrides: RSG_SEED and RSG_BUDGET only.
void apply_env(Common& c, std::size_t* budget) {
  if (const char* s = std::getenv("RSG_SEED")) c.seed = std::strtoull(s, nullptr, 10);
  if (budget) {
    if (const char* b = std::getenv("RSG_BUDGET")) *budget = std::strtoull(b, nullptr, 10);
  }
}

struct ClassifierChoice {
  std::string model_file;
  bool oracle = false;
  std::string complement = "one-minus-g";  // planning uses G alone by default
  std::string threshold_data;  // dataset for thresholds
};

void add_classifier_flags(CLI::App* app, ClassifierChoice& cc) {
  app->add_option("--model", cc.model_file, "Trained model file");
  app->add_flag("--oracle", cc.oracle, "Use ground-truth classifiers instead of a model");
  app->add_option("--complement", cc.complement, "one-minus-g (default) | separate | thresholded")
      ->check(CLI::IsMember({"separate", "one-minus-g", "thresholded"}));
  app->add_option("--threshold-data", cc.threshold_data, "Dataset for classifier thresholds (thresholded mode)");
}

// Owns whatever the classifier references.
struct ClassifierBundle {
  Theta theta;
  std::unique_ptr<Classifier> clf;
  std::optional<ClassifierThresholds> thresholds;
};

ClassifierBundle make_classifier(const ClassifierChoice& cc, const WorldConfig& world) {
  ClassifierBundle b;
  if (cc.oracle == !cc.model_file.empty()) throw InputError("give exactly one of --model and --oracle");
  if (cc.oracle) {
    b.clf = std::make_unique<OracleClassifier>(world, 0.0);
    return b;
  }
  try {
    b.theta = load_model(cc.model_file, schema_hash(world));
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  ComplementMode mode = ComplementMode::kSeparate;
  std::vector<double> th;
  if (cc.complement == "one-minus-g") mode = ComplementMode::kOneMinusG;
  if (cc.complement == "thresholded") {
    if (cc.threshold_data.empty()) throw InputError("--complement thresholded needs --threshold-data");
    mode = ComplementMode::kThresholded;
    std::vector<Demonstration> data;
    try {
      data = load_dataset(cc.threshold_data, world);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    b.thresholds = compute_thresholds(data, world, b.theta);
    th = b.thresholds->threshold;
  }
  b.clf = std::make_unique<LearnedClassifier>(world, b.theta, mode, th);
  return b;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  std::uint64_t out[1];
  std::uint32_t parts[2];
  seq.generate(parts, parts + 2);
  out[0] = (static_cast<std::uint64_t>(parts[0]) << 32) | parts[1];
  return out[0];
}

std::vector<Pos> path_of(const Plan& p) {
  std::vector<Pos> out;
  for (const auto& s : p.env_states()) out.push_back(s.agent);
  return out;
}

void print_metrics(std::size_t expanded, bool success, std::optional<double> cost, const std::string& status) {
  nlohmann::json m = {{"expanded_nodes", expanded}, {"success", success}, {"status", status}};
  m["cost"] = cost ? nlohmann::json(*cost) : nlohmann::json(nullptr);
  std::cout << "metrics " << m.dump() << '\n';
}

void write_plan_csv(const std::string& path, const Plan& p, const TaskModel& model) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "step,x,y,node,action,step_cost,cumulative_cost\n" << std::setprecision(10);
  double total = 0.0;
  for (std::size_t i = 0; i < p.actions.size(); ++i) {
    total += p.step_costs[i];
    const auto& x = p.states[i];
    out << i << ',' << x.s.agent.x << ',' << x.s.agent.y << ',' << x.v << ",\"" << to_string(p.actions[i], model.fsm())
        << "\"," << p.step_costs[i] << ',' << total << '\n';
  }
}

// gen-demos ------------------------------------------------------------------

struct GenArgs {
  std::string tasks_file, out_file;
  std::size_t count = 10;
  double noise = 0.05;
  int max_attempts = 20;
};

int cmd_gen_demos(Common c, const GenArgs& a) {
  apply_env(c, nullptr);
  const WorldConfig world = world_of(c);
  std::vector<Scenario> scenarios;
  try {
    scenarios = load_scenarios(a.tasks_file, world);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  DemoOptions opts;
  opts.noise = a.noise;
  opts.max_attempts = a.max_attempts;
  std::vector<Demonstration> demos;
  bool empty_task = false;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    std::size_t made = 0;
    for (std::size_t j = 0; j < a.count; ++j) {
      try {
        demos.push_back(generate_demo(world, scenarios[k], mix(c.seed, k * 1000003 + j), opts));
        ++made;
      } catch (const DemoGenerationError& e) {
        std::cerr << "task " << k << " (" << format_scenario(scenarios[k]) << ") demo " << j << ": " << e.what()
                  << '\n';
      }
    }
    if (made == 0) empty_task = true;
  }
  save_dataset(a.out_file, demos, world);
  std::cout << "wrote " << demos.size() << " demonstrations to " << a.out_file << '\n';
  return empty_task ? kExitInput : kExitOk;
}

// train ----------------------------------------------------------------------

struct TrainArgs {
  std::string data_file, config_file, out_file, log_file, init_file;
  int epochs = -1;
};

int cmd_train(Common c, const TrainArgs& a) {
  apply_env(c, nullptr);
  const WorldConfig world = world_of(c);
  TrainConfig cfg;
  std::vector<Demonstration> data;
  std::optional<Theta> init;
  try {
    if (!a.config_file.empty()) cli::apply_train_config(cli::read_config(a.config_file), cfg);
    data = load_dataset(a.data_file, world);
    if (!a.init_file.empty()) init = load_model(a.init_file, schema_hash(world));
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  if (a.epochs >= 0) cfg.epochs = a.epochs;
  cfg.seed = c.seed;

  std::ofstream log;
  if (!a.log_file.empty()) {
    log.open(a.log_file);
    if (!log) throw InputError("cannot write " + a.log_file);
  }
  const TrainResult r = train(data, world, cfg, std::move(init), [&](const EpochRecord& e) {
    nlohmann::json j = {{"epoch", e.epoch},       {"mean_score", e.mean_score},
                        {"contrastive_accuracy", e.contrastive_accuracy},
                        {"loss", e.loss},         {"wall_time", e.wall_time},
                        {"skipped", e.skipped}};
    std::cout << j.dump() << std::endl;
    if (log) log << j.dump() << std::endl;
  });
  save_model(a.out_file, r.theta);
  std::cout << "saved model to " << a.out_file << '\n';
  return kExitOk;
}

// plan -----------------------------------------------------------------------

struct StartArgs {
  std::string inventory;  // comma separated
  std::string layout = "open";
  std::uint64_t start_seed = 0;
};

void add_start_flags(CLI::App* app, StartArgs& s) {
  app->add_option("--inventory", s.inventory, "Starting inventory, comma separated");
  app->add_option("--layout", s.layout, "open | door | river")->check(CLI::IsMember({"open", "door", "river"}));
  app->add_option("--start-seed", s.start_seed, "Seed of the sampled start map (defaults to --seed)");
}

GridState start_state(const WorldConfig& world, const TaskAst& task, const StartArgs& s, std::uint64_t seed) {
  std::string line = unparse(task);
  if (!s.inventory.empty()) line += " | inventory=" + s.inventory;
  line += " | layout=" + s.layout;
  try {
    return eval_start_state(world, parse_scenario(line, world), seed);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

struct PlanArgs {
  ClassifierChoice cc;
  StartArgs start;
  std::string task, config_file, csv_file;
  std::size_t budget = 5000;
  bool stop_at_first = false;
};

int cmd_plan(Common c, PlanArgs a) {
  apply_env(c, &a.budget);
  const WorldConfig world = world_of(c);
  TaskAst task;
  PlannerConfig pc;
  try {
    task = parse_task(a.task);
    validate_vocabulary(task, world.vocabulary());
    if (!a.config_file.empty()) cli::apply_planner_config(cli::read_config(a.config_file), pc);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  pc.node_budget = a.budget;
  pc.seed = c.seed;
  pc.stop_at_first = a.stop_at_first;
  const ClassifierBundle b = make_classifier(a.cc, world);
  const Fsm fsm = compile(task);
  const TaskModel model(world, fsm, *b.clf, pc.cost_options());
  const GridState s0 = start_state(world, task, a.start, a.start.start_seed ? a.start.start_seed : c.seed);

  std::cout << "task " << unparse(task) << '\n' << render_ascii(s0, world) << '\n';
  const PlanResult r = plan(model, pc, s0);
  if (!r.plan) {
    print_metrics(r.expanded, false, std::nullopt, std::string(plan_status_name(r.status)));
    return kExitPlanFailure;
  }
  std::cout << format_plan(*r.plan, model) << '\n'
            << render_ascii(r.plan->states.back().s, world, path_of(*r.plan)) << '\n';
  const auto states = r.plan->env_states();
  const bool ok = satisfies(std::span<const GridState>(states), task, oracle_tests(world));
  std::cout << "oracle check: " << (ok ? "satisfied" : "NOT satisfied") << '\n';
  print_metrics(r.expanded, true, r.plan->cost, std::string(plan_status_name(r.status)));
  if (!a.csv_file.empty()) write_plan_csv(a.csv_file, *r.plan, model);
  return kExitOk;
}

// plan-goal ------------------------------------------------------------------

struct GoalArgs {
  ClassifierChoice cc;
  StartArgs start;
  std::string goal, deps_file, csv_file;
  bool uniform = false, blind = false;
  std::size_t budget = 25000;
  std::size_t attempt_budget = 1000;
};

int cmd_plan_goal(Common c, GoalArgs a) {
  apply_env(c, &a.budget);
  const WorldConfig world = world_of(c);
  const ClassifierBundle b = make_classifier(a.cc, world);
  const auto names = b.clf->subgoals();
  if (std::find(names.begin(), names.end(), a.goal) == names.end()) throw InputError("unknown goal '" + a.goal + "'");
  DependencyMatrix d;
  if (a.uniform || a.blind) {
    d = uniform_dependencies(names);
  } else {
    if (a.deps_file.empty()) throw InputError("plan-goal needs --deps, --uniform-deps or --blind");
    std::ifstream in(a.deps_file);
    if (!in) throw InputError("cannot read " + a.deps_file);
    try {
      d = read_dependencies(in);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  GoalSearchConfig gc;
  gc.total_budget = a.budget;
  gc.attempt_budget = a.attempt_budget;
  gc.mode = a.blind ? GoalSearchMode::kBlind : GoalSearchMode::kGuided;
  gc.planner.node_budget = 0;
  gc.planner.stop_at_first = true;
  gc.planner.seed = c.seed;
  const GridState s0 =
      start_state(world, TaskAst::atom(a.goal), a.start, a.start.start_seed ? a.start.start_seed : c.seed);
  std::cout << render_ascii(s0, world) << '\n';
  const GoalSearchResult r = plan_to_goal(a.goal, world, *b.clf, d, s0, gc);
  for (const auto& at : r.attempts) {
    std::cout << "attempt [" << format_instruction(at.instruction) << "] priority " << at.priority << " expanded "
              << at.expanded << (at.success ? " success" : "") << '\n';
  }
  if (!r.plan) {
    print_metrics(r.expanded, false, std::nullopt, "budget");
    return kExitPlanFailure;
  }
  std::cout << "instruction: " << format_instruction(r.instruction) << '\n';
  const Fsm fsm = r.instruction.size() == 1 ? compile(TaskAst::atom(r.instruction[0])) : [&] {
    std::vector<TaskAst> parts;
    for (const auto& o : r.instruction) parts.push_back(TaskAst::atom(o));
    return compile(TaskAst::then(std::move(parts)));
  }();
  const TaskModel model(world, fsm, *b.clf, gc.planner.cost_options());
  std::cout << format_plan(*r.plan, model) << '\n'
            << render_ascii(r.plan->states.back().s, world, path_of(*r.plan)) << '\n';
  const bool reached = oracle_goal(a.goal, world)(r.plan->states.back().s);
  std::cout << "oracle goal check: " << (reached ? "reached" : "NOT reached") << '\n';
  print_metrics(r.expanded, true, r.plan->cost, "found");
  if (!a.csv_file.empty()) write_plan_csv(a.csv_file, *r.plan, model);
  return kExitOk;
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
  ClassifierChoice cc;
  std::string split_file, csv_file, config_file;
  std::size_t seeds = 100;
  std::size_t budget = 5000;
  unsigned threads = 0;
};

int cmd_eval(Common c, EvalArgs a) {
  apply_env(c, &a.budget);
  const WorldConfig world = world_of(c);
  std::vector<Scenario> split;
  EvalOptions eo;
  try {
    split = load_scenarios(a.split_file, world);
    if (!a.config_file.empty()) cli::apply_planner_config(cli::read_config(a.config_file), eo.planner);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  const ClassifierBundle b = make_classifier(a.cc, world);
  eo.planner.node_budget = a.budget;
  eo.threads = a.threads;
  for (std::size_t i = 0; i < a.seeds; ++i) eo.seeds.push_back(c.seed + i);
  const EvalReport r = evaluate(world, *b.clf, split, eo);
  write_report(std::cout, r);
  if (!a.csv_file.empty()) {
    std::ofstream out(a.csv_file);
    if (!out) throw InputError("cannot write " + a.csv_file);
    write_report_csv(out, r);
  }
  return kExitOk;
}

// deps -----------------------------------------------------------------------

struct DepsArgs {
  ClassifierChoice cc;
  std::string data_file, out_file;
  std::size_t top = 3;
};

int cmd_deps(Common c, DepsArgs a) {
  apply_env(c, nullptr);
  const WorldConfig world = world_of(c);
  std::vector<Demonstration> data;
  try {
    data = load_dataset(a.data_file, world);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  DependencyMatrix d;
  if (a.cc.oracle) {
    std::vector<std::function<bool(const GridState&)>> tests;
    for (const auto& o : world.subgoal_names()) tests.push_back(oracle_goal(o, world));
    d = discover(data, world.subgoal_names(), tests);
  } else {
    if (a.cc.model_file.empty()) throw InputError("deps needs --model or --oracle");
    Theta theta;
    try {
      theta = load_model(a.cc.model_file, schema_hash(world));
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
    d = discover(data, world, theta, compute_thresholds(data, world, theta));
  }
  if (!a.out_file.empty()) {
    std::ofstream out(a.out_file);
    if (!out) throw InputError("cannot write " + a.out_file);
    write_dependencies(out, d);
  }
  std::cout << std::fixed << std::setprecision(3);
  for (const auto& o : d.names) {
    std::cout << o << " <-";
    const auto top = d.top_predecessors(o, a.top);
    if (top.empty()) std::cout << " (none)";
    for (const auto& [p, v] : top) std::cout << ' ' << p << ' ' << v;
    std::cout << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational subgoal learning and planning in a grid crafting world"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Global seed");
  app.add_option("--world", common.world_file, "World file (default: built-in world)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen-demos", "Generate expert demonstrations");
  g->add_option("--tasks", gen.tasks_file, "Task list, one scenario per line")->required();
  g->add_option("--count", gen.count, "Demonstrations per task");
  g->add_option("--noise", gen.noise, "Per-step probability of a random non-worsening action");
  g->add_option("--max-attempts", gen.max_attempts, "Start states tried per demonstration");
  g->add_option("--out", gen.out_file, "Output dataset (JSON lines)")->required();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train subgoal classifiers");
  t->add_option("--data", tr.data_file, "Dataset")->required();
  t->add_option("--config", tr.config_file, "Training config (key = value)");
  t->add_option("--out", tr.out_file, "Output model")->required();
  t->add_option("--log", tr.log_file, "Per-epoch JSON lines log");
  t->add_option("--init", tr.init_file, "Start from this model");
  t->add_option("--epochs", tr.epochs, "Override the epoch count");

  PlanArgs pl;
  auto* p = app.add_subcommand("plan", "Plan for a task description");
  add_classifier_flags(p, pl.cc);
  add_start_flags(p, pl.start);
  p->add_option("--task", pl.task, "Task description")->required();
  p->add_option("--budget", pl.budget, "Expansions per FSM node (0 = unlimited)");
  p->add_option("--config", pl.config_file, "Planner config (key = value)");
  p->add_flag("--first", pl.stop_at_first, "Stop at the first plan found");
  p->add_option("--csv", pl.csv_file, "Write the plan as CSV");

  GoalArgs gl;
  auto* pg = app.add_subcommand("plan-goal", "Plan for a single goal using subgoal dependencies");
  add_classifier_flags(pg, gl.cc);
  add_start_flags(pg, gl.start);
  pg->add_option("--goal", gl.goal, "Goal subgoal")->required();
  pg->add_option("--deps", gl.deps_file, "Dependency table from `rsg deps`");
  pg->add_flag("--uniform-deps", gl.uniform, "Uniform dependencies (no discovery)");
  pg->add_flag("--blind", gl.blind, "Single-goal search without instructions");
  pg->add_option("--budget", gl.budget, "Total expansions across attempts");
  pg->add_option("--attempt-budget", gl.attempt_budget, "Expansions per subgoal of an instruction");
  pg->add_option("--csv", gl.csv_file, "Write the plan as CSV");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Success rate over a task split");
  add_classifier_flags(e, ev.cc);
  e->add_option("--split", ev.split_file, "Task list")->required();
  e->add_option("--seeds", ev.seeds, "Start maps per task (seeds seed..seed+n-1)");
  e->add_option("--budget", ev.budget, "Expansions per FSM node");
  e->add_option("--config", ev.config_file, "Planner config (key = value)");
  e->add_option("--threads", ev.threads, "Worker threads (0 = all cores)");
  e->add_option("--csv", ev.csv_file, "Write the report as CSV");

  DepsArgs dp;
  auto* d = app.add_subcommand("deps", "Discover subgoal dependencies");
  d->add_option("--data", dp.data_file, "Dataset")->required();
  d->add_option("--model", dp.cc.model_file, "Model for thresholded classifiers");
  d->add_flag("--oracle", dp.cc.oracle, "Use ground-truth predicates");
  d->add_option("--out", dp.out_file, "Write the dependency table");
  d->add_option("--top", dp.top, "Predecessors printed per subgoal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*g) return cmd_gen_demos(common, gen);
    if (*t) return cmd_train(common, tr);
    if (*p) return cmd_plan(common, pl);
    if (*pg) return cmd_plan_goal(common, gl);
    if (*e) return cmd_eval(common, ev);
    if (*d) return cmd_deps(common, dp);
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitInput;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitInput;
}
