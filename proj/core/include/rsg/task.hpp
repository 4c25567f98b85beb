#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rsg {

using SubgoalName = std::string;

enum class TaskKind { kAtom, kThen, kOr, kAnd };

// A task description: subgoal atoms composed with then / or / and.
// Composite nodes hold at least two children. `then` children are ordered;
// `or` and `and` children keep their written order for printing only.
struct TaskAst {
  TaskKind kind = TaskKind::kAtom;
  SubgoalName name;  // atoms only
  std::vector<TaskAst> children;

  static TaskAst atom(SubgoalName name);
  static TaskAst then(std::vector<TaskAst> children);
  static TaskAst any(std::vector<TaskAst> children);  // or
  static TaskAst all(std::vector<TaskAst> children);  // and

  bool is_atom() const { return kind == TaskKind::kAtom; }
  std::size_t atom_count() const;
  std::set<SubgoalName> atoms() const;
  bool mentions(std::string_view subgoal) const;

  friend bool operator==(const TaskAst& a, const TaskAst& b);
};

class TaskParseError : public std::runtime_error {
 public:
  enum class Reason { kSyntax, kUnknownKeyword, kMixedConnectives };

  TaskParseError(Reason reason, std::size_t offset, const std::string& what);

  Reason reason() const { return reason_; }
  std::size_t offset() const { return offset_; }

 private:
  Reason reason_;
  std::size_t offset_;
};

// Grammar:
//   expr    := operand (KEYWORD operand)*   -- one connective per level
//   operand := NAME | '(' expr ')'
// Chains of one connective become a single n-ary node. Mixing connectives
// without parentheses is rejected.
TaskAst parse_task(std::string_view text);

// Inverse of parse_task: composite children are always parenthesized.
std::string unparse(const TaskAst& task);

// Structural key with `or`/`and` children sorted; equal keys mean the tasks
// differ only by reordering of commutative children.
std::string canonical_key(const TaskAst& task);

// Throws std::invalid_argument if any node violates the arity invariants or
// an atom is empty.
void validate(const TaskAst& task);

// Checks every atom against a subgoal vocabulary; throws std::invalid_argument
// naming the first unknown subgoal.
void validate_vocabulary(const TaskAst& task, const std::set<SubgoalName>& vocab);

// Satisfaction of a task over an abstract trace of `length` states, where
// holds(o, i) reports whether goal o is true at state i.
using GoalOracle = std::function<bool(const SubgoalName&, std::size_t)>;
bool satisfies_trace(std::size_t length, const TaskAst& task, const GoalOracle& holds);

template <class State>
using GoalTestMap = std::map<SubgoalName, std::function<bool(const State&)>>;

// s̄ ⊨ t over concrete states. Throws std::invalid_argument on an empty
// sequence and std::out_of_range for atoms missing from `tests`.
template <class State>
bool satisfies(std::span<const State> states, const TaskAst& task,
               const GoalTestMap<State>& tests) {
  if (states.empty()) throw std::invalid_argument("satisfies: empty state sequence");
  for (const auto& o : task.atoms()) {
    if (!tests.contains(o)) throw std::out_of_range("satisfies: no goal test for subgoal '" + o + "'");
  }
  std::map<SubgoalName, std::vector<char>> table;
  for (const auto& o : task.atoms()) {
    auto& row = table[o];
    const auto& test = tests.at(o);
    row.reserve(states.size());
    for (const auto& s : states) row.push_back(test(s) ? 1 : 0);
  }
  return satisfies_trace(states.size(), task,
                         [&](const SubgoalName& o, std::size_t i) { return table.at(o)[i] != 0; });
}

// Every task with distinct atoms drawn from `vocab` and at most `max_atoms`
// leaves, one representative per reordering class of `or`/`and` children.
std::vector<TaskAst> enumerate_tasks(const std::set<SubgoalName>& vocab, std::size_t max_atoms);

}  // namespace rsg
