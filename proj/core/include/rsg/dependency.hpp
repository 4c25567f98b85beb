#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rsg/classifier.hpp"
#include "rsg/demo.hpp"
#include "rsg/model.hpp"

namespace rsg {

// Per-subgoal extremes of G over a set of states and the geometric-mean
// threshold sqrt(MinG * MaxG).
struct ClassifierThresholds {
  std::vector<SubgoalName> names;
  std::vector<double> min_g, max_g, threshold;

  std::size_t index_of(std::string_view o) const;  // throws std::invalid_argument
  double operator[](std::string_view o) const { return threshold[index_of(o)]; }
};

ClassifierThresholds compute_thresholds(const std::vector<Demonstration>& data, const WorldConfig& world,
                                        const Theta& theta);

// Binary subgoal test: G_o(s) >= threshold_o.
std::function<bool(const GridState&)> thresholded_goal(const WorldConfig& world, const Theta& theta,
                                                       const ClassifierThresholds& th, std::string_view o);

inline constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

// 1-based index of the first value at or above the threshold, or kNever.
std::size_t first_index(std::span<const double> g_values, double threshold);
// First state satisfying `holds`; kNever when none does or when the task does
// not mention o.
std::size_t first_index(std::span<const GridState> traj, std::string_view o, const TaskAst& task,
                        const std::function<bool(const GridState&)>& holds);

struct DependencyMatrix {
  std::vector<SubgoalName> names;
  std::vector<std::size_t> bcount;  // row-major: bcount[o1][o2] = #trajectories with o2 first reached before o1
  std::vector<double> d;            // bcount rows normalized to sum 1 (all-zero rows stay zero)

  std::size_t size() const { return names.size(); }
  std::size_t index_of(std::string_view o) const;  // throws std::invalid_argument
  double at(std::string_view o1, std::string_view o2) const { return d[index_of(o1) * size() + index_of(o2)]; }
  double at(std::size_t i, std::size_t j) const { return d[i * size() + j]; }
  // Up to `count` subgoals with the largest positive d(o, .), best first.
  std::vector<std::pair<SubgoalName, double>> top_predecessors(std::string_view o, std::size_t count) const;
};

// bcount from a table of first indices: firsts[t][k] for trajectory t and
// subgoal k (kNever when unmet).
DependencyMatrix dependencies_from_firsts(std::vector<SubgoalName> names,
                                          const std::vector<std::vector<std::size_t>>& firsts);

// First indices use `tests`, one predicate per subgoal name.
DependencyMatrix discover(const std::vector<Demonstration>& data, const std::vector<SubgoalName>& names,
                          const std::vector<std::function<bool(const GridState&)>>& tests);
// Thresholded learned classifiers.
DependencyMatrix discover(const std::vector<Demonstration>& data, const WorldConfig& world, const Theta& theta,
                          const ClassifierThresholds& th);

// d(o1, o2) = 1 / (N - 1) for o1 != o2.
DependencyMatrix uniform_dependencies(std::vector<SubgoalName> names);

// lambda^k * prod_{i<k} (1 - prod_{j>i} (1 - d(o_j, o_i))) for o_1..o_k.
double priority(std::span<const SubgoalName> instruction, const DependencyMatrix& d, double length_bias = 0.9);

// Labeled text table: header "rsg-deps 1 N", a names line, then one row per
// subgoal with the name and N values of d.
void write_dependencies(std::ostream& out, const DependencyMatrix& d);
DependencyMatrix read_dependencies(std::istream& in);

}  // namespace rsg
