#include "rsg/dependency.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace rsg {

namespace {

std::size_t find_name(const std::vector<SubgoalName>& names, std::string_view o) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == o) return i;
  }
  throw std::invalid_argument("unknown subgoal '" + std::string(o) + "'");
}

}  // namespace

std::size_t ClassifierThresholds::index_of(std::string_view o) const { return find_name(names, o); }
std::size_t DependencyMatrix::index_of(std::string_view o) const { return find_name(names, o); }

ClassifierThresholds compute_thresholds(const std::vector<Demonstration>& data, const WorldConfig& world,
                                        const Theta& theta) {
  ClassifierThresholds th;
  th.names = theta.subgoals();
  const std::size_t k = th.names.size();
  th.min_g.assign(k, 1.0);
  th.max_g.assign(k, 0.0);
  bool any = false;
  for (const auto& d : data) {
    for (const auto& s : d.states) {
      const auto active = active_features(s, world);
      for (std::size_t o = 0; o < k; ++o) {
        const double g = sigmoid(theta.logit_sparse(o, Head::kG, active));
        th.min_g[o] = std::min(th.min_g[o], g);
        th.max_g[o] = std::max(th.max_g[o], g);
      }
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("thresholds need at least one state");
  th.threshold.resize(k);
  for (std::size_t o = 0; o < k; ++o) {
    // Clamp so rounding in sqrt never leaves [min, max].
    th.threshold[o] = std::clamp(std::sqrt(th.min_g[o] * th.max_g[o]), th.min_g[o], th.max_g[o]);
  }
  return th;
}

std::function<bool(const GridState&)> thresholded_goal(const WorldConfig& world, const Theta& theta,
                                                       const ClassifierThresholds& th, std::string_view o) {
  const std::size_t k = theta.index_of(o);
  const double t = th[o];
  return [&world, &theta, k, t](const GridState& s) {
    return sigmoid(theta.logit_sparse(k, Head::kG, active_features(s, world))) >= t;
  };
}

std::size_t first_index(std::span<const double> g_values, double threshold) {
  for (std::size_t i = 0; i < g_values.size(); ++i) {
    if (g_values[i] >= threshold) return i + 1;
  }
  return kNever;
}

std::size_t first_index(std::span<const GridState> traj, std::string_view o, const TaskAst& task,
                        const std::function<bool(const GridState&)>& holds) {
  if (!task.mentions(o)) return kNever;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (holds(traj[i])) return i + 1;
  }
  return kNever;
}

DependencyMatrix dependencies_from_firsts(std::vector<SubgoalName> names,
                                          const std::vector<std::vector<std::size_t>>& firsts) {
  DependencyMatrix m;
  m.names = std::move(names);
  const std::size_t n = m.names.size();
  m.bcount.assign(n * n, 0);
  m.d.assign(n * n, 0.0);
  for (const auto& f : firsts) {
    if (f.size() != n) throw std::invalid_argument("first-index row has the wrong length");
    for (std::size_t a = 0; a < n; ++a) {
      if (f[a] == kNever) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b != a && f[b] != kNever && f[b] < f[a]) ++m.bcount[a * n + b];
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t total = 0;
    for (std::size_t b = 0; b < n; ++b) total += m.bcount[a * n + b];
    if (total == 0) continue;
    for (std::size_t b = 0; b < n; ++b) {
      m.d[a * n + b] = static_cast<double>(m.bcount[a * n + b]) / static_cast<double>(total);
    }
  }
  return m;
}

DependencyMatrix discover(const std::vector<Demonstration>& data, const std::vector<SubgoalName>& names,
                          const std::vector<std::function<bool(const GridState&)>>& tests) {
  if (tests.size() != names.size()) throw std::invalid_argument("one test per subgoal required");
  std::vector<std::vector<std::size_t>> firsts;
  firsts.reserve(data.size());
  for (const auto& d : data) {
    std::vector<std::size_t> row(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
      row[k] = first_index(std::span<const GridState>(d.states), names[k], d.task, tests[k]);
    }
    firsts.push_back(std::move(row));
  }
  return dependencies_from_firsts(names, firsts);
}

DependencyMatrix discover(const std::vector<Demonstration>& data, const WorldConfig& world, const Theta& theta,
                          const ClassifierThresholds& th) {
  std::vector<std::function<bool(const GridState&)>> tests;
  for (const auto& o : theta.subgoals()) tests.push_back(thresholded_goal(world, theta, th, o));
  return discover(data, theta.subgoals(), tests);
}

DependencyMatrix uniform_dependencies(std::vector<SubgoalName> names) {
  DependencyMatrix m;
  m.names = std::move(names);
  const std::size_t n = m.names.size();
  m.bcount.assign(n * n, 0);
  m.d.assign(n * n, 0.0);
  if (n < 2) return m;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b) m.d[a * n + b] = 1.0 / static_cast<double>(n - 1);
    }
  }
  return m;
}

std::vector<std::pair<SubgoalName, double>> DependencyMatrix::top_predecessors(std::string_view o,
                                                                              std::size_t count) const {
  const std::size_t a = index_of(o);
  std::vector<std::pair<SubgoalName, double>> out;
  for (std::size_t b = 0; b < size(); ++b) {
    if (at(a, b) > 0) out.emplace_back(names[b], at(a, b));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  if (out.size() > count) out.resize(count);
  return out;
}

double priority(std::span<const SubgoalName> instruction, const DependencyMatrix& d, double length_bias) {
  const std::size_t k = instruction.size();
  if (k == 0) throw std::invalid_argument("priority of an empty instruction");
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = d.index_of(instruction[i]);
  double p = std::pow(length_bias, static_cast<double>(k));
  for (std::size_t i = 0; i + 1 < k; ++i) {
    double none = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) none *= 1.0 - d.at(idx[j], idx[i]);
    p *= 1.0 - none;
  }
  return p;
}

void write_dependencies(std::ostream& out, const DependencyMatrix& d) {
  const std::size_t n = d.size();
  out << "rsg-deps 1 " << n << '\n';
  out << "names";
  for (const auto& name : d.names) out << ' ' << name;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t a = 0; a < n; ++a) {
    out << d.names[a];
    for (std::size_t b = 0; b < n; ++b) out << ' ' << d.at(a, b);
    out << '\n';
  }
}

DependencyMatrix read_dependencies(std::istream& in) {
  std::string tag;
  int version = 0;
  std::size_t n = 0;
  if (!(in >> tag >> version >> n) || tag != "rsg-deps") throw std::invalid_argument("not a dependency table");
  if (version != 1) throw std::invalid_argument("unsupported dependency table version");
  DependencyMatrix m;
  if (!(in >> tag) || tag != "names") throw std::invalid_argument("dependency table lacks a names line");
  m.names.resize(n);
  for (auto& name : m.names) {
    if (!(in >> name)) throw std::invalid_argument("dependency table truncated");
  }
  m.bcount.assign(n * n, 0);
  m.d.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    std::string row;
    if (!(in >> row) || row != m.names[a]) throw std::invalid_argument("dependency table rows out of order");
    for (std::size_t b = 0; b < n; ++b) {
      if (!(in >> m.d[a * n + b]) || m.d[a * n + b] < 0) throw std::invalid_argument("bad dependency value");
    }
  }
  return m;
}

}  // namespace rsg
