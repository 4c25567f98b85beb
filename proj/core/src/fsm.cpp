#include "rsg/fsm.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <queue>
#include <sstream>

namespace rsg {

Fsm::Fsm(std::vector<FsmNode> nodes, std::vector<FsmEdge> edges, std::vector<FsmNodeId> start_set,
         std::vector<FsmNodeId> terminal_set)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      start_set_(std::move(start_set)),
      terminal_set_(std::move(terminal_set)),
      out_(nodes_.size()),
      in_(nodes_.size()) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& e : edges_) {
    out_[e.from].push_back(e.to);
    in_[e.to].push_back(e.from);
  }
}

const SubgoalName& Fsm::label(FsmNodeId v) const {
  if (!nodes_.at(v).label) throw std::out_of_range("fsm: super node has no label");
  return *nodes_[v].label;
}

bool Fsm::has_edge(FsmNodeId from, FsmNodeId to) const {
  if (from >= out_.size()) return false;
  const auto& succ = out_[from];
  return std::find(succ.begin(), succ.end(), to) != succ.end();
}

namespace {

struct Fragment {
  std::vector<FsmNodeId> starts;
  std::vector<FsmNodeId> terminals;
};

class Builder {
 public:
  Fragment build(const TaskAst& task) {
    switch (task.kind) {
      case TaskKind::kAtom: {
        FsmNodeId id = static_cast<FsmNodeId>(labels_.size() + 1);
        labels_.push_back(task.name);
        return Fragment{{id}, {id}};
      }
      case TaskKind::kThen: {
        Fragment acc = build(task.children.front());
        for (std::size_t k = 1; k < task.children.size(); ++k) {
          Fragment next = build(task.children[k]);
          connect(acc.terminals, next.starts);
          acc.terminals = std::move(next.terminals);
        }
        return acc;
      }
      case TaskKind::kOr: {
        Fragment acc;
        for (const auto& c : task.children) {
          Fragment f = build(c);
          acc.starts.insert(acc.starts.end(), f.starts.begin(), f.starts.end());
          acc.terminals.insert(acc.terminals.end(), f.terminals.begin(), f.terminals.end());
        }
        return acc;
      }
      case TaskKind::kAnd: return build_and(task);
    }
    return {};
  }

  void connect(const std::vector<FsmNodeId>& from, const std::vector<FsmNodeId>& to) {
    for (auto a : from)
      for (auto b : to) edges_.push_back({a, b});
  }

  std::vector<std::string> labels_;
  std::vector<FsmEdge> edges_;

 private:
  // Layer i holds one copy of child s per set D of i-1 previously completed
  // children; (s1, D1) feeds (s2, D1 ∪ {s1}) in the next layer.
  Fragment build_and(const TaskAst& task) {
    const std::size_t n = task.children.size();
    std::map<std::pair<std::size_t, std::uint64_t>, Fragment> copies;
    for (std::size_t layer = 1; layer <= n; ++layer) {
      for (std::size_t s = 0; s < n; ++s) {
        for (std::uint64_t done = 0; done < (std::uint64_t{1} << n); ++done) {
          if (done & (std::uint64_t{1} << s)) continue;
          if (static_cast<std::size_t>(std::popcount(done)) != layer - 1) continue;
          copies.emplace(std::make_pair(s, done), build(task.children[s]));
        }
      }
    }
    Fragment out;
    for (const auto& [key, frag] : copies) {
      const auto [s1, d1] = key;
      const std::uint64_t d2 = d1 | (std::uint64_t{1} << s1);
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        if (d2 & (std::uint64_t{1} << s2)) continue;
        connect(frag.terminals, copies.at({s2, d2}).starts);
      }
      const auto layer = static_cast<std::size_t>(std::popcount(d1)) + 1;
      if (layer == 1) out.starts.insert(out.starts.end(), frag.starts.begin(), frag.starts.end());
      if (layer == n) out.terminals.insert(out.terminals.end(), frag.terminals.begin(), frag.terminals.end());
    }
    std::sort(out.starts.begin(), out.starts.end());
    std::sort(out.terminals.begin(), out.terminals.end());
    return out;
  }
};

std::string node_name(const Fsm& fsm, FsmNodeId v) {
  if (v == fsm.start()) return "v0";
  if (v == fsm.terminal()) return "vT";
  return "n" + std::to_string(v) + "[" + fsm.label(v) + "]";
}

}  // namespace

Fsm compile(const TaskAst& task) {
  validate(task);
  Builder b;
  Fragment root = b.build(task);

  std::vector<FsmNode> nodes;
  nodes.push_back({0, std::nullopt});
  for (std::size_t i = 0; i < b.labels_.size(); ++i) {
    nodes.push_back({static_cast<FsmNodeId>(i + 1), b.labels_[i]});
  }
  const auto terminal = static_cast<FsmNodeId>(nodes.size());
  nodes.push_back({terminal, std::nullopt});

  std::vector<FsmEdge> edges = std::move(b.edges_);
  for (auto v : root.starts) edges.push_back({0, v});
  for (auto v : root.terminals) edges.push_back({v, terminal});
  std::sort(root.starts.begin(), root.starts.end());
  std::sort(root.terminals.begin(), root.terminals.end());
  return Fsm(std::move(nodes), std::move(edges), std::move(root.starts), std::move(root.terminals));
}

std::vector<FsmNodeId> topological_order(const Fsm& fsm) {
  std::vector<std::size_t> indegree(fsm.size(), 0);
  for (const auto& e : fsm.edges()) ++indegree[e.to];
  std::priority_queue<FsmNodeId, std::vector<FsmNodeId>, std::greater<>> ready;
  for (FsmNodeId v = 0; v < fsm.size(); ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<FsmNodeId> order;
  order.reserve(fsm.size());
  while (!ready.empty()) {
    FsmNodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (auto w : fsm.successors(v)) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (order.size() != fsm.size()) throw FsmCycleError("fsm: cycle detected");
  return order;
}

std::string export_edge_list(const Fsm& fsm) {
  std::ostringstream out;
  for (const auto& e : fsm.edges()) out << node_name(fsm, e.from) << " -> " << node_name(fsm, e.to) << '\n';
  return out.str();
}

}  // namespace rsg
