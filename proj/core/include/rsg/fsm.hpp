#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rsg/task.hpp"

namespace rsg {

using FsmNodeId = std::uint32_t;

struct FsmNode {
  FsmNodeId id = 0;
  std::optional<SubgoalName> label;  // empty for the super nodes
};

struct FsmEdge {
  FsmNodeId from = 0;
  FsmNodeId to = 0;
  friend auto operator<=>(const FsmEdge&, const FsmEdge&) = default;
};

// Task automaton with a super start node (id 0) and a super terminal node
// (the largest id). Labeled node ids are allocated in construction order.
class Fsm {
 public:
  Fsm(std::vector<FsmNode> nodes, std::vector<FsmEdge> edges, std::vector<FsmNodeId> start_set,
      std::vector<FsmNodeId> terminal_set);

  const std::vector<FsmNode>& nodes() const { return nodes_; }
  const std::vector<FsmEdge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t labeled_count() const { return nodes_.size() - 2; }

  FsmNodeId start() const { return 0; }
  FsmNodeId terminal() const { return static_cast<FsmNodeId>(nodes_.size() - 1); }
  bool is_super(FsmNodeId v) const { return v == start() || v == terminal(); }
  const SubgoalName& label(FsmNodeId v) const;

  const std::vector<FsmNodeId>& successors(FsmNodeId v) const { return out_[v]; }
  const std::vector<FsmNodeId>& predecessors(FsmNodeId v) const { return in_[v]; }
  bool has_edge(FsmNodeId from, FsmNodeId to) const;

  // Start/terminal sets of the construction before the super nodes were added.
  const std::vector<FsmNodeId>& start_set() const { return start_set_; }
  const std::vector<FsmNodeId>& terminal_set() const { return terminal_set_; }

 private:
  std::vector<FsmNode> nodes_;
  std::vector<FsmEdge> edges_;
  std::vector<FsmNodeId> start_set_;
  std::vector<FsmNodeId> terminal_set_;
  std::vector<std::vector<FsmNodeId>> out_;
  std::vector<std::vector<FsmNodeId>> in_;
};

class FsmCycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

Fsm compile(const TaskAst& task);

// Kahn's algorithm, smallest id first among ready nodes. Throws FsmCycleError.
std::vector<FsmNodeId> topological_order(const Fsm& fsm);

// One `src -> dst` line per edge, e.g. `v0 -> n3[mine-wood]`.
std::string export_edge_list(const Fsm& fsm);

}  // namespace rsg
