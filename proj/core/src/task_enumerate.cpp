#include <algorithm>
#include <functional>
#include <map>

#include "rsg/task.hpp"

namespace rsg {

namespace {

using Labels = std::vector<SubgoalName>;
using Block = std::vector<std::size_t>;  // indices into a Labels vector

// All partitions of {0..n-1} into blocks, each block listing its elements in
// increasing order and blocks ordered by their smallest element.
void set_partitions(std::size_t n, std::size_t next, std::vector<Block>& current,
                    std::vector<std::vector<Block>>& out) {
  if (next == n) {
    out.push_back(current);
    return;
  }
  for (std::size_t b = 0; b < current.size(); ++b) {
    current[b].push_back(next);
    set_partitions(n, next + 1, current, out);
    current[b].pop_back();
  }
  current.push_back(Block{next});
  set_partitions(n, next + 1, current, out);
  current.pop_back();
}

class TreeEnumerator {
 public:
  const std::vector<TaskAst>& trees(const Labels& labels) {
    if (auto it = memo_.find(labels); it != memo_.end()) return it->second;
    std::vector<TaskAst> out;
    if (labels.size() == 1) {
      out.push_back(TaskAst::atom(labels.front()));
    } else {
      std::vector<std::vector<Block>> partitions;
      std::vector<Block> scratch;
      set_partitions(labels.size(), 0, scratch, partitions);
      for (const auto& partition : partitions) {
        if (partition.size() < 2) continue;
        std::vector<std::vector<TaskAst>> options;
        for (const auto& block : partition) {
          Labels sub;
          for (auto i : block) sub.push_back(labels[i]);
          options.push_back(trees(sub));
        }
        std::vector<std::size_t> order(partition.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        do {
          for_each_product(options, order, [&](std::vector<TaskAst> kids) {
            out.push_back(TaskAst::then(std::move(kids)));
          });
        } while (std::next_permutation(order.begin(), order.end()));
        std::sort(order.begin(), order.end());
        for_each_product(options, order, [&](std::vector<TaskAst> kids) {
          out.push_back(TaskAst::any(kids));
          out.push_back(TaskAst::all(std::move(kids)));
        });
      }
    }
    return memo_.emplace(labels, std::move(out)).first->second;
  }

 private:
  template <class Fn>
  static void for_each_product(const std::vector<std::vector<TaskAst>>& options,
                               const std::vector<std::size_t>& order, Fn&& fn) {
    std::vector<std::size_t> pick(order.size(), 0);
    while (true) {
      std::vector<TaskAst> kids;
      kids.reserve(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) kids.push_back(options[order[i]][pick[i]]);
      fn(std::move(kids));
      std::size_t d = 0;
      while (d < pick.size()) {
        if (++pick[d] < options[order[d]].size()) break;
        pick[d] = 0;
        ++d;
      }
      if (d == pick.size()) return;
    }
  }

  std::map<Labels, std::vector<TaskAst>> memo_;
};

void for_each_combination(const Labels& vocab, std::size_t k, std::size_t start, Labels& current,
                          const std::function<void(const Labels&)>& fn) {
  if (current.size() == k) {
    fn(current);
    return;
  }
  for (std::size_t i = start; i < vocab.size(); ++i) {
    current.push_back(vocab[i]);
    for_each_combination(vocab, k, i + 1, current, fn);
    current.pop_back();
  }
}

}  // namespace

std::vector<TaskAst> enumerate_tasks(const std::set<SubgoalName>& vocab, std::size_t max_atoms) {
  if (max_atoms == 0) throw std::invalid_argument("enumerate_tasks: max_atoms must be at least 1");
  const Labels sorted(vocab.begin(), vocab.end());
  TreeEnumerator enumerator;
  std::vector<TaskAst> out;
  for (std::size_t k = 1; k <= std::min(max_atoms, sorted.size()); ++k) {
    Labels current;
    for_each_combination(sorted, k, 0, current, [&](const Labels& labels) {
      const auto& trees = enumerator.trees(labels);
      out.insert(out.end(), trees.begin(), trees.end());
    });
  }
  return out;
}

}  // namespace rsg
