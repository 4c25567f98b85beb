#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "rsg/task.hpp"
#include "support.hpp"

namespace rsg {
namespace {

using testing::brute_satisfies;
using testing::random_task;

TaskAst A(const char* n) { return TaskAst::atom(n); }

TEST(ParseTask, ThenWithParenthesizedOr) {
  EXPECT_EQ(parse_task("a then (b or c)"), TaskAst::then({A("a"), TaskAst::any({A("b"), A("c")})}));
}

TEST(ParseTask, SameConnectiveFlattens) {
  const TaskAst t = parse_task("a and b and c");
  EXPECT_EQ(t, TaskAst::all({A("a"), A("b"), A("c")}));
  EXPECT_EQ(t.children.size(), 3u);
}

TEST(ParseTask, IncompleteExpressionIsSyntaxError) {
  try {
    parse_task("a then");
    FAIL() << "expected a parse error";
  } catch (const TaskParseError& e) {
    EXPECT_EQ(e.reason(), TaskParseError::Reason::kSyntax);
    EXPECT_EQ(e.offset(), 6u);
  }
}

TEST(ParseTask, MixedConnectivesRejected) {
  try {
    parse_task("a then b or c");
    FAIL() << "expected a parse error";
  } catch (const TaskParseError& e) {
    EXPECT_EQ(e.reason(), TaskParseError::Reason::kMixedConnectives);
    EXPECT_EQ(e.offset(), 9u);
  }
}

TEST(ParseTask, UnknownKeyword) {
  try {
    parse_task("a until b");
    FAIL() << "expected a parse error";
  } catch (const TaskParseError& e) {
    EXPECT_EQ(e.reason(), TaskParseError::Reason::kUnknownKeyword);
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(ParseTask, BadCharacterAndUnbalancedParens) {
  EXPECT_THROW(parse_task("a then b!"), TaskParseError);
  EXPECT_THROW(parse_task("(a then b"), TaskParseError);
  EXPECT_THROW(parse_task("a then b)"), TaskParseError);
  EXPECT_THROW(parse_task(""), TaskParseError);
  EXPECT_THROW(parse_task("()"), TaskParseError);
}

TEST(ParseTask, ExplicitNestingIsKept) {
  const TaskAst t = parse_task("(a and b) and c");
  ASSERT_EQ(t.children.size(), 2u);
  EXPECT_EQ(t.children[0], TaskAst::all({A("a"), A("b")}));
}

TEST(Unparse, Examples) {
  EXPECT_EQ(unparse(A("a")), "a");
  EXPECT_EQ(unparse(TaskAst::then({A("a"), A("b")})), "a then b");
  EXPECT_EQ(unparse(TaskAst::any({A("a"), TaskAst::then({A("b"), A("c")})})), "a or (b then c)");
}

TEST(Unparse, RoundTripsEveryEnumeratedTask) {
  for (const auto& t : enumerate_tasks({"a", "b", "c", "d"}, 4)) {
    ASSERT_EQ(parse_task(unparse(t)), t) << unparse(t);
  }
}

TEST(Validate, ArityAndVocabulary) {
  TaskAst bad;
  bad.kind = TaskKind::kThen;
  bad.children = {A("a")};
  EXPECT_THROW(validate(bad), std::invalid_argument);
  EXPECT_THROW(validate(A("")), std::invalid_argument);
  EXPECT_NO_THROW(validate(parse_task("a then (b or c)")));
  EXPECT_THROW(validate_vocabulary(parse_task("a then z"), {"a", "b"}), std::invalid_argument);
  EXPECT_NO_THROW(validate_vocabulary(parse_task("a then b"), {"a", "b"}));
}

TEST(CanonicalKey, IgnoresCommutativeOrderOnly) {
  EXPECT_EQ(canonical_key(parse_task("a or b")), canonical_key(parse_task("b or a")));
  EXPECT_EQ(canonical_key(parse_task("(a and b) then c")), canonical_key(parse_task("(b and a) then c")));
  EXPECT_NE(canonical_key(parse_task("a then b")), canonical_key(parse_task("b then a")));
}

// ---------------------------------------------------------------------------
// Satisfaction

using Trace = std::vector<std::set<SubgoalName>>;

bool sat(const Trace& trace, const TaskAst& t) {
  return satisfies_trace(trace.size(), t, [&](const SubgoalName& o, std::size_t i) { return trace[i].count(o) > 0; });
}

TEST(Satisfies, AtomTwoStates) {
  EXPECT_TRUE(sat({{}, {"o"}}, A("o")));
  EXPECT_FALSE(sat({{"o"}, {"o"}}, A("o")));
  EXPECT_FALSE(sat({{}, {}}, A("o")));
}

TEST(Satisfies, SingleStateNeverSatisfies) {
  for (const auto& t : enumerate_tasks({"a", "b"}, 2)) {
    EXPECT_FALSE(sat({{}}, t));
    EXPECT_FALSE(sat({{"a", "b"}}, t));
  }
}

TEST(Satisfies, EmptySequenceIsAnError) {
  EXPECT_THROW(satisfies_trace(0, A("a"), [](const SubgoalName&, std::size_t) { return true; }),
               std::invalid_argument);
  const GoalTestMap<int> tests = {{"a", [](const int& s) { return s > 0; }}};
  EXPECT_THROW(satisfies(std::span<const int>(), A("a"), tests), std::invalid_argument);
}

TEST(Satisfies, MissingGoalTestIsAnError) {
  const std::vector<int> states = {0, 1};
  const GoalTestMap<int> tests = {{"a", [](const int& s) { return s > 0; }}};
  EXPECT_THROW(satisfies(std::span<const int>(states), A("b"), tests), std::out_of_range);
  EXPECT_TRUE(satisfies(std::span<const int>(states), A("a"), tests));
}

TEST(Satisfies, ThenOnLengthFiveMatchesSplitEnumeration) {
  std::mt19937_64 rng(7);
  const TaskAst t = TaskAst::then({A("a"), A("b")});
  for (int rep = 0; rep < 200; ++rep) {
    Trace tr(5);
    for (auto& s : tr) {
      if (rng() & 1) s.insert("a");
      if (rng() & 1) s.insert("b");
    }
    bool expected = false;
    for (std::size_t j = 1; j <= 3; ++j) {
      const bool first = !tr[0].count("a") && tr[j].count("a");
      const bool second = !tr[j].count("b") && tr[4].count("b");
      expected = expected || (first && second);
    }
    EXPECT_EQ(sat(tr, t), expected);
  }
}

TEST(Satisfies, MatchesBruteForceOnRandomInstances) {
  std::mt19937_64 rng(11);
  const std::vector<SubgoalName> vocab = {"a", "b", "c"};
  for (int rep = 0; rep < 2000; ++rep) {
    const TaskAst t = random_task(vocab, 3, rng);
    Trace tr(1 + rng() % 6);
    for (auto& s : tr) {
      for (const auto& o : vocab) {
        if (rng() % 2) s.insert(o);
      }
    }
    ASSERT_EQ(sat(tr, t), brute_satisfies(tr, t)) << unparse(t);
  }
}

TEST(SatisfiesProperties, OrIsMonotone) {
  std::mt19937_64 rng(3);
  const std::vector<SubgoalName> vocab = {"a", "b", "c", "d"};
  for (int rep = 0; rep < 500; ++rep) {
    const TaskAst t1 = random_task(vocab, 2, rng);
    const TaskAst t2 = random_task(vocab, 2, rng);
    Trace tr(2 + rng() % 5);
    for (auto& s : tr) {
      for (const auto& o : vocab) {
        if (rng() % 2) s.insert(o);
      }
    }
    if (sat(tr, t1)) EXPECT_TRUE(sat(tr, TaskAst::any({t1, t2})));
  }
}

TEST(SatisfiesProperties, AndIsEitherOrder) {
  std::mt19937_64 rng(5);
  const std::vector<SubgoalName> vocab = {"a", "b", "c"};
  for (int rep = 0; rep < 500; ++rep) {
    const TaskAst t1 = random_task(vocab, 2, rng);
    const TaskAst t2 = random_task(vocab, 2, rng);
    Trace tr(2 + rng() % 5);
    for (auto& s : tr) {
      for (const auto& o : vocab) {
        if (rng() % 2) s.insert(o);
      }
    }
    EXPECT_EQ(sat(tr, TaskAst::all({t1, t2})),
              sat(tr, TaskAst::then({t1, t2})) || sat(tr, TaskAst::then({t2, t1})));
  }
}

TEST(SatisfiesProperties, AtomFailsWhenFirstStateHolds) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    Trace tr(2 + rng() % 5);
    for (auto& s : tr) {
      if (rng() % 2) s.insert("o");
    }
    tr[0].insert("o");
    EXPECT_FALSE(sat(tr, A("o")));
  }
}

// ---------------------------------------------------------------------------
// Enumeration

// Trees over a labeled atom set, counted by bitmask: a node with m >= 2
// children splits the set into m blocks; then takes any order (m!), and/or
// one each.
std::uint64_t count_trees(unsigned mask, std::map<unsigned, std::uint64_t>& memo);

// Ordered-by-lowest-bit partitions of `rest` into blocks, accumulating the
// product of subtree counts per number of blocks.
void partitions(unsigned whole, unsigned rest, std::uint64_t product, std::size_t blocks,
                std::map<std::size_t, std::uint64_t>& acc, std::map<unsigned, std::uint64_t>& memo) {
  if (rest == 0) {
    acc[blocks] += product;
    return;
  }
  const unsigned low = rest & (~rest + 1);
  const unsigned others = rest & ~low;
  for (unsigned sub = others;; sub = (sub - 1) & others) {
    const unsigned block = sub | low;
    if (block == whole) continue;  // a single block is not a split
    partitions(whole, rest & ~block, product * count_trees(block, memo), blocks + 1, acc, memo);
    if (sub == 0) break;
  }
}

std::uint64_t count_trees(unsigned mask, std::map<unsigned, std::uint64_t>& memo) {
  if (__builtin_popcount(mask) == 1) return 1;
  if (auto it = memo.find(mask); it != memo.end()) return it->second;
  std::map<std::size_t, std::uint64_t> by_blocks;
  partitions(mask, mask, 1, 0, by_blocks, memo);
  std::uint64_t total = 0;
  for (auto [m, prod] : by_blocks) {
    if (m < 2) continue;
    std::uint64_t fact = 1;
    for (std::size_t k = 2; k <= m; ++k) fact *= k;
    total += (fact + 2) * prod;
  }
  return memo[mask] = total;
}

std::uint64_t count_tasks(unsigned vocab, unsigned max_atoms) {
  std::map<unsigned, std::uint64_t> memo;
  std::uint64_t total = 0;
  for (unsigned mask = 1; mask < (1u << vocab); ++mask) {
    if (static_cast<unsigned>(__builtin_popcount(mask)) <= max_atoms) total += count_trees(mask, memo);
  }
  return total;
}

TEST(EnumerateTasks, SingleAtom) {
  const auto ts = enumerate_tasks({"a"}, 1);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0], A("a"));
}

TEST(EnumerateTasks, TwoAtomsByHand) {
  const auto ts = enumerate_tasks({"a", "b"}, 2);
  std::set<std::string> keys;
  for (const auto& t : ts) keys.insert(unparse(t));
  const std::set<std::string> expected = {"a", "b", "a then b", "b then a", "a or b", "a and b"};
  EXPECT_EQ(keys, expected);
  EXPECT_EQ(ts.size(), count_tasks(2, 2));
}

TEST(EnumerateTasks, CountsMatchIndependentCounter) {
  for (unsigned v = 1; v <= 5; ++v) {
    for (unsigned k = 1; k <= std::min(v, 4u); ++k) {
      std::set<SubgoalName> vocab;
      for (unsigned i = 0; i < v; ++i) vocab.insert(std::string(1, static_cast<char>('a' + i)));
      EXPECT_EQ(enumerate_tasks(vocab, k).size(), count_tasks(v, k)) << "vocab " << v << " max " << k;
    }
  }
}

TEST(EnumerateTasks, NoDuplicatesUpToReordering) {
  std::set<std::string> keys;
  for (const auto& t : enumerate_tasks({"a", "b", "c", "d"}, 3)) {
    EXPECT_TRUE(keys.insert(canonical_key(t)).second) << unparse(t);
    EXPECT_NO_THROW(validate(t));
  }
}

TEST(EnumerateTasks, ZeroAtomsRejected) { EXPECT_THROW(enumerate_tasks({"a"}, 0), std::invalid_argument); }

}  // namespace
}  // namespace rsg
