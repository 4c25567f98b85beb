#include "rsg/task.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <optional>
#include <sstream>

namespace rsg {

TaskAst TaskAst::atom(SubgoalName name) {
  TaskAst t;
  t.kind = TaskKind::kAtom;
  t.name = std::move(name);
  return t;
}

namespace {

TaskAst composite(TaskKind kind, std::vector<TaskAst> children) {
  TaskAst t;
  t.kind = kind;
  t.children = std::move(children);
  return t;
}

}  // namespace

TaskAst TaskAst::then(std::vector<TaskAst> children) { return composite(TaskKind::kThen, std::move(children)); }
TaskAst TaskAst::any(std::vector<TaskAst> children) { return composite(TaskKind::kOr, std::move(children)); }
TaskAst TaskAst::all(std::vector<TaskAst> children) { return composite(TaskKind::kAnd, std::move(children)); }

std::size_t TaskAst::atom_count() const {
  if (is_atom()) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.atom_count();
  return n;
}

std::set<SubgoalName> TaskAst::atoms() const {
  std::set<SubgoalName> out;
  if (is_atom()) {
    out.insert(name);
    return out;
  }
  for (const auto& c : children) out.merge(c.atoms());
  return out;
}

bool TaskAst::mentions(std::string_view subgoal) const {
  if (is_atom()) return name == subgoal;
  return std::any_of(children.begin(), children.end(), [&](const TaskAst& c) { return c.mentions(subgoal); });
}

bool operator==(const TaskAst& a, const TaskAst& b) {
  return a.kind == b.kind && a.name == b.name && a.children == b.children;
}

TaskParseError::TaskParseError(Reason reason, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), reason_(reason), offset_(offset) {}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class TokenKind { kName, kThen, kOr, kAnd, kOpen, kClose, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

// Words that read like connectives or temporal operators but are not part of
// the language. They are rejected rather than treated as subgoal names.
bool is_reserved_word(std::string_view w) {
  std::string lower(w);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const std::set<std::string> kReserved = {"then",  "or",   "and",       "not",    "always",
                                                  "until", "next", "eventually", "before", "after"};
  return kReserved.contains(lower) && lower != w;  // case variants of keywords
}

bool is_ltl_word(std::string_view w) {
  static const std::set<std::string, std::less<>> kLtl = {"not", "always", "until", "next", "eventually",
                                                          "before", "after", "implies", "xor"};
  return kLtl.contains(w);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({TokenKind::kOpen, "(", i++});
      continue;
    }
    if (c == ')') {
      out.push_back({TokenKind::kClose, ")", i++});
      continue;
    }
    if (is_name_char(c)) {
      std::size_t start = i;
      while (i < text.size() && is_name_char(text[i])) ++i;
      std::string word(text.substr(start, i - start));
      TokenKind kind = TokenKind::kName;
      if (word == "then") kind = TokenKind::kThen;
      else if (word == "or") kind = TokenKind::kOr;
      else if (word == "and") kind = TokenKind::kAnd;
      out.push_back({kind, std::move(word), start});
      continue;
    }
    throw TaskParseError(TaskParseError::Reason::kSyntax, i, std::string("unexpected character '") + c + "'");
  }
  out.push_back({TokenKind::kEnd, "", text.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  TaskAst parse() {
    TaskAst t = expr();
    if (peek().kind != TokenKind::kEnd) {
      const Token& tok = peek();
      if (tok.kind == TokenKind::kName) unknown_keyword(tok);
      throw TaskParseError(TaskParseError::Reason::kSyntax, tok.offset, "unexpected '" + tok.text + "'");
    }
    return t;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  static bool is_connective(TokenKind k) {
    return k == TokenKind::kThen || k == TokenKind::kOr || k == TokenKind::kAnd;
  }

  [[noreturn]] static void unknown_keyword(const Token& tok) {
    throw TaskParseError(TaskParseError::Reason::kUnknownKeyword, tok.offset,
                         "unknown keyword '" + tok.text + "' (expected then, or, and)");
  }

  TaskAst expr() {
    std::vector<TaskAst> operands;
    operands.push_back(operand());
    std::optional<TokenKind> connective;
    while (is_connective(peek().kind)) {
      const Token& op = next();
      if (connective && *connective != op.kind) {
        throw TaskParseError(TaskParseError::Reason::kMixedConnectives, op.offset,
                             "mixed connectives need parentheses near '" + op.text + "'");
      }
      connective = op.kind;
      operands.push_back(operand());
    }
    if (!connective) return std::move(operands.front());
    switch (*connective) {
      case TokenKind::kThen: return TaskAst::then(std::move(operands));
      case TokenKind::kOr: return TaskAst::any(std::move(operands));
      default: return TaskAst::all(std::move(operands));
    }
  }

  TaskAst operand() {
    const Token& tok = next();
    switch (tok.kind) {
      case TokenKind::kName:
        if (is_reserved_word(tok.text) || is_ltl_word(tok.text)) unknown_keyword(tok);
        return TaskAst::atom(tok.text);
      case TokenKind::kOpen: {
        TaskAst inner = expr();
        const Token& close = next();
        if (close.kind != TokenKind::kClose) {
          if (close.kind == TokenKind::kName) unknown_keyword(close);
          throw TaskParseError(TaskParseError::Reason::kSyntax, close.offset, "expected ')'");
        }
        return inner;
      }
      case TokenKind::kEnd:
        throw TaskParseError(TaskParseError::Reason::kSyntax, tok.offset, "unexpected end of task");
      default:
        throw TaskParseError(TaskParseError::Reason::kSyntax, tok.offset, "unexpected '" + tok.text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

const char* connective_word(TaskKind kind) {
  switch (kind) {
    case TaskKind::kThen: return "then";
    case TaskKind::kOr: return "or";
    case TaskKind::kAnd: return "and";
    default: return "";
  }
}

}  // namespace

TaskAst parse_task(std::string_view text) { return Parser(tokenize(text)).parse(); }

std::string unparse(const TaskAst& task) {
  if (task.is_atom()) return task.name;
  std::string out;
  for (std::size_t i = 0; i < task.children.size(); ++i) {
    if (i > 0) {
      out += ' ';
      out += connective_word(task.kind);
      out += ' ';
    }
    const auto& c = task.children[i];
    if (c.is_atom()) {
      out += c.name;
    } else {
      out += '(';
      out += unparse(c);
      out += ')';
    }
  }
  return out;
}

std::string canonical_key(const TaskAst& task) {
  if (task.is_atom()) return task.name;
  std::vector<std::string> parts;
  parts.reserve(task.children.size());
  for (const auto& c : task.children) parts.push_back(canonical_key(c));
  if (task.kind != TaskKind::kThen) std::sort(parts.begin(), parts.end());
  std::string out = connective_word(task.kind);
  out += '(';
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ',';
    out += parts[i];
  }
  out += ')';
  return out;
}

void validate(const TaskAst& task) {
  if (task.is_atom()) {
    if (task.name.empty()) throw std::invalid_argument("task atom with empty name");
    if (!task.children.empty()) throw std::invalid_argument("task atom with children");
    return;
  }
  if (task.children.size() < 2) {
    throw std::invalid_argument(std::string("'") + connective_word(task.kind) + "' needs at least two operands");
  }
  for (const auto& c : task.children) validate(c);
}

void validate_vocabulary(const TaskAst& task, const std::set<SubgoalName>& vocab) {
  for (const auto& o : task.atoms()) {
    if (!vocab.contains(o)) throw std::invalid_argument("unknown subgoal '" + o + "'");
  }
}

// ---------------------------------------------------------------------------
// Satisfaction by interval dynamic programming: for every subtree, reach[i][j]
// says whether states i..j (inclusive) satisfy it.

namespace {

using Reach = std::vector<std::vector<char>>;

Reach compose(const Reach& a, const Reach& b) {
  const std::size_t n = a.size();
  Reach out(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = i; x < n; ++x) {
      if (!a[i][x]) continue;
      for (std::size_t j = x; j < n; ++j) {
        if (b[x][j]) out[i][j] = 1;
      }
    }
  }
  return out;
}

void merge_into(Reach& acc, const Reach& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) {
    for (std::size_t j = 0; j < acc.size(); ++j) acc[i][j] = static_cast<char>(acc[i][j] | other[i][j]);
  }
}

Reach evaluate(const TaskAst& task, std::size_t n, const GoalOracle& holds) {
  if (task.is_atom()) {
    std::vector<char> truth(n);
    for (std::size_t i = 0; i < n; ++i) truth[i] = holds(task.name, i) ? 1 : 0;
    Reach r(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      if (truth[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) r[i][j] = truth[j];
    }
    return r;
  }
  std::vector<Reach> parts;
  parts.reserve(task.children.size());
  for (const auto& c : task.children) parts.push_back(evaluate(c, n, holds));

  switch (task.kind) {
    case TaskKind::kOr: {
      Reach r = parts.front();
      for (std::size_t k = 1; k < parts.size(); ++k) merge_into(r, parts[k]);
      return r;
    }
    case TaskKind::kThen: {
      Reach r = parts.front();
      for (std::size_t k = 1; k < parts.size(); ++k) r = compose(r, parts[k]);
      return r;
    }
    case TaskKind::kAnd: {
      // chained[mask]: the children in `mask`, completed in some order.
      const std::size_t m = parts.size();
      std::vector<std::optional<Reach>> chained(std::size_t{1} << m);
      for (std::size_t c = 0; c < m; ++c) chained[std::size_t{1} << c] = parts[c];
      for (std::size_t mask = 1; mask < chained.size(); ++mask) {
        if (std::popcount(mask) < 2) continue;
        Reach acc(n, std::vector<char>(n, 0));
        for (std::size_t c = 0; c < m; ++c) {
          if (!(mask & (std::size_t{1} << c))) continue;
          merge_into(acc, compose(*chained[mask ^ (std::size_t{1} << c)], parts[c]));
        }
        chained[mask] = std::move(acc);
      }
      return *chained.back();
    }
    default: break;
  }
  return {};
}

}  // namespace

bool satisfies_trace(std::size_t length, const TaskAst& task, const GoalOracle& holds) {
  if (length == 0) throw std::invalid_argument("satisfies: empty state sequence");
  if (length < 2) return false;
  return evaluate(task, length, holds)[0][length - 1] != 0;
}

}  // namespace rsg
