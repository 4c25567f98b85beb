#include "config_file.hpp"

#include <charconv>
#include <fstream>

namespace rsg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double as_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' needs a number, got '" + v + "'");
  }
}

std::size_t as_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "' needs a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "' needs true or false, got '" + v + "'");
}

}  // namespace

std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void apply_train_config(const std::map<std::string, std::string>& kv, TrainConfig& cfg) {
  for (const auto& [k, v] : kv) {
    if (k == "alpha") cfg.score.alpha = as_double(k, v);
    else if (k == "lambda") cfg.score.lambda = as_double(k, v);
    else if (k == "boundary_terms") cfg.score.boundary_terms = as_bool(k, v);
    else if (k == "tree_b") cfg.score.tree_b = static_cast<int>(as_size(k, v));
    else if (k == "tree_c") cfg.score.tree_c = static_cast<int>(as_size(k, v));
    else if (k == "tree_k") cfg.score.tree_k = as_size(k, v);
    else if (k == "gamma") cfg.loss.gamma = as_double(k, v);
    else if (k == "beta") cfg.loss.beta = as_double(k, v);
    else if (k == "negatives") cfg.negatives = as_size(k, v);
    else if (k == "negative_max_atoms") cfg.negative_max_atoms = as_size(k, v);
    else if (k == "learning_rate") cfg.learning_rate = as_double(k, v);
    else if (k == "lr_decay") cfg.lr_decay = as_double(k, v);
    else if (k == "decay_every") cfg.decay_every = static_cast<int>(as_size(k, v));
    else if (k == "epochs") cfg.epochs = static_cast<int>(as_size(k, v));
    else if (k == "batch_size") cfg.batch_size = as_size(k, v);
    else throw ConfigError("unknown training config key '" + k + "'");
  }
}

void apply_planner_config(const std::map<std::string, std::string>& kv, PlannerConfig& cfg) {
  for (const auto& [k, v] : kv) {
    if (k == "lambda") cfg.lambda = as_double(k, v);
    else if (k == "boundary_terms") cfg.boundary_terms = as_bool(k, v);
    else if (k == "b") cfg.b = static_cast<int>(as_size(k, v));
    else if (k == "c") cfg.c = static_cast<int>(as_size(k, v));
    else if (k == "k") cfg.k = as_size(k, v);
    else if (k == "node_budget") cfg.node_budget = as_size(k, v);
    else if (k == "global_budget") cfg.global_budget = as_size(k, v);
    else throw ConfigError("unknown planner config key '" + k + "'");
  }
}

}  // namespace rsg::cli
