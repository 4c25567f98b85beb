#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "rsg/planner.hpp"
#include "rsg/trainer.hpp"

namespace rsg::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `key = value` lines; '#' starts a comment. Keys mirror TrainConfig and
// PlannerConfig field names (alpha, lambda, gamma, beta, negatives,
// learning_rate, lr_decay, decay_every, epochs, batch_size, tree_b, tree_c,
// tree_k, boundary_terms, b, c, k, node_budget, global_budget).
std::map<std::string, std::string> read_config(const std::filesystem::path& path);

// Applies known keys; unknown keys throw ConfigError.
void apply_train_config(const std::map<std::string, std::string>& kv, TrainConfig& cfg);
void apply_planner_config(const std::map<std::string, std::string>& kv, PlannerConfig& cfg);

}  // namespace rsg::cli
