#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rsg/alignment.hpp"
#include "rsg/demo.hpp"
#include "rsg/model.hpp"
#include "rsg/objective.hpp"

namespace rsg {

struct TrainConfig {
  ScoreConfig score;
  LossConfig loss;
  std::size_t negatives = 4;
  std::size_t negative_max_atoms = 3;
  double learning_rate = 0.1;
  double lr_decay = 0.5;
  int decay_every = 10;  // epochs
  int epochs = 20;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double mean_score = 0.0;            // true-task score, averaged before each update
  double contrastive_accuracy = 0.0;  // share of samples whose true task beats every negative
  double loss = 0.0;
  double wall_time = 0.0;  // seconds
  std::size_t skipped = 0;
};

struct TrainResult {
  Theta theta;
  std::vector<EpochRecord> log;
};

// Negative tasks for `task`: `count` draws from `pool` whose canonical form
// differs from the true task.
std::vector<TaskAst> sample_negatives(const TaskAst& task, const std::vector<TaskAst>& pool, std::size_t count,
                                      std::mt19937_64& rng);

// Score of `task` on `demo` under theta plus the frozen objective around it.
struct ScoredTask {
  double score = 0.0;
  std::optional<FrozenScore> frozen;  // empty when no alignment exists
};
ScoredTask score_task(const Demonstration& demo, const TaskAst& task, const WorldConfig& world, const Theta& theta,
                      const ScoreConfig& cfg);

// Gradient descent on the contrastive objective. `on_epoch` sees each record
// as it is produced.
TrainResult train(const std::vector<Demonstration>& data, const WorldConfig& world, const TrainConfig& cfg,
                  std::optional<Theta> init = std::nullopt,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace rsg
