#include "rsg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "rsg/classifier.hpp"
#include "rsg/fsm.hpp"

namespace rsg {

std::vector<TaskAst> sample_negatives(const TaskAst& task, const std::vector<TaskAst>& pool, std::size_t count,
                                      std::mt19937_64& rng) {
  std::vector<TaskAst> out;
  if (pool.empty()) return out;
  const std::string key = canonical_key(task);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t tries = 0; out.size() < count && tries < 100 * (count + 1); ++tries) {
    const TaskAst& t = pool[pick(rng)];
    if (canonical_key(t) != key) out.push_back(t);
  }
  return out;
}

ScoredTask score_task(const Demonstration& demo, const TaskAst& task, const WorldConfig& world, const Theta& theta,
                      const ScoreConfig& cfg) {
  const Fsm fsm = compile(task);
  const LearnedClassifier clf(world, theta);
  const TaskModel model(world, fsm, clf, cfg.cost_options());
  const SearchTree tree = rationality_tree(demo, model, cfg);
  const ScoreResult r = score_tables(fsm, make_tables(demo, model, tree, cfg.alpha), cfg.lambda, cfg.boundary_terms);
  ScoredTask out;
  out.score = r.score;
  if (!r.alignment.empty()) out.frozen.emplace(demo, model, tree, r.alignment, cfg);
  return out;
}

TrainResult train(const std::vector<Demonstration>& data, const WorldConfig& world, const TrainConfig& cfg,
                  std::optional<Theta> init, const std::function<void(const EpochRecord&)>& on_epoch) {
  if (cfg.score.alpha <= 0 || cfg.score.lambda <= 0 || cfg.loss.beta <= 0 || cfg.loss.gamma < 0) {
    throw std::invalid_argument("training needs alpha, lambda, beta > 0 and gamma >= 0");
  }
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  TrainResult result{init ? std::move(*init) : Theta::zeros_for(world), {}};
  Theta& theta = result.theta;
  if (cfg.epochs <= 0) return result;
  if (data.empty()) throw std::invalid_argument("training needs at least one demonstration");

  const std::vector<TaskAst> pool =
      cfg.negatives > 0 ? enumerate_tasks(world.vocabulary(), cfg.negative_max_atoms) : std::vector<TaskAst>{};
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = cfg.learning_rate * std::pow(cfg.lr_decay, (epoch - 1) / std::max(1, cfg.decay_every));
    std::shuffle(order.begin(), order.end(), rng);
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t used = 0, wins = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::vector<FrozenSample> batch;
      for (std::size_t j = start; j < std::min(order.size(), start + cfg.batch_size); ++j) {
        const Demonstration& d = data[order[j]];
        std::vector<TaskAst> tasks{d.task};
        for (auto& neg : sample_negatives(d.task, pool, cfg.negatives, rng)) tasks.push_back(std::move(neg));
        FrozenSample sample;
        std::vector<double> scores;
        bool ok = true;
        for (const auto& t : tasks) {
          ScoredTask st = score_task(d, t, world, theta, cfg.score);
          if (!st.frozen || !std::isfinite(st.score)) {
            ok = false;
            break;
          }
          scores.push_back(st.score);
          sample.scores.push_back(std::move(*st.frozen));
        }
        if (!ok) {
          ++rec.skipped;
          continue;
        }
        rec.mean_score += scores[0];
        if (std::all_of(scores.begin() + 1, scores.end(), [&](double s) { return scores[0] > s; })) ++wins;
        ++used;
        batch.push_back(std::move(sample));
      }
      if (batch.empty()) continue;
      const double loss = contrastive_loss(batch, theta, cfg.loss, &grad);
      if (!std::isfinite(loss)) throw std::runtime_error("training loss is not finite");
      rec.loss += loss * static_cast<double>(batch.size());
      auto& p = theta.params();
      for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * grad[k];
    }
    if (used > 0) {
      rec.mean_score /= static_cast<double>(used);
      rec.loss /= static_cast<double>(used);
      rec.contrastive_accuracy = static_cast<double>(wins) / static_cast<double>(used);
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace rsg
