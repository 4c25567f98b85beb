#pragma once

#include <string_view>
#include <vector>

#include "rsg/crafting.hpp"
#include "rsg/model.hpp"

namespace rsg {

// log G_o(s) and log I_o(s) for every subgoal o, indexed like subgoals().
struct GoalScores {
  std::vector<double> log_g;
  std::vector<double> log_i;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual const std::vector<SubgoalName>& subgoals() const = 0;
  virtual void evaluate(const GridState& s, GoalScores& out) const = 0;

  GoalScores evaluate(const GridState& s) const {
    GoalScores out;
    evaluate(s, out);
    return out;
  }
  std::size_t index_of(std::string_view subgoal) const;  // throws std::invalid_argument
};

// How the "not yet achieved" term is produced.
//   kSeparate:    the I head (training and the default everywhere)
//   kOneMinusG:   1 - G, ignoring I
//   kThresholded: G and 1 - G rounded to {0, 1} with per-subgoal thresholds
enum class ComplementMode { kSeparate, kOneMinusG, kThresholded };

class LearnedClassifier final : public Classifier {
 public:
  LearnedClassifier(const WorldConfig& cfg, const Theta& theta, ComplementMode mode = ComplementMode::kSeparate,
                    std::vector<double> thresholds = {});

  const std::vector<SubgoalName>& subgoals() const override { return theta_.subgoals(); }
  using Classifier::evaluate;
  void evaluate(const GridState& s, GoalScores& out) const override;

  const Theta& theta() const { return theta_; }

 private:
  const WorldConfig& cfg_;
  const Theta& theta_;
  ComplementMode mode_;
  std::vector<double> log_thresholds_;
};

// Ground-truth predicates. G is 1 - epsilon when the predicate holds and
// epsilon otherwise; epsilon = 0 gives hard 0/1 outputs (log 0 = -inf).
class OracleClassifier final : public Classifier {
 public:
  explicit OracleClassifier(const WorldConfig& cfg, double epsilon = 0.0);

  const std::vector<SubgoalName>& subgoals() const override { return names_; }
  using Classifier::evaluate;
  void evaluate(const GridState& s, GoalScores& out) const override;

 private:
  const WorldConfig& cfg_;
  std::vector<SubgoalName> names_;
  double epsilon_;
};

}  // namespace rsg
