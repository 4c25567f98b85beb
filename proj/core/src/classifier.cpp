#include "rsg/classifier.hpp"

#include <limits>
#include <stdexcept>

namespace rsg {

std::size_t Classifier::index_of(std::string_view subgoal) const {
  const auto& names = subgoals();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == subgoal) return i;
  }
  throw std::invalid_argument("classifier has no subgoal '" + std::string(subgoal) + "'");
}

LearnedClassifier::LearnedClassifier(const WorldConfig& cfg, const Theta& theta, ComplementMode mode,
                                     std::vector<double> thresholds)
    : cfg_(cfg), theta_(theta), mode_(mode) {
  if (theta.feature_dim() != feature_schema(cfg).size()) {
    throw std::invalid_argument("model feature dimension does not match the world");
  }
  if (mode == ComplementMode::kThresholded) {
    if (thresholds.size() != theta.subgoals().size()) {
      throw std::invalid_argument("thresholded classifier needs one threshold per subgoal");
    }
    for (double t : thresholds) log_thresholds_.push_back(std::log(t));
  }
}

void LearnedClassifier::evaluate(const GridState& s, GoalScores& out) const {
  const std::size_t n = theta_.subgoals().size();
  out.log_g.resize(n);
  out.log_i.resize(n);
  const auto active = active_features(s, cfg_);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double zg = theta_.logit_sparse(k, Head::kG, active);
    switch (mode_) {
      case ComplementMode::kSeparate:
        out.log_g[k] = log_sigmoid(zg);
        out.log_i[k] = log_sigmoid(theta_.logit_sparse(k, Head::kI, active));
        break;
      case ComplementMode::kOneMinusG:
        out.log_g[k] = log_sigmoid(zg);
        out.log_i[k] = log_sigmoid(-zg);
        break;
      case ComplementMode::kThresholded: {
        const bool on = log_sigmoid(zg) >= log_thresholds_[k];
        out.log_g[k] = on ? 0.0 : kNegInf;
        out.log_i[k] = on ? kNegInf : 0.0;
        break;
      }
    }
  }
}

OracleClassifier::OracleClassifier(const WorldConfig& cfg, double epsilon)
    : cfg_(cfg), names_(cfg.subgoal_names()), epsilon_(epsilon) {
  if (epsilon < 0.0 || epsilon >= 0.5) throw std::invalid_argument("oracle epsilon must be in [0, 0.5)");
}

void OracleClassifier::evaluate(const GridState& s, GoalScores& out) const {
  const std::size_t n = cfg_.subgoals.size();
  out.log_g.resize(n);
  out.log_i.resize(n);
  const double hi = std::log1p(-epsilon_);
  const double lo = std::log(epsilon_);  // -inf at epsilon 0
  for (std::size_t k = 0; k < n; ++k) {
    const bool holds = oracle_holds(cfg_.subgoals[k], s, cfg_);
    out.log_g[k] = holds ? hi : lo;
    out.log_i[k] = holds ? lo : hi;
  }
}

}  // namespace rsg
