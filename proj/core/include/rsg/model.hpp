#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsg/crafting.hpp"

namespace rsg {

enum class Head : std::uint8_t { kG = 0, kI = 1 };

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(sigmoid(z)) without overflow; log(1 - sigmoid(z)) is log_sigmoid(-z).
inline double log_sigmoid(double z) {
  if (z >= 0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

// Linear-logistic classifier parameters. For subgoal k the G head occupies
// params[(2k) * (dim+1) ...] and the I head the next block; the bias is the
// last entry of each block.
class Theta {
 public:
  Theta() = default;
  Theta(std::vector<SubgoalName> subgoals, std::size_t feature_dim, std::uint64_t schema_hash = 0);
  static Theta zeros_for(const WorldConfig& cfg);

  const std::vector<SubgoalName>& subgoals() const { return subgoals_; }
  std::size_t feature_dim() const { return dim_; }
  std::size_t block_size() const { return dim_ + 1; }
  std::uint64_t schema_hash() const { return schema_hash_; }

  std::optional<std::size_t> find(std::string_view subgoal) const;
  std::size_t index_of(std::string_view subgoal) const;  // throws std::invalid_argument

  std::size_t offset(std::size_t subgoal, Head h) const {
    return (2 * subgoal + static_cast<std::size_t>(h)) * block_size();
  }
  std::span<double> block(std::size_t subgoal, Head h) { return {params_.data() + offset(subgoal, h), block_size()}; }
  std::span<const double> block(std::size_t subgoal, Head h) const {
    return {params_.data() + offset(subgoal, h), block_size()};
  }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  double logit(std::size_t subgoal, Head h, std::span<const double> phi) const;
  double logit_sparse(std::size_t subgoal, Head h, std::span<const std::uint16_t> active) const;

  friend bool operator==(const Theta&, const Theta&) = default;

 private:
  std::vector<SubgoalName> subgoals_;
  std::size_t dim_ = 0;
  std::uint64_t schema_hash_ = 0;
  std::vector<double> params_;
};

double eval_G(const Theta& theta, std::string_view subgoal, std::span<const double> phi);
double eval_I(const Theta& theta, std::string_view subgoal, std::span<const double> phi);

// Gradient of log(head output) w.r.t. that head's block (weights then bias).
std::vector<double> grad_log(const Theta& theta, std::string_view subgoal, std::span<const double> phi, Head which);

class ModelFormatError : public std::runtime_error {
 public:
  enum class Reason { kVersion, kCorrupt, kSchema };
  ModelFormatError(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Binary: "RSGM", version, schema hash, subgoal names, parameters, FNV-1a
// checksum of everything before it. Host byte order.
std::string serialize(const Theta& theta);
Theta deserialize(std::string_view bytes);

void save_model(const std::filesystem::path& path, const Theta& theta);
// With `expected_schema`, a model trained against another feature schema is
// rejected with Reason::kSchema.
Theta load_model(const std::filesystem::path& path, std::optional<std::uint64_t> expected_schema = std::nullopt);

}  // namespace rsg
