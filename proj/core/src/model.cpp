#include "rsg/model.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "rsg/hash.hpp"

namespace rsg {

Theta::Theta(std::vector<SubgoalName> subgoals, std::size_t feature_dim, std::uint64_t schema_hash)
    : subgoals_(std::move(subgoals)),
      dim_(feature_dim),
      schema_hash_(schema_hash),
      params_(2 * subgoals_.size() * (feature_dim + 1), 0.0) {}

Theta Theta::zeros_for(const WorldConfig& cfg) {
  return Theta(cfg.subgoal_names(), feature_schema(cfg).size(), rsg::schema_hash(cfg));
}

std::optional<std::size_t> Theta::find(std::string_view subgoal) const {
  for (std::size_t i = 0; i < subgoals_.size(); ++i) {
    if (subgoals_[i] == subgoal) return i;
  }
  return std::nullopt;
}

std::size_t Theta::index_of(std::string_view subgoal) const {
  if (auto i = find(subgoal)) return *i;
  throw std::invalid_argument("unknown subgoal '" + std::string(subgoal) + "'");
}

double Theta::logit(std::size_t subgoal, Head h, std::span<const double> phi) const {
  if (phi.size() != dim_) throw std::invalid_argument("feature vector length does not match the model");
  auto w = block(subgoal, h);
  double z = w[dim_];
  for (std::size_t i = 0; i < dim_; ++i) z += w[i] * phi[i];
  return z;
}

double Theta::logit_sparse(std::size_t subgoal, Head h, std::span<const std::uint16_t> active) const {
  auto w = block(subgoal, h);
  double z = w[dim_];
  for (auto i : active) z += w[i];
  return z;
}

double eval_G(const Theta& theta, std::string_view subgoal, std::span<const double> phi) {
  return sigmoid(theta.logit(theta.index_of(subgoal), Head::kG, phi));
}

double eval_I(const Theta& theta, std::string_view subgoal, std::span<const double> phi) {
  return sigmoid(theta.logit(theta.index_of(subgoal), Head::kI, phi));
}

std::vector<double> grad_log(const Theta& theta, std::string_view subgoal, std::span<const double> phi, Head which) {
  const double z = theta.logit(theta.index_of(subgoal), which, phi);
  const double s = sigmoid(-z);  // d log sigmoid(z) / dz
  std::vector<double> g(theta.block_size());
  for (std::size_t i = 0; i < phi.size(); ++i) g[i] = s * phi[i];
  g.back() = s;
  return g;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr char kMagic[4] = {'R', 'S', 'G', 'M'};

class Writer {
 public:
  template <class T>
  void put(const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    buf_ += s;
  }
  std::string& buf() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    auto n = get<std::uint32_t>();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw ModelFormatError(ModelFormatError::Reason::kCorrupt, "model file truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::uint64_t checksum(std::string_view bytes) {
  Fnv1a h;
  h.add_bytes(bytes.data(), bytes.size());
  return h.value();
}

}  // namespace

std::string serialize(const Theta& theta) {
  Writer w;
  w.buf().append(kMagic, 4);
  w.put(kModelFormatVersion);
  w.put(theta.schema_hash());
  w.put(static_cast<std::uint32_t>(theta.subgoals().size()));
  w.put(static_cast<std::uint32_t>(theta.feature_dim()));
  for (const auto& name : theta.subgoals()) w.put_string(name);
  for (double v : theta.params()) w.put(v);
  w.put(checksum(w.buf()));
  return std::move(w.buf());
}

Theta deserialize(std::string_view bytes) {
  using R = ModelFormatError::Reason;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw ModelFormatError(R::kCorrupt, "not a model file");
  Reader r(bytes.substr(4));
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw ModelFormatError(R::kVersion, "unsupported model format version " + std::to_string(version));
  }
  const auto schema = r.get<std::uint64_t>();
  const auto n = r.get<std::uint32_t>();
  const auto dim = r.get<std::uint32_t>();
  if (n > 4096 || dim > 65535) throw ModelFormatError(R::kCorrupt, "model header out of range");
  std::vector<SubgoalName> names;
  for (std::uint32_t i = 0; i < n; ++i) names.push_back(r.get_string());
  Theta theta(std::move(names), dim, schema);
  for (double& v : theta.params()) v = r.get<double>();
  const std::size_t body = 4 + r.pos();
  const auto stored = r.get<std::uint64_t>();
  if (4 + r.pos() != bytes.size()) throw ModelFormatError(R::kCorrupt, "trailing bytes after model");
  if (stored != checksum(bytes.substr(0, body))) throw ModelFormatError(R::kCorrupt, "model checksum mismatch");
  return theta;
}

void save_model(const std::filesystem::path& path, const Theta& theta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  const std::string bytes = serialize(theta);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Theta load_model(const std::filesystem::path& path, std::optional<std::uint64_t> expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Theta theta = deserialize(ss.str());
  if (expected_schema && theta.schema_hash() != *expected_schema) {
    throw ModelFormatError(ModelFormatError::Reason::kSchema, "model was trained against a different world schema");
  }
  return theta;
}

}  // namespace rsg
