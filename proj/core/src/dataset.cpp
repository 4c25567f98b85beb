#include "rsg/dataset.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace rsg {

using nlohmann::json;

DatasetFormatError::DatasetFormatError(std::size_t line, const std::string& what)
    : std::runtime_error("dataset line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

json state_to_json(const GridState& s, const WorldConfig& cfg) {
  json inv = json::object();
  for (std::size_t i = 0; i < s.inventory.size(); ++i) {
    if (s.inventory[i] > 0) inv[cfg.items[i]] = s.inventory[i];
  }
  json objs = json::array();
  for (const auto& o : s.objects) objs.push_back({cfg.object_types.at(o.type).name, o.x, o.y, o.state});
  return {{"agent", {s.agent.x, s.agent.y}}, {"inventory", inv}, {"objects", objs}};
}

GridState state_from_json(const json& j, const WorldConfig& cfg) {
  GridState s = cfg.empty_state();
  s.agent = {j.at("agent").at(0).get<int>(), j.at("agent").at(1).get<int>()};
  for (const auto& [name, count] : j.at("inventory").items()) {
    const int c = count.get<int>();
    if (c < 0 || c > 255) throw std::invalid_argument("bad inventory count for '" + name + "'");
    s.inventory[cfg.item_id(name)] = static_cast<std::uint8_t>(c);
  }
  for (const auto& o : j.at("objects")) {
    s.objects.push_back({static_cast<std::uint16_t>(cfg.object_type_id(o.at(0).get<std::string>())),
                         static_cast<std::int16_t>(o.at(1).get<int>()), static_cast<std::int16_t>(o.at(2).get<int>()),
                         static_cast<std::uint8_t>(o.at(3).get<int>())});
  }
  s.normalize();
  cfg.validate_state(s);
  return s;
}

}  // namespace

std::string encode_state(const GridState& s, const WorldConfig& cfg) { return state_to_json(s, cfg).dump(); }

GridState decode_state(const std::string& text, const WorldConfig& cfg) {
  return state_from_json(json::parse(text), cfg);
}

void write_dataset(std::ostream& out, const std::vector<Demonstration>& demos, const WorldConfig& cfg) {
  json header = {{"format", "rsg-dataset"},
                 {"version", kDatasetFormatVersion},
                 {"world_schema", hex(schema_hash(cfg))},
                 {"count", demos.size()}};
  out << header.dump() << '\n';
  for (const auto& d : demos) {
    json states = json::array();
    for (const auto& s : d.states) states.push_back(state_to_json(s, cfg));
    json actions = json::array();
    for (Action a : d.actions) actions.push_back(std::string(action_name(a)));
    json rec = {{"task", unparse(d.task)}, {"states", states}, {"actions", actions}};
    out << rec.dump() << '\n';
  }
}

std::vector<Demonstration> read_dataset(std::istream& in, const WorldConfig& cfg) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<Demonstration> demos;
  std::size_t expected = 0;
  bool have_header = false;
  const auto vocab = cfg.vocabulary();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("format", "") != "rsg-dataset") throw std::invalid_argument("missing rsg-dataset header");
        if (j.at("version").get<int>() != kDatasetFormatVersion) {
          throw std::invalid_argument("unsupported dataset version " + j.at("version").dump());
        }
        if (j.at("world_schema").get<std::string>() != hex(schema_hash(cfg))) {
          throw std::invalid_argument("dataset was written for a different world schema");
        }
        expected = j.at("count").get<std::size_t>();
        have_header = true;
        continue;
      }
      Demonstration d;
      d.task = parse_task(j.at("task").get<std::string>());
      validate_vocabulary(d.task, vocab);
      for (const auto& s : j.at("states")) d.states.push_back(state_from_json(s, cfg));
      for (const auto& a : j.at("actions")) d.actions.push_back(parse_action(a.get<std::string>()));
      check_replay(d, cfg);
      demos.push_back(std::move(d));
    } catch (const DatasetFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw DatasetFormatError(lineno, e.what());
    }
  }
  if (!have_header) throw DatasetFormatError(lineno, "empty dataset");
  if (demos.size() != expected) {
    throw DatasetFormatError(lineno, "header announces " + std::to_string(expected) + " records, found " +
                                         std::to_string(demos.size()));
  }
  return demos;
}

void save_dataset(const std::filesystem::path& path, const std::vector<Demonstration>& demos, const WorldConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset(out, demos, cfg);
}

std::vector<Demonstration> load_dataset(const std::filesystem::path& path, const WorldConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_dataset(in, cfg);
}

}  // namespace rsg
