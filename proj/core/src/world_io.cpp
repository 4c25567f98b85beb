#include "rsg/world_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace rsg {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct LineReader {
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& what) const { throw WorldFormatError(line, what); }

  int to_int(const std::string& s) const {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) fail("bad integer '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad integer '" + s + "'");
    }
  }
};

// key=value options after the positional fields.
std::map<std::string, std::string> options(const std::vector<std::string>& words, std::size_t from,
                                           const LineReader& r) {
  std::map<std::string, std::string> out;
  for (std::size_t i = from; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string::npos) r.fail("expected key=value, got '" + words[i] + "'");
    out[words[i].substr(0, eq)] = words[i].substr(eq + 1);
  }
  return out;
}

}  // namespace

WorldConfig read_world(std::istream& in) {
  WorldConfig cfg;
  cfg.items.clear();
  LineReader r;
  std::string raw;
  bool header = false;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> deferred;  // lines resolved after the catalog

  while (std::getline(in, raw)) {
    ++r.line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> w;
    for (std::string tok; ls >> tok;) w.push_back(tok);
    if (w.empty()) continue;

    if (!header) {
      if (w.size() != 2 || w[0] != "rsg-world") r.fail("missing 'rsg-world <version>' header");
      if (r.to_int(w[1]) != kWorldFormatVersion) r.fail("unsupported world format version " + w[1]);
      header = true;
      continue;
    }
    const std::string& kw = w[0];
    if (kw == "size") {
      if (w.size() != 3) r.fail("size takes W H");
      cfg.width = r.to_int(w[1]);
      cfg.height = r.to_int(w[2]);
    } else if (kw == "capacity") {
      if (w.size() != 2) r.fail("capacity takes one number");
      cfg.capacity = r.to_int(w[1]);
    } else if (kw == "item") {
      if (w.size() != 2) r.fail("item takes a name");
      cfg.items.push_back(w[1]);
    } else {
      deferred.emplace_back(std::move(w), r.line);
    }
  }
  if (!header) throw WorldFormatError(0, "empty world file");

  auto item = [&](const std::string& name) {
    try {
      return cfg.item_id(name);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  };
  auto type = [&](const std::string& name) {
    try {
      return cfg.object_type_id(name);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  };

  // Object types first so rules and placements can refer to them in any order.
  for (const auto& [w, line] : deferred) {
    if (w[0] != "object") continue;
    r.line = line;
    if (w.size() < 3) r.fail("object takes NAME CLASS");
    ObjectType t;
    t.name = w[1];
    try {
      t.cls = parse_object_class(w[2]);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    for (const auto& [k, v] : options(w, 3, r)) {
      if (k == "yields") t.yields = item(v);
      else if (k == "tool") t.tool = item(v);
      else if (k == "pass") t.pass = item(v);
      else r.fail("unknown object option '" + k + "'");
    }
    cfg.object_types.push_back(std::move(t));
  }

  cfg.initial = cfg.empty_state();
  for (const auto& [w, line] : deferred) {
    r.line = line;
    const std::string& kw = w[0];
    if (kw == "object") continue;
    if (kw == "rule") {
      if (w.size() < 3) r.fail("rule takes OUTPUT and options");
      CraftingRule rule;
      rule.output = item(w[1]);
      for (const auto& [k, v] : options(w, 2, r)) {
        if (k == "station") {
          rule.station = type(v);
        } else if (k == "tool") {
          rule.tool = item(v);
        } else if (k == "ingredients") {
          std::map<int, int> counts;
          for (const auto& name : split(v, ',')) ++counts[item(name)];
          rule.ingredients.assign(counts.begin(), counts.end());
        } else {
          r.fail("unknown rule option '" + k + "'");
        }
      }
      cfg.rules.push_back(std::move(rule));
    } else if (kw == "subgoal") {
      if (w.size() == 4 && w[2] == "has") {
        cfg.subgoals.push_back({w[1], SubgoalKind::kHasItem, item(w[3])});
      } else if (w.size() == 3 && w[2] == "switch-on") {
        cfg.subgoals.push_back({w[1], SubgoalKind::kSwitchOn, kNoId});
      } else {
        r.fail("subgoal takes NAME has ITEM or NAME switch-on");
      }
    } else if (kw == "agent") {
      if (w.size() != 3) r.fail("agent takes X Y");
      cfg.initial.agent = {r.to_int(w[1]), r.to_int(w[2])};
    } else if (kw == "inventory") {
      if (w.size() != 2) r.fail("inventory takes a comma-separated item list");
      for (const auto& name : split(w[1], ',')) ++cfg.initial.inventory[item(name)];
    } else if (kw == "place") {
      if (w.size() != 4 && w.size() != 5) r.fail("place takes TYPE X Y [STATE]");
      MapObject o;
      o.type = static_cast<std::uint16_t>(type(w[1]));
      o.x = static_cast<std::int16_t>(r.to_int(w[2]));
      o.y = static_cast<std::int16_t>(r.to_int(w[3]));
      o.state = w.size() == 5 ? static_cast<std::uint8_t>(r.to_int(w[4])) : 0;
      cfg.initial.objects.push_back(o);
    } else {
      r.fail("unknown directive '" + kw + "'");
    }
  }
  cfg.initial.normalize();
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw WorldFormatError(r.line, e.what());
  }
  return cfg;
}

void write_world(std::ostream& out, const WorldConfig& cfg) {
  out << "rsg-world " << kWorldFormatVersion << '\n';
  out << "size " << cfg.width << ' ' << cfg.height << '\n';
  out << "capacity " << cfg.capacity << '\n';
  for (const auto& i : cfg.items) out << "item " << i << '\n';
  for (const auto& t : cfg.object_types) {
    out << "object " << t.name << ' ' << object_class_name(t.cls);
    if (t.yields != kNoId) out << " yields=" << cfg.items[t.yields];
    if (t.tool != kNoId) out << " tool=" << cfg.items[t.tool];
    if (t.pass != kNoId) out << " pass=" << cfg.items[t.pass];
    out << '\n';
  }
  for (const auto& rule : cfg.rules) {
    out << "rule " << cfg.items[rule.output];
    if (rule.station != kNoId) out << " station=" << cfg.object_types[rule.station].name;
    if (rule.tool != kNoId) out << " tool=" << cfg.items[rule.tool];
    out << " ingredients=";
    bool first = true;
    for (const auto& [item, count] : rule.ingredients) {
      for (int c = 0; c < count; ++c) {
        if (!first) out << ',';
        first = false;
        out << cfg.items[item];
      }
    }
    out << '\n';
  }
  for (const auto& g : cfg.subgoals) {
    out << "subgoal " << g.name;
    if (g.kind == SubgoalKind::kHasItem) out << " has " << cfg.items[g.item] << '\n';
    else out << " switch-on\n";
  }
  out << "agent " << cfg.initial.agent.x << ' ' << cfg.initial.agent.y << '\n';
  std::string inv;
  for (std::size_t i = 0; i < cfg.initial.inventory.size(); ++i) {
    for (int c = 0; c < cfg.initial.inventory[i]; ++c) {
      if (!inv.empty()) inv += ',';
      inv += cfg.items[i];
    }
  }
  if (!inv.empty()) out << "inventory " << inv << '\n';
  for (const auto& o : cfg.initial.objects) {
    out << "place " << cfg.object_types[o.type].name << ' ' << o.x << ' ' << o.y;
    if (o.state != 0) out << ' ' << static_cast<int>(o.state);
    out << '\n';
  }
}

WorldConfig load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path.string());
  return read_world(in);
}

void save_world(const std::filesystem::path& path, const WorldConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file " + path.string());
  write_world(out, cfg);
}

}  // namespace rsg
