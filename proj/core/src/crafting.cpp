#include "rsg/crafting.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rsg/hash.hpp"

namespace rsg {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kUp: return "up";
    case Action::kDown: return "down";
    case Action::kLeft: return "left";
    case Action::kRight: return "right";
    case Action::kToggle: return "toggle";
  }
  return "?";
}

Action parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown action '" + std::string(name) + "'");
}

namespace {

constexpr std::array<std::pair<ObjectClass, std::string_view>, 7> kClassNames = {{
    {ObjectClass::kObstacle, "obstacle"},
    {ObjectClass::kRiver, "river"},
    {ObjectClass::kDoor, "door"},
    {ObjectClass::kSwitch, "switch"},
    {ObjectClass::kItem, "item"},
    {ObjectClass::kResource, "resource"},
    {ObjectClass::kStation, "station"},
}};

}  // namespace

std::string_view object_class_name(ObjectClass c) {
  for (const auto& [cls, name] : kClassNames) {
    if (cls == c) return name;
  }
  return "?";
}

ObjectClass parse_object_class(std::string_view name) {
  for (const auto& [cls, n] : kClassNames) {
    if (n == name) return cls;
  }
  throw std::invalid_argument("unknown object class '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// GridState

int GridState::inventory_total() const { return std::accumulate(inventory.begin(), inventory.end(), 0); }

const MapObject* GridState::object_at(int x, int y) const {
  auto it = std::lower_bound(objects.begin(), objects.end(), std::make_pair(y, x),
                             [](const MapObject& o, const std::pair<int, int>& yx) {
                               return std::make_pair(static_cast<int>(o.y), static_cast<int>(o.x)) < yx;
                             });
  if (it != objects.end() && it->x == x && it->y == y) return &*it;
  return nullptr;
}

bool GridState::any_switch_on(const WorldConfig& cfg) const {
  return std::any_of(objects.begin(), objects.end(), [&](const MapObject& o) {
    return cfg.object_types[o.type].cls == ObjectClass::kSwitch && o.state != 0;
  });
}

void GridState::normalize() {
  std::sort(objects.begin(), objects.end(), [](const MapObject& a, const MapObject& b) {
    return std::tie(a.y, a.x, a.type, a.state) < std::tie(b.y, b.x, b.type, b.state);
  });
}

std::size_t GridStateHash::operator()(const GridState& s) const noexcept {
  Fnv1a h;
  h.add(s.agent.x);
  h.add(s.agent.y);
  for (auto c : s.inventory) h.add(c);
  for (const auto& o : s.objects) {
    h.add(o.type);
    h.add(o.x);
    h.add(o.y);
    h.add(o.state);
  }
  return static_cast<std::size_t>(h.value());
}

// ---------------------------------------------------------------------------
// WorldConfig

namespace {

template <class Range, class Proj>
int find_name(const Range& range, std::string_view name, Proj proj) {
  for (std::size_t i = 0; i < range.size(); ++i) {
    if (proj(range[i]) == name) return static_cast<int>(i);
  }
  return kNoId;
}

}  // namespace

int WorldConfig::item_id(std::string_view name) const {
  int id = find_name(items, name, [](const std::string& s) -> const std::string& { return s; });
  if (id == kNoId) throw std::invalid_argument("unknown item '" + std::string(name) + "'");
  return id;
}

int WorldConfig::object_type_id(std::string_view name) const {
  int id = find_name(object_types, name, [](const ObjectType& t) -> const std::string& { return t.name; });
  if (id == kNoId) throw std::invalid_argument("unknown object type '" + std::string(name) + "'");
  return id;
}

const SubgoalSpec& WorldConfig::subgoal(std::string_view name) const {
  int id = find_name(subgoals, name, [](const SubgoalSpec& g) -> const std::string& { return g.name; });
  if (id == kNoId) throw std::invalid_argument("unknown subgoal '" + std::string(name) + "'");
  return subgoals[id];
}

std::set<SubgoalName> WorldConfig::vocabulary() const {
  std::set<SubgoalName> out;
  for (const auto& g : subgoals) out.insert(g.name);
  return out;
}

std::vector<SubgoalName> WorldConfig::subgoal_names() const {
  std::vector<SubgoalName> out;
  out.reserve(subgoals.size());
  for (const auto& g : subgoals) out.push_back(g.name);
  return out;
}

void WorldConfig::validate() const {
  if (width < 1 || height < 1 || width > 64 || height > 64) throw std::invalid_argument("world: bad grid size");
  if (capacity < 1 || capacity > 255) throw std::invalid_argument("world: capacity must be in [1, 255]");
  auto item_ok = [&](int id) { return id >= 0 && id < static_cast<int>(items.size()); };
  auto type_ok = [&](int id) { return id >= 0 && id < static_cast<int>(object_types.size()); };
  std::set<std::string> seen;
  for (const auto& i : items) {
    if (i.empty() || !seen.insert(i).second) throw std::invalid_argument("world: duplicate or empty item '" + i + "'");
  }
  seen.clear();
  for (const auto& t : object_types) {
    if (t.name.empty() || !seen.insert(t.name).second) {
      throw std::invalid_argument("world: duplicate or empty object type '" + t.name + "'");
    }
    if ((t.cls == ObjectClass::kItem || t.cls == ObjectClass::kResource) && !item_ok(t.yields)) {
      throw std::invalid_argument("world: object type '" + t.name + "' yields no registered item");
    }
    if (t.tool != kNoId && !item_ok(t.tool)) throw std::invalid_argument("world: bad tool on '" + t.name + "'");
    if (t.pass != kNoId && !item_ok(t.pass)) throw std::invalid_argument("world: bad pass item on '" + t.name + "'");
  }
  for (const auto& r : rules) {
    if (!item_ok(r.output)) throw std::invalid_argument("world: rule output is not a registered item");
    if (r.station != kNoId && !type_ok(r.station)) throw std::invalid_argument("world: rule station unknown");
    if (r.tool != kNoId && !item_ok(r.tool)) throw std::invalid_argument("world: rule tool unknown");
    if (r.ingredients.empty()) throw std::invalid_argument("world: rule without ingredients");
    for (const auto& [item, count] : r.ingredients) {
      if (!item_ok(item) || count < 1) throw std::invalid_argument("world: bad rule ingredient");
      if (item == r.output) throw std::invalid_argument("world: rule output among its ingredients");
    }
  }
  seen.clear();
  for (const auto& g : subgoals) {
    if (g.name.empty() || !seen.insert(g.name).second) {
      throw std::invalid_argument("world: duplicate or empty subgoal '" + g.name + "'");
    }
    if (g.kind == SubgoalKind::kHasItem && !item_ok(g.item)) {
      throw std::invalid_argument("world: subgoal '" + g.name + "' names no registered item");
    }
  }
  validate_state(initial);
}

void WorldConfig::validate_state(const GridState& s) const {
  if (s.inventory.size() != items.size()) throw std::invalid_argument("state: inventory size mismatch");
  if (s.inventory_total() > capacity) throw std::invalid_argument("state: inventory exceeds capacity");
  auto in_bounds = [&](int x, int y) { return x >= 0 && y >= 0 && x < width && y < height; };
  if (!in_bounds(s.agent.x, s.agent.y)) throw std::invalid_argument("state: agent out of bounds");
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const auto& o = s.objects[i];
    if (o.type >= object_types.size()) throw std::invalid_argument("state: unknown object type id");
    if (!in_bounds(o.x, o.y)) throw std::invalid_argument("state: object out of bounds");
    if (i > 0) {
      const auto& p = s.objects[i - 1];
      if (std::tie(p.y, p.x) >= std::tie(o.y, o.x)) throw std::invalid_argument("state: objects unsorted or stacked");
    }
  }
  if (const MapObject* o = s.object_at(s.agent.x, s.agent.y)) {
    if (object_types[o->type].cls == ObjectClass::kObstacle) throw std::invalid_argument("state: agent inside a wall");
  }
}

GridState WorldConfig::empty_state() const {
  GridState s;
  s.inventory.assign(items.size(), 0);
  return s;
}

WorldConfig default_world() {
  WorldConfig cfg;
  cfg.width = 8;
  cfg.height = 8;
  cfg.capacity = 6;
  cfg.items = {"axe",       "pickaxe",    "key",   "wood",       "coal", "iron-ore",
               "gold-ore",  "wood-plank", "stick", "iron-ingot", "boat"};
  auto item = [&](std::string_view n) { return cfg.item_id(n); };
  cfg.object_types = {
      {"wall", ObjectClass::kObstacle, kNoId, kNoId},
      {"river", ObjectClass::kRiver, kNoId, kNoId, item("boat")},
      {"door", ObjectClass::kDoor, kNoId, kNoId, item("key")},
      {"switch", ObjectClass::kSwitch, kNoId, kNoId},
      {"axe", ObjectClass::kItem, item("axe"), kNoId},
      {"pickaxe", ObjectClass::kItem, item("pickaxe"), kNoId},
      {"key", ObjectClass::kItem, item("key"), kNoId},
      {"tree", ObjectClass::kResource, item("wood"), item("axe")},
      {"coal-deposit", ObjectClass::kResource, item("coal"), item("pickaxe")},
      {"iron-deposit", ObjectClass::kResource, item("iron-ore"), item("pickaxe")},
      {"gold-deposit", ObjectClass::kResource, item("gold-ore"), item("pickaxe")},
      {"workbench", ObjectClass::kStation, kNoId, kNoId},
      {"furnace", ObjectClass::kStation, kNoId, kNoId},
      {"shipyard", ObjectClass::kStation, kNoId, kNoId},
  };
  auto type = [&](std::string_view n) { return cfg.object_type_id(n); };
  cfg.rules = {
      {item("wood-plank"), type("workbench"), kNoId, {{item("wood"), 1}}},
      {item("stick"), type("workbench"), kNoId, {{item("wood-plank"), 1}}},
      {item("iron-ingot"), type("furnace"), kNoId, {{item("coal"), 1}, {item("iron-ore"), 1}}},
      {item("boat"), type("shipyard"), item("axe"), {{item("wood-plank"), 1}}},
  };
  auto has = [&](std::string name, std::string_view it) {
    return SubgoalSpec{std::move(name), SubgoalKind::kHasItem, item(it)};
  };
  cfg.subgoals = {
      has("grab-axe", "axe"),
      has("grab-pickaxe", "pickaxe"),
      has("grab-key", "key"),
      SubgoalSpec{"toggle-switch", SubgoalKind::kSwitchOn, kNoId},
      has("mine-wood", "wood"),
      has("mine-coal", "coal"),
      has("mine-iron-ore", "iron-ore"),
      has("mine-gold-ore", "gold-ore"),
      has("craft-wood-plank", "wood-plank"),
      has("craft-stick", "stick"),
      has("craft-iron-ingot", "iron-ingot"),
      has("craft-boat", "boat"),
  };
  cfg.initial = cfg.empty_state();
  return cfg;
}

// ---------------------------------------------------------------------------
// Dynamics

namespace {

bool passable(const GridState& s, const MapObject* o, const WorldConfig& cfg) {
  if (o == nullptr) return true;
  const ObjectType& type = cfg.object_types[o->type];
  switch (type.cls) {
    case ObjectClass::kObstacle: return false;
    case ObjectClass::kRiver: return s.has(type.pass);
    case ObjectClass::kDoor: return s.any_switch_on(cfg) || s.has(type.pass);
    default: return true;
  }
}

void remove_object(GridState& s, const MapObject* o) {
  s.objects.erase(s.objects.begin() + (o - s.objects.data()));
}

void toggle(GridState& s, const WorldConfig& cfg) {
  const MapObject* o = s.object_at(s.agent.x, s.agent.y);
  if (o == nullptr) return;
  const ObjectType& type = cfg.object_types[o->type];
  const int total = s.inventory_total();
  switch (type.cls) {
    case ObjectClass::kItem:
      if (total < cfg.capacity) {
        ++s.inventory[type.yields];
        remove_object(s, o);
      }
      return;
    case ObjectClass::kResource:
      if (total < cfg.capacity && (type.tool == kNoId || s.has(type.tool))) {
        ++s.inventory[type.yields];
        remove_object(s, o);
      }
      return;
    case ObjectClass::kSwitch:
      s.objects[o - s.objects.data()].state ^= 1;
      return;
    case ObjectClass::kStation:
      for (const auto& rule : cfg.rules) {
        if (rule.station != o->type) continue;
        if (rule.tool != kNoId && !s.has(rule.tool)) continue;
        int consumed = 0;
        bool ok = true;
        for (const auto& [item, count] : rule.ingredients) {
          ok = ok && s.inventory[item] >= count;
          consumed += count;
        }
        if (!ok || total - consumed + 1 > cfg.capacity) continue;
        for (const auto& [item, count] : rule.ingredients) s.inventory[item] = static_cast<std::uint8_t>(s.inventory[item] - count);
        ++s.inventory[rule.output];
        return;
      }
      return;
    default: return;
  }
}

}  // namespace

GridState transition(const GridState& s, Action a, const WorldConfig& cfg) {
  GridState next = s;
  if (a == Action::kToggle) {
    toggle(next, cfg);
    return next;
  }
  int dx = 0;
  int dy = 0;
  switch (a) {
    case Action::kUp: dy = -1; break;
    case Action::kDown: dy = 1; break;
    case Action::kLeft: dx = -1; break;
    case Action::kRight: dx = 1; break;
    default: break;
  }
  const int x = s.agent.x + dx;
  const int y = s.agent.y + dy;
  if (x < 0 || y < 0 || x >= cfg.width || y >= cfg.height) return next;
  if (!passable(s, s.object_at(x, y), cfg)) return next;
  next.agent = {x, y};
  return next;
}

// ---------------------------------------------------------------------------
// Goal predicates

bool oracle_holds(const SubgoalSpec& spec, const GridState& s, const WorldConfig& cfg) {
  switch (spec.kind) {
    case SubgoalKind::kHasItem: return s.has(spec.item);
    case SubgoalKind::kSwitchOn: return s.any_switch_on(cfg);
  }
  return false;
}

GoalTest oracle_goal(std::string_view subgoal, const WorldConfig& cfg) {
  const SubgoalSpec spec = cfg.subgoal(subgoal);
  return [spec, &cfg](const GridState& s) { return oracle_holds(spec, s, cfg); };
}

GoalTestMap<GridState> oracle_tests(const WorldConfig& cfg) {
  GoalTestMap<GridState> out;
  for (const auto& g : cfg.subgoals) out.emplace(g.name, oracle_goal(g.name, cfg));
  return out;
}

// ---------------------------------------------------------------------------
// Features

std::vector<std::string> feature_schema(const WorldConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& i : cfg.items) out.push_back("inv:" + i);
  for (const char* prefix : {"map:", "at:", "adj:"}) {
    for (const auto& t : cfg.object_types) out.push_back(prefix + t.name);
  }
  out.emplace_back("door-open");
  out.emplace_back("switch-on");
  return out;
}

std::uint64_t schema_hash(const WorldConfig& cfg) {
  Fnv1a h;
  for (const auto& f : feature_schema(cfg)) h.add_string(f);
  for (const auto& g : cfg.subgoals) h.add_string(g.name);
  return h.value();
}

std::vector<std::uint16_t> active_features(const GridState& s, const WorldConfig& cfg) {
  const auto n_items = static_cast<std::uint16_t>(cfg.items.size());
  const auto n_types = static_cast<std::uint16_t>(cfg.object_types.size());
  std::vector<char> on(n_items + 3 * n_types + 2, 0);
  for (std::uint16_t i = 0; i < n_items; ++i) on[i] = s.inventory[i] > 0;
  bool switch_on = false;
  for (const auto& o : s.objects) {
    on[n_items + o.type] = 1;
    const int dist = std::abs(o.x - s.agent.x) + std::abs(o.y - s.agent.y);
    if (dist == 0) on[n_items + n_types + o.type] = 1;
    if (dist == 1) on[n_items + 2 * n_types + o.type] = 1;
    if (cfg.object_types[o.type].cls == ObjectClass::kSwitch && o.state) switch_on = true;
  }
  on[n_items + 3 * n_types] = switch_on;
  on[n_items + 3 * n_types + 1] = switch_on;
  std::vector<std::uint16_t> out;
  for (std::size_t i = 0; i < on.size(); ++i) {
    if (on[i]) out.push_back(static_cast<std::uint16_t>(i));
  }
  return out;
}

FeatureVector features(const GridState& s, const WorldConfig& cfg) {
  FeatureVector phi(cfg.items.size() + 3 * cfg.object_types.size() + 2, 0.0);
  for (auto i : active_features(s, cfg)) phi[i] = 1.0;
  return phi;
}

// ---------------------------------------------------------------------------
// Display

namespace {

char glyph(const std::string& type) {
  static const std::map<std::string, char, std::less<>> kGlyphs = {
      {"wall", '#'},         {"river", '~'},        {"door", 'D'},         {"switch", 's'},
      {"axe", 'a'},          {"pickaxe", 'p'},      {"key", 'k'},          {"tree", 'T'},
      {"coal-deposit", 'c'}, {"iron-deposit", 'i'}, {"gold-deposit", 'g'}, {"workbench", 'W'},
      {"furnace", 'F'},      {"shipyard", 'S'},
  };
  auto it = kGlyphs.find(type);
  return it != kGlyphs.end() ? it->second : '?';
}

}  // namespace

std::string describe(const GridState& s, const WorldConfig& cfg) {
  std::ostringstream out;
  out << "agent=(" << s.agent.x << "," << s.agent.y << ") inv={";
  bool first = true;
  for (std::size_t i = 0; i < s.inventory.size(); ++i) {
    if (s.inventory[i] == 0) continue;
    if (!first) out << ',';
    first = false;
    out << cfg.items[i];
    if (s.inventory[i] > 1) out << 'x' << static_cast<int>(s.inventory[i]);
  }
  out << '}';
  if (s.any_switch_on(cfg)) out << " switch=on";
  return out.str();
}

std::string render_ascii(const GridState& s, const WorldConfig& cfg, const std::vector<Pos>& path) {
  std::vector<std::string> rows(cfg.height, std::string(cfg.width, '.'));
  for (const auto& p : path) {
    if (p.y >= 0 && p.y < cfg.height && p.x >= 0 && p.x < cfg.width) rows[p.y][p.x] = '*';
  }
  for (const auto& o : s.objects) rows[o.y][o.x] = glyph(cfg.object_types[o.type].name);
  rows[s.agent.y][s.agent.x] = '@';
  std::string out;
  for (const auto& r : rows) {
    out += r;
    out += '\n';
  }
  return out;
}

}  // namespace rsg
