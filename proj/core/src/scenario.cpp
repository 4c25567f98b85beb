#include "rsg/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace rsg {

std::string_view layout_name(Layout l) {
  switch (l) {
    case Layout::kOpen: return "open";
    case Layout::kDoor: return "door";
    case Layout::kRiver: return "river";
  }
  return "?";
}

Layout parse_layout(std::string_view name) {
  for (Layout l : {Layout::kOpen, Layout::kDoor, Layout::kRiver}) {
    if (layout_name(l) == name) return l;
  }
  throw std::invalid_argument("unknown layout '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Scenario parse_scenario(std::string_view line, const WorldConfig& cfg) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto bar = line.find('|', start);
    fields.push_back(trim(line.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  Scenario sc;
  sc.task = parse_task(fields.front());
  validate_vocabulary(sc.task, cfg.vocabulary());
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto& f = fields[i];
    auto eq = f.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("scenario option without '=': '" + f + "'");
    std::string key = trim(f.substr(0, eq));
    std::string value = trim(f.substr(eq + 1));
    if (key == "inventory") {
      std::istringstream in(value);
      for (std::string item; std::getline(in, item, ',');) {
        item = trim(item);
        if (item.empty()) continue;
        cfg.item_id(item);
        sc.inventory.push_back(item);
      }
    } else if (key == "layout") {
      sc.layout = parse_layout(value);
    } else {
      throw std::invalid_argument("unknown scenario option '" + key + "'");
    }
  }
  return sc;
}

std::string format_scenario(const Scenario& sc) {
  std::string out = unparse(sc.task);
  if (!sc.inventory.empty()) {
    out += " | inventory=";
    for (std::size_t i = 0; i < sc.inventory.size(); ++i) {
      if (i > 0) out += ',';
      out += sc.inventory[i];
    }
  }
  if (sc.layout != Layout::kOpen) {
    out += " | layout=";
    out += layout_name(sc.layout);
  }
  return out;
}

std::vector<Scenario> read_scenarios(std::istream& in, const WorldConfig& cfg) {
  std::vector<Scenario> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_scenario(line, cfg));
    } catch (const std::exception& e) {
      throw std::invalid_argument("task list line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path, const WorldConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task list " + path.string());
  return read_scenarios(in, cfg);
}

namespace {

int find_class(const WorldConfig& cfg, ObjectClass cls) {
  for (std::size_t i = 0; i < cfg.object_types.size(); ++i) {
    if (cfg.object_types[i].cls == cls) return static_cast<int>(i);
  }
  return kNoId;
}

// True when every non-wall cell is 4-connected to every other.
bool open_cells_connected(const std::vector<std::vector<char>>& wall, int w, int h) {
  int total = 0;
  Pos seed{-1, -1};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!wall[y][x]) {
        ++total;
        seed = {x, y};
      }
    }
  }
  if (total == 0) return false;
  std::vector<std::vector<char>> seen(h, std::vector<char>(w, 0));
  std::queue<Pos> q;
  q.push(seed);
  seen[seed.y][seed.x] = 1;
  int reached = 0;
  while (!q.empty()) {
    Pos p = q.front();
    q.pop();
    ++reached;
    constexpr int dx[] = {1, -1, 0, 0};
    constexpr int dy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      int nx = p.x + dx[k];
      int ny = p.y + dy[k];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || wall[ny][nx] || seen[ny][nx]) continue;
      seen[ny][nx] = 1;
      q.push({nx, ny});
    }
  }
  return reached == total;
}

}  // namespace

GridState sample_state(const WorldConfig& cfg, const Scenario& sc, std::mt19937_64& rng) {
  const int w = cfg.width;
  const int h = cfg.height;
  GridState s = cfg.empty_state();
  for (const auto& item : sc.inventory) ++s.inventory[cfg.item_id(item)];
  if (s.inventory_total() > cfg.capacity) throw std::invalid_argument("scenario inventory exceeds capacity");

  std::vector<std::vector<char>> taken(h, std::vector<char>(w, 0));
  auto put = [&](int type, int x, int y) {
    s.objects.push_back({static_cast<std::uint16_t>(type), static_cast<std::int16_t>(x), static_cast<std::int16_t>(y), 0});
    taken[y][x] = 1;
  };

  // The last resource type is the prize placed behind the barrier.
  int prize = kNoId;
  for (std::size_t i = 0; i < cfg.object_types.size(); ++i) {
    if (cfg.object_types[i].cls == ObjectClass::kResource) prize = static_cast<int>(i);
  }

  int left_width = w;
  if (sc.layout != Layout::kOpen) {
    if (w < 6) throw std::invalid_argument("door and river layouts need a width of at least 6");
    const int barrier = w - 3;
    left_width = barrier;
    const int cls_type = find_class(cfg, sc.layout == Layout::kDoor ? ObjectClass::kDoor : ObjectClass::kRiver);
    const int wall_type = find_class(cfg, ObjectClass::kObstacle);
    if (cls_type == kNoId || (sc.layout == Layout::kDoor && wall_type == kNoId)) {
      throw std::invalid_argument("world catalog lacks the object types for this layout");
    }
    const int gap = std::uniform_int_distribution<int>(0, h - 1)(rng);
    for (int y = 0; y < h; ++y) {
      if (sc.layout == Layout::kRiver || y == gap) put(cls_type, barrier, y);
      else put(wall_type, barrier, y);
    }
  }

  auto random_free = [&](int x_lo, int x_hi) {
    std::vector<Pos> free;
    for (int y = 0; y < h; ++y) {
      for (int x = x_lo; x < x_hi; ++x) {
        if (!taken[y][x]) free.push_back({x, y});
      }
    }
    if (free.empty()) throw std::invalid_argument("map too small for the object catalog");
    return free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
  };

  if (sc.layout == Layout::kOpen) {
    const int wall_type = find_class(cfg, ObjectClass::kObstacle);
    const int walls = wall_type == kNoId ? 0 : (w * h) / 16;
    for (int placed = 0, tries = 0; placed < walls && tries < 100; ++tries) {
      Pos p = random_free(0, w);
      taken[p.y][p.x] = 1;
      if (!open_cells_connected(taken, w, h)) {
        taken[p.y][p.x] = 0;
        continue;
      }
      taken[p.y][p.x] = 0;
      put(wall_type, p.x, p.y);
      ++placed;
    }
  }

  for (std::size_t t = 0; t < cfg.object_types.size(); ++t) {
    const ObjectType& type = cfg.object_types[t];
    int copies = 0;
    switch (type.cls) {
      case ObjectClass::kItem:
      case ObjectClass::kStation:
      case ObjectClass::kSwitch: copies = 1; break;
      case ObjectClass::kResource: copies = 2; break;
      default: break;
    }
    for (int c = 0; c < copies; ++c) {
      const bool behind = sc.layout != Layout::kOpen && static_cast<int>(t) == prize;
      Pos p = behind ? random_free(left_width + 1, w) : random_free(0, left_width);
      put(static_cast<int>(t), p.x, p.y);
    }
  }
  s.agent = random_free(0, left_width);
  s.normalize();
  cfg.validate_state(s);
  return s;
}

}  // namespace rsg
