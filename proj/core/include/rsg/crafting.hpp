#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsg/task.hpp"

namespace rsg {

enum class Action : std::uint8_t { kUp, kDown, kLeft, kRight, kToggle };
inline constexpr std::array<Action, 5> kAllActions = {Action::kUp, Action::kDown, Action::kLeft, Action::kRight,
                                                      Action::kToggle};

std::string_view action_name(Action a);
Action parse_action(std::string_view name);  // throws std::invalid_argument

enum class ObjectClass : std::uint8_t { kObstacle, kRiver, kDoor, kSwitch, kItem, kResource, kStation };

std::string_view object_class_name(ObjectClass c);
ObjectClass parse_object_class(std::string_view name);

inline constexpr int kNoId = -1;

struct ObjectType {
  std::string name;
  ObjectClass cls = ObjectClass::kObstacle;
  int yields = kNoId;  // item picked up (kItem) or mined (kResource)
  int tool = kNoId;    // item required to mine
  int pass = kNoId;    // item that lets the agent cross a river or a closed door
};

struct CraftingRule {
  int output = kNoId;   // item
  int station = kNoId;  // object type
  int tool = kNoId;     // item, kept
  std::vector<std::pair<int, int>> ingredients;  // (item, count), consumed
};

enum class SubgoalKind : std::uint8_t { kHasItem, kSwitchOn };

struct SubgoalSpec {
  SubgoalName name;
  SubgoalKind kind = SubgoalKind::kHasItem;
  int item = kNoId;
};

struct MapObject {
  std::uint16_t type = 0;
  std::int16_t x = 0;
  std::int16_t y = 0;
  std::uint8_t state = 0;  // switches: 1 when on

  friend auto operator<=>(const MapObject&, const MapObject&) = default;
};

struct WorldConfig;

struct Pos {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Pos&, const Pos&) = default;
};

// Full environment state. Objects are kept sorted by (y, x); at most one
// object occupies a cell. Doors are open exactly when some switch is on.
struct GridState {
  Pos agent;
  std::vector<std::uint8_t> inventory;  // count per item id
  std::vector<MapObject> objects;

  int inventory_total() const;
  bool has(int item) const { return item >= 0 && item < static_cast<int>(inventory.size()) && inventory[item] > 0; }
  const MapObject* object_at(int x, int y) const;
  bool any_switch_on(const WorldConfig& cfg) const;
  void normalize();  // restores the object order

  friend bool operator==(const GridState&, const GridState&) = default;
};

struct GridStateHash {
  std::size_t operator()(const GridState& s) const noexcept;
};

struct WorldConfig {
  int width = 8;
  int height = 8;
  int capacity = 6;
  std::vector<std::string> items;
  std::vector<ObjectType> object_types;
  std::vector<CraftingRule> rules;  // first applicable rule fires
  std::vector<SubgoalSpec> subgoals;
  GridState initial;

  int item_id(std::string_view name) const;         // throws std::invalid_argument
  int object_type_id(std::string_view name) const;  // throws std::invalid_argument
  const SubgoalSpec& subgoal(std::string_view name) const;
  std::set<SubgoalName> vocabulary() const;
  std::vector<SubgoalName> subgoal_names() const;

  // Throws std::invalid_argument describing the first inconsistency.
  void validate() const;
  void validate_state(const GridState& s) const;
  GridState empty_state() const;
};

// Built-in catalog: 11 items, 14 object types, 4 rules and 12 subgoals, on an
// empty 8x8 map.
WorldConfig default_world();

GridState transition(const GridState& s, Action a, const WorldConfig& cfg);

inline constexpr double kStepCost = 0.1;
inline double step_cost(const GridState&, Action) { return kStepCost; }

using GoalTest = std::function<bool(const GridState&)>;
GoalTest oracle_goal(std::string_view subgoal, const WorldConfig& cfg);  // throws std::invalid_argument
bool oracle_holds(const SubgoalSpec& spec, const GridState& s, const WorldConfig& cfg);
GoalTestMap<GridState> oracle_tests(const WorldConfig& cfg);

// Binary feature schema: inv:<item>, map:<type>, at:<type>, adj:<type>,
// door-open, switch-on.
std::vector<std::string> feature_schema(const WorldConfig& cfg);
std::uint64_t schema_hash(const WorldConfig& cfg);

using FeatureVector = std::vector<double>;
FeatureVector features(const GridState& s, const WorldConfig& cfg);
// Indices of the nonzero entries of features(s, cfg), ascending.
std::vector<std::uint16_t> active_features(const GridState& s, const WorldConfig& cfg);

// One-line summary: agent position and inventory.
std::string describe(const GridState& s, const WorldConfig& cfg);
// Map rendering; `path` cells are drawn with '*'.
std::string render_ascii(const GridState& s, const WorldConfig& cfg, const std::vector<Pos>& path = {});

}  // namespace rsg
