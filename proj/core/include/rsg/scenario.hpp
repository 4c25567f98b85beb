#pragma once

#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rsg/crafting.hpp"
#include "rsg/task.hpp"

namespace rsg {

// Map families. `door` walls off the gold deposit behind a door; `river` puts
// it across a river.
enum class Layout { kOpen, kDoor, kRiver };

std::string_view layout_name(Layout l);
Layout parse_layout(std::string_view name);

struct Scenario {
  TaskAst task;
  std::vector<std::string> inventory;  // items placed in the starting inventory
  Layout layout = Layout::kOpen;
};

// `TASK [| inventory=a,b] [| layout=door]`; blank lines and '#' comments are
// skipped by read_scenarios.
Scenario parse_scenario(std::string_view line, const WorldConfig& cfg);
std::string format_scenario(const Scenario& sc);
std::vector<Scenario> read_scenarios(std::istream& in, const WorldConfig& cfg);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path, const WorldConfig& cfg);

// Random start state for a scenario: every catalog object once (two trees),
// a few walls on open maps, and the agent on a free cell left of any barrier.
GridState sample_state(const WorldConfig& cfg, const Scenario& sc, std::mt19937_64& rng);

}  // namespace rsg
