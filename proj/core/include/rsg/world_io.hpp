#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rsg/crafting.hpp"

namespace rsg {

class WorldFormatError : public std::runtime_error {
 public:
  WorldFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("world file line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr int kWorldFormatVersion = 1;

// Line-oriented text format, first line `rsg-world 1`. '#' starts a comment.
//   size W H | capacity N | item NAME
//   object NAME CLASS [yields=ITEM] [tool=ITEM] [pass=ITEM]
//   rule OUTPUT [station=TYPE] [tool=ITEM] ingredients=ITEM[,ITEM...]
//   subgoal NAME has ITEM | subgoal NAME switch-on
//   agent X Y | inventory ITEM[,ITEM...] | place TYPE X Y [STATE]
WorldConfig read_world(std::istream& in);
void write_world(std::ostream& out, const WorldConfig& cfg);

WorldConfig load_world(const std::filesystem::path& path);
void save_world(const std::filesystem::path& path, const WorldConfig& cfg);

}  // namespace rsg
