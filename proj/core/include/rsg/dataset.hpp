#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsg/demo.hpp"

namespace rsg {

class DatasetFormatError : public std::runtime_error {
 public:
  DatasetFormatError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr int kDatasetFormatVersion = 1;

// JSON lines. The first line is a header
//   {"format":"rsg-dataset","version":1,"world_schema":"<hex>","count":N}
// followed by one demonstration per line:
//   {"task":"...","states":[{"agent":[x,y],"inventory":{"wood":1},
//     "objects":[["tree",x,y,state],...]}],"actions":["up",...]}
std::string encode_state(const GridState& s, const WorldConfig& cfg);
GridState decode_state(const std::string& json, const WorldConfig& cfg);

void write_dataset(std::ostream& out, const std::vector<Demonstration>& demos, const WorldConfig& cfg);
// Validates the header, the schema hash, every task against the vocabulary and
// that each record replays.
std::vector<Demonstration> read_dataset(std::istream& in, const WorldConfig& cfg);

void save_dataset(const std::filesystem::path& path, const std::vector<Demonstration>& demos, const WorldConfig& cfg);
std::vector<Demonstration> load_dataset(const std::filesystem::path& path, const WorldConfig& cfg);

}  // namespace rsg
