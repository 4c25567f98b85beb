#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <type_traits>

namespace rsg {

// 64-bit FNV-1a, fed field by field.
class Fnv1a {
 public:
  template <class T>
    requires std::is_trivially_copyable_v<T>
  void add(const T& v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    add_bytes(bytes, sizeof(T));
  }
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add_string(std::string_view s) {
    add(static_cast<std::uint64_t>(s.size()));
    add_bytes(s.data(), s.size());
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace rsg
