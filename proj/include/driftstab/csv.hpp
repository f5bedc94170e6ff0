#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace driftstab::csv {

// Round-trip exact float formatting (17 significant digits).
inline std::string f17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// FNV-1a over a byte string; used to stamp resolved configs into CSV
// header comments.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hash_hex(std::string_view bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(bytes)));
  return buf;
}

}  // namespace driftstab::csv
