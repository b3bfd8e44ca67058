#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace memgram {

// Terminals are byte codes 0..255 plus two reserved sentinels mapped above the
// byte range so raw input bytes can never collide with them.
using symbol_id = uint32_t;
using text_pos = uint64_t;  // 1-based positions in the indexed text

inline constexpr symbol_id SENTINEL_HASH = 256;    // '#'
inline constexpr symbol_id SENTINEL_DOLLAR = 257;  // '$', read terminator
inline constexpr symbol_id NUM_TERMINALS = 258;

inline bool is_terminal(symbol_id s) { return s < NUM_TERMINALS; }

using sym_string = std::vector<symbol_id>;

inline sym_string to_symbols(std::string_view bytes) {
  sym_string out;
  out.reserve(bytes.size());
  for (unsigned char c : bytes) out.push_back(static_cast<symbol_id>(c));
  return out;
}

inline std::string to_bytes(const sym_string& syms) {
  std::string out;
  out.reserve(syms.size());
  for (symbol_id s : syms) {
    if (s >= 256) throw std::runtime_error("to_bytes: sentinel symbol in string");
    out.push_back(static_cast<char>(static_cast<unsigned char>(s)));
  }
  return out;
}

// splitmix64, used to derive independent per-level seeds from one master seed.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace memgram
