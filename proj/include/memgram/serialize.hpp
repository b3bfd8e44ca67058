#pragma once

#include <iosfwd>

#include "memgram/index.hpp"

namespace memgram {

// Versioned little-endian binary bundle. Layout (all integers fixed width):
//   magic "MGIX", u32 version, u64 text length, u32 alphabet size,
//   u64 kr base, u8 has_levels,
//   grammar: u32 rule count, u32 start id, rules as
//     (u8 tag) tag 0: u32 t, t * u32 child ids; tag 1: u32 base, u64 count
//   levels (if present): u64 effective seed, u32 creation level per rule
//   footer: u64 FNV-1a checksum of everything before it
// Grid, Patricia trees and parse levels are rebuilt deterministically from
// the grammar and the stored seed on load.
inline constexpr uint32_t BUNDLE_VERSION = 1;

void save_bundle(const mem_index& ix, std::ostream& out);
mem_index load_bundle(std::istream& in);

void save_bundle_file(const mem_index& ix, const std::string& path);
mem_index load_bundle_file(const std::string& path);

// Plain grammar interchange (the --grammar-in hook): same rule encoding as the
// bundle, without levels:
//   magic "MGRL", u32 version, u64 text length, u32 rule count, u32 start,
//   rules, u64 checksum
void save_grammar_file(const rlcfg& g, const std::string& path);
rlcfg load_grammar_file(const std::string& path);

}  // namespace memgram
