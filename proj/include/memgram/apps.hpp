#pragma once

#include "memgram/mem.hpp"

namespace memgram {

// Relative Lempel-Ziv: T as a minimum-length sequence of reference substrings,
// derived from the MEMs of T against the indexed reference.
struct rlz_phrase {
  uint64_t a = 0, b = 0;  // 1-based inclusive positions in R
  bool operator==(const rlz_phrase& o) const = default;
};

// Throws std::invalid_argument naming the first position of T whose symbol
// does not occur in the reference.
std::vector<rlz_phrase> rlz_compress(const mem_index& ref, std::span<const symbol_id> text,
                                     mem_algo algo = mem_algo::automatic);
sym_string rlz_decompress(std::span<const symbol_id> reference,
                          const std::vector<rlz_phrase>& phrases);

// Overlap graph edges: the length-len suffix of read `from` equals the
// length-len prefix of read `to`.
struct overlap_edge {
  uint32_t from = 0, to = 0;  // 0-based read ids
  uint64_t len = 0;
  bool operator==(const overlap_edge& o) const = default;
};

struct overlap_options {
  uint64_t lmin = 1;
  bool all_matches = false;  // default: longest overlap per ordered pair
  uint64_t seed = 0;
  uint32_t retries = 3;
  // instrumentation: called after every real step with the engine state hash
  std::function<void(uint32_t read, uint32_t j, uint64_t hash)> hash_probe;
};

// Indexes the $-terminated concatenation of the reads and slides every read
// over it, simulating a terminator after each prefix and rolling back.
std::vector<overlap_edge> all_pairs_suffix_prefix(const std::vector<sym_string>& reads,
                                                  const overlap_options& opts);

}  // namespace memgram
