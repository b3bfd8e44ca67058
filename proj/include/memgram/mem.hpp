#pragma once

#include "memgram/index.hpp"
#include "memgram/mem_types.hpp"

namespace memgram {

enum class mem_algo {
  automatic,  // lcg when the index has levels, else quadratic
  quadratic,  // active-position sliding window on any RLCFG
  lcg         // cut-set-restricted active positions on the LCG index
};

struct query_stats {
  uint64_t max_active = 0;         // max |R| seen
  uint64_t max_cutset = 0;         // max |M(i,j)| seen
  uint64_t emptiness_queries = 0;  // grid emptiness/expansion probes
};

// Maximal exact matches of P in T, sorted by (i, j), one occurrence end each.
std::vector<mem_record> find_mems(const mem_index& ix, std::span<const symbol_id> pattern,
                                  mem_algo algo = mem_algo::automatic,
                                  query_stats* stats = nullptr);

// Maximal substrings occurring at least k times in T.
std::vector<mem_record> find_kmems(const mem_index& ix, std::span<const symbol_id> pattern,
                                   uint64_t k, mem_algo algo = mem_algo::automatic,
                                   query_stats* stats = nullptr);

// Maximal substrings occurring exactly once in both P and T.
std::vector<mem_record> find_mums(const mem_index& ix, std::span<const symbol_id> pattern,
                                  mem_algo algo = mem_algo::automatic);

// MEMs occurring at most k times in both P and T; k = 1 gives the MUMs.
std::vector<mem_record> find_krare(const mem_index& ix, std::span<const symbol_id> pattern,
                                   uint64_t k, mem_algo algo = mem_algo::automatic);

// Occurrence count of the whole string `w` in T, exact while <= bound.
struct bounded_count {
  uint64_t value = 0;   // exact count, or bound+1 when exceeded
  bool exceeded = false;
};
bounded_count count_pattern_bounded(const mem_index& ix, std::span<const symbol_id> w,
                                    uint64_t bound);

// MEM list <-> matching statistics conversions (mutually inverse).
matching_stats matching_statistics(const std::vector<mem_record>& mems, uint32_t m);
std::vector<mem_record> mems_from_ms(const matching_stats& ms);

// Maximal segments contained in one segment of every per-text MEM list.
std::vector<mem_record> collection_mems(const std::vector<std::vector<mem_record>>& lists);

}  // namespace memgram
