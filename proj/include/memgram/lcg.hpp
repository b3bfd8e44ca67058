#pragma once

#include <unordered_map>

#include "memgram/grammar.hpp"

namespace memgram {

// Level-by-level locally consistent parse. Odd levels collapse maximal runs,
// even levels form blocks ending at permutation local minima, at the sequence
// end, and around symbols whose expansion exceeds the level threshold
// l_k = (4/3)^(ceil(k/2)-1). Length-1 blocks keep their symbol; no unary rules
// are created.
struct lcg_levels {
  uint64_t eff_seed = 0;
  uint32_t num_levels = 0;                      // K, with |S_K| == 1
  std::vector<std::vector<symbol_id>> seq;      // S_0..S_K
  std::vector<std::vector<uint64_t>> ends;      // expansion end of each element
  std::vector<uint32_t> creation_level;         // per nonterminal

  struct run_key {
    symbol_id base;
    uint64_t count;
    bool operator==(const run_key& o) const { return base == o.base && count == o.count; }
  };
  struct run_key_hash {
    size_t operator()(const run_key& k) const { return mix_seed(k.base, k.count); }
  };
  struct block_key_hash {
    size_t operator()(const sym_string& v) const {
      uint64_t h = 0x243f6a8885a308d3ULL;
      for (symbol_id s : v) h = mix_seed(h, s);
      return h;
    }
  };
  // per level (index k); only odd/even levels respectively are populated
  std::vector<std::unordered_map<run_key, symbol_id, run_key_hash>> run_dict;
  std::vector<std::unordered_map<sym_string, symbol_id, block_key_hash>> block_dict;
  // per even level: permutation rank of every symbol id existing at that level
  std::vector<std::vector<uint32_t>> pi;

  // Block-end positions of level k restricted to [from..to], appended to out.
  void ends_in_range(uint32_t k, uint64_t from, uint64_t to, std::vector<uint64_t>& out) const;
};

// (4/3)^(ceil(k/2)-1) threshold test by cross multiplication; exact while the
// powers fit in 128 bits, beyond which every desk-scale length passes.
bool lcg_groupable(uint64_t exp_len, uint32_t level);
// alpha_k = ceil(8 * l_k), saturating.
uint64_t lcg_alpha(uint32_t level);

struct lcg_build_result {
  rlcfg grammar;
  lcg_levels levels;
};

// Runs `retries` independent builds with seeds derived from `seed` and keeps
// the smallest grammar. Deterministic for fixed inputs.
lcg_build_result build_lcg(std::span<const symbol_id> text, uint64_t seed, uint32_t retries = 3);

// Rebuild the level structure of a grammar produced by build_lcg (used when
// loading a serialized index): replays the parse with the stored seed and
// creation levels; any divergence throws.
lcg_levels replay_lcg(const rlcfg& g, const std::vector<uint32_t>& creation_level,
                      uint64_t eff_seed);

// Local consistency: for equal substrings T[i..j] = T[i2..j2], the level-k
// block ends restricted to [i+2*alpha_k .. j-alpha_k] must coincide (shifted)
// for every k. Throws std::invalid_argument if the substrings differ.
bool local_consistency_check(const rlcfg& g, const lcg_levels& lv, uint64_t i, uint64_t j,
                             uint64_t i2, uint64_t j2);

// ---------------------------------------------------------------------------
// Pattern parse mirroring the text parse: known runs/blocks resolve through
// the text dictionaries, unknown ones get fresh symbols with permutation
// values above every existing one, in order of appearance. Blocks never cross
// the pattern boundary, which plays the role of the #/$ sentinels.

class pattern_levels {
 public:
  static constexpr uint64_t FRESH_BASE = 1ULL << 32;

  pattern_levels(const rlcfg& g, const lcg_levels& lv, std::span<const symbol_id> pattern);

  struct entry {
    uint64_t sym;  // grammar symbol id, or FRESH_BASE + fresh index
    uint64_t end;  // 1-based position in the pattern of the block's last char
  };

  uint32_t pattern_len() const { return m_; }
  size_t num_levels() const { return levels_.size(); }
  const std::vector<entry>& level(size_t k) const { return levels_[k]; }

  // Sliding window [i..j]; starts empty as [1..0].
  void reset_window();
  void grow_j();
  void grow_i();
  uint32_t win_i() const { return i_; }
  uint32_t win_j() const { return j_; }

  // Sorted, duplicate-free cut candidates for the current window, always
  // including the window end. Empty when the window is empty.
  void cut_set(std::vector<uint32_t>& out) const;
  // Same set computed from scratch for an arbitrary window (oracle path).
  void cut_set_rebuild(uint32_t i, uint32_t j, std::vector<uint32_t>& out) const;

  uint64_t cursor_increments() const { return cursor_increments_; }
  uint64_t total_level_length() const;

 private:
  uint32_t m_ = 0;
  uint32_t i_ = 1, j_ = 0;
  std::vector<std::vector<entry>> levels_;
  std::vector<std::vector<uint64_t>> end_pos_;   // ends per level, for binary search
  std::vector<uint32_t> ik_, jk_;
  uint64_t cursor_increments_ = 0;

  void collect_level(uint32_t k, uint32_t i, uint32_t j, uint32_t ik, uint32_t jk,
                     std::vector<uint32_t>& out) const;
};

}  // namespace memgram
