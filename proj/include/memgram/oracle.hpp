#pragma once

#include <span>

#include "memgram/common.hpp"
#include "memgram/mem_types.hpp"

namespace memgram {

// Brute-force reference implementations used by tests and self-verification.
// Definition-level: a sliding window kept at the longest occurring suffix,
// with plain substring search for the occurrence checks.
namespace oracle {

// occurrences of `w` in `t` (start positions), scanning
std::vector<uint64_t> find_all(std::span<const symbol_id> t, std::span<const symbol_id> w);
uint64_t count_occ(std::span<const symbol_id> t, std::span<const symbol_id> w,
                   uint64_t stop_at = UINT64_MAX);

std::vector<mem_record> naive_mems(std::span<const symbol_id> t, std::span<const symbol_id> p);
std::vector<mem_record> naive_kmems(std::span<const symbol_id> t, std::span<const symbol_id> p,
                                    uint64_t k);
std::vector<mem_record> naive_mums(std::span<const symbol_id> t, std::span<const symbol_id> p);
std::vector<mem_record> naive_krare(std::span<const symbol_id> t, std::span<const symbol_id> p,
                                    uint64_t k);
// per-position longest-match lengths plus one occurrence end for each
matching_stats naive_ms(std::span<const symbol_id> t, std::span<const symbol_id> p);
uint64_t naive_count(std::span<const symbol_id> t, std::span<const symbol_id> w);

}  // namespace oracle

// Suffix automaton over u32 symbols; the second, independent MEM oracle runs
// the classic suffix-tree window walk on it (transitions extend the window,
// suffix links shorten it). Also used to count window occurrences inside the
// pattern for MUM/k-rare filtering.
class suffix_automaton {
 public:
  explicit suffix_automaton(std::span<const symbol_id> s);

  int initial() const { return 0; }
  int transition(int state, symbol_id c) const;
  int link(int state) const { return st_[state].link; }
  uint64_t len(int state) const { return st_[state].len; }
  uint64_t min_len(int state) const { return st_[state].link < 0 ? 0 : st_[st_[state].link].len + 1; }
  uint64_t occ_count(int state) const { return cnt_[state]; }
  uint64_t first_end(int state) const { return first_end_[state]; }  // 1-based end position

  // Exact-window tracking: the state of a concrete substring w with |w| known.
  struct cursor {
    int state = 0;
    uint64_t length = 0;
  };
  // extend the tracked window by c; the transition must exist for exact windows
  bool extend(cursor& cur, symbol_id c) const;
  // shrink the tracked window to `new_len` (drops characters from the left)
  void shrink(cursor& cur, uint64_t new_len) const;

 private:
  struct state {
    uint64_t len = 0;
    int link = -1;
    std::vector<std::pair<symbol_id, int>> next;  // sorted by symbol
  };
  std::vector<state> st_;
  std::vector<uint64_t> cnt_;
  std::vector<uint64_t> first_end_;

  int add_state(uint64_t len);
  void set_next(int v, symbol_id c, int to);
};

// Algorithm-1-style MEM finding over the suffix automaton of t.
std::vector<mem_record> stree_mems(std::span<const symbol_id> t, std::span<const symbol_id> p);

}  // namespace memgram
