#pragma once

#include "memgram/mem.hpp"
#include "memgram/oracle.hpp"

namespace memgram {

// Sliding-window engine over the grammar index: maintains the set R of active
// cut positions and the invariant that [i..j] is the longest (k-supported)
// suffix of P[..j] occurring in T. Works on any RLCFG. Also drives the
// all-pairs suffix-prefix application, which needs to simulate one extra
// character and roll back.
// shared engine knobs
struct engine_options {
  uint64_t k = 1;               // window support threshold (k-MEMs)
  uint64_t classify_bound = 0;  // >0: bounded-count each established window
  bool pattern_counts = false;  // track window occurrences inside P
};

class quad_engine {
 public:
  using options = engine_options;

  quad_engine(const mem_index& ix, std::span<const symbol_id> pattern,
              options opts = options{}, query_stats* stats = nullptr);

  // Established window that became maximal at this step, if any.
  struct report {
    uint32_t i = 0, j = 0;
    text_pos p = 0;
    uint64_t t_count = 0;  // valid when classify_bound > 0 (bound+1 = "more")
    uint64_t p_count = 0;  // valid when pattern_counts
  };

  bool done() const { return j_ >= m_; }
  std::optional<report> step();    // process P[j+1]
  std::optional<report> finish();  // final report once done()

  uint32_t win_i() const { return i_; }
  uint32_t win_j() const { return j_; }

  // --- suffix-prefix overlap support -------------------------------------
  struct snapshot {
    uint32_t i, j;
    std::vector<uint8_t> blob;  // packed active entries + pending state
  };
  snapshot save() const;
  void restore(const snapshot& s);
  uint64_t state_hash() const;
  // Process one simulated character at position j+1 without consuming P;
  // afterwards the window state reflects P[i..j].c. Use restore() to undo.
  void sim_step_char(symbol_id c);
  // Occurrence end positions of the current window, only when it starts at
  // pattern position 1 (full-prefix matches); complete enumeration.
  void collect_prefix_match_ends(std::vector<text_pos>& out) const;

 private:
  struct active {
    uint32_t r = 0;
    uint64_t ell = 0;     // max depth of P[r+1..] in the Y tree
    uint32_t ynode = 0;   // carrier node (depth >= ydepth)
    uint64_t ydepth = 0;  // = j - r
    uint32_t xnode = 0;
    uint64_t xdepth = 0;
  };

  const mem_index& ix_;
  std::span<const symbol_id> p_;
  options opts_;
  query_stats* stats_;
  uint32_t m_ = 0;
  uint32_t i_ = 1, j_ = 0;
  std::vector<active> R_;
  bool pending_valid_ = false;
  report pending_{};
  std::optional<suffix_automaton> psam_;
  suffix_automaton::cursor pcur_{};

  std::optional<report> step_impl(symbol_id c, bool simulated);
  void extend_actives(symbol_id c, bool simulated, uint32_t jj);
  std::optional<active> make_new_active(symbol_id c, bool simulated, uint32_t jj);
  uint64_t support_l(uint32_t jj, symbol_id c);
  uint64_t count_window(uint32_t l, uint32_t jj, symbol_id c, uint64_t stop,
                        text_pos* some_end) const;
  text_pos collect_p(uint32_t l, uint32_t jj, symbol_id c) const;
  void note_sizes();
};

// LCG-accelerated engine: R restricted to the cut set M(i, j+1) plus the
// window end, deepest loci vx_r / vy_r precomputed for the whole pattern via
// batched halving searches, x ranges recomputed with range successor queries.
class lcg_engine {
 public:
  using options = quad_engine::options;
  using report = quad_engine::report;

  lcg_engine(const mem_index& ix, std::span<const symbol_id> pattern,
             options opts = options{}, query_stats* stats = nullptr);

  bool done() const { return j_ >= m_; }
  std::optional<report> step();
  std::optional<report> finish();

 private:
  struct active {
    uint32_t r = 0;
    uint32_t ynode = 0;
    uint64_t ydepth = 0;
    uint32_t xnode = 0;
    uint64_t xdepth = 0;
  };

  const mem_index& ix_;
  std::span<const symbol_id> p_;
  options opts_;
  query_stats* stats_;
  uint32_t m_ = 0;
  uint32_t i_ = 1, j_ = 0;
  std::optional<pattern_levels> plv_;
  std::vector<patricia_tree::locus> vx_, vy_;  // index r = 1..m
  std::vector<uint64_t> ell_;
  std::vector<active> R_;
  std::vector<uint32_t> cuts_, cuts_scratch_;
  bool pending_valid_ = false;
  report pending_{};
  std::optional<suffix_automaton> psam_;
  suffix_automaton::cursor pcur_{};

  uint64_t support_l(uint32_t jj, symbol_id c);
  uint64_t count_window_at(uint32_t l, uint32_t jj, symbol_id c, uint64_t stop,
                           text_pos* some_end) const;
  text_pos collect_p(uint32_t l, uint32_t jj, symbol_id c) const;
  void verify_report(const report& r) const;  // extraction confirmation
};

// Batched deepest-loci computation (halving scheme with fingerprint filters
// and verification extractions). Exposed for tests.
void batched_deepest_y(const mem_index& ix, std::span<const symbol_id> pattern,
                       std::vector<patricia_tree::locus>& vy, std::vector<uint64_t>& ell);
void batched_deepest_x(const mem_index& ix, std::span<const symbol_id> pattern,
                       std::vector<patricia_tree::locus>& vx);

// Signals a Karp-Rabin collision detected at report verification; callers fall
// back to the quadratic engine.
struct kr_collision : std::runtime_error {
  kr_collision() : std::runtime_error("karp-rabin collision detected") {}
};

}  // namespace memgram
