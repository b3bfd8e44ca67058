#pragma once

#include <optional>

#include "memgram/grammar.hpp"
#include "memgram/grid.hpp"
#include "memgram/lcg.hpp"
#include "memgram/patricia.hpp"

namespace memgram {

// One grid point per rule split. For A -> B_1..B_t and 1 < s <= t the column
// string is exp(B_{s-1}) reversed, the row string exp(B_s)..exp(B_t), and the
// satellite position is where exp(B_{s-1}) ends inside the (unique) internal
// node of A. Run rules A -> B^t contribute (exp(B)^rev, exp(B)^{t-1}) once.
struct grid_point {
  symbol_id nt = 0;
  uint32_t split = 0;       // s, 2..t (1 for run rules)
  text_pos junction = 0;    // end of the left part in T
};

struct occurrence {
  text_pos pos = 0;  // start position
  bool secondary = false;
  bool operator==(const occurrence& o) const = default;
};

class mem_index {
 public:
  // Build from text with the locally consistent grammar construction.
  static mem_index build(std::span<const symbol_id> text, uint64_t seed, uint32_t retries = 3);
  // Wrap an externally built grammar (no LCG levels: only the generic
  // algorithms are available).
  static mem_index from_grammar(rlcfg g, uint64_t seed);
  // Reassemble from deserialized parts.
  static mem_index assemble(rlcfg g, std::optional<lcg_levels> levels, uint64_t kr_base);

  const rlcfg& grammar() const { return g_; }
  const grammar_tree& tree() const { return *tree_; }
  const kr_context& kr() const { return kr_; }
  const point_grid& grid() const { return grid_; }
  const patricia_tree& px() const { return *px_; }
  const patricia_tree& py() const { return *py_; }
  bool has_levels() const { return levels_.has_value(); }
  const lcg_levels& levels() const { return *levels_; }

  uint64_t text_len() const { return g_.text_len(); }
  symbol_id last_char() const { return last_char_; }
  uint32_t num_points() const { return static_cast<uint32_t>(pts_x_.size()); }

  // points in x order / mapping between orders
  const grid_point& point_by_col(uint32_t col) const { return pts_x_[col - 1]; }
  uint32_t col_of_row(uint32_t row) const { return col_of_row_[row - 1]; }
  uint32_t row_of_col(uint32_t col) const { return grid_.row_of(col); }

  // column/row string accessors (1-based positions within the string)
  uint64_t x_len(uint32_t col) const;
  uint64_t y_len(uint32_t row) const;
  symbol_id x_char(uint32_t col, uint64_t q) const;
  symbol_id y_char(uint32_t row, uint64_t q) const;
  void x_extract(uint32_t col, uint64_t from, uint64_t len, sym_string& out) const;
  void y_extract(uint32_t row, uint64_t from, uint64_t len, sym_string& out) const;
  uint64_t x_sig(uint32_t col, uint64_t len) const;  // kappa of length-len prefix
  uint64_t y_sig(uint32_t row, uint64_t len) const;

  // Deepest verified locus for the reversed pattern prefix P[..r]^rev (X side)
  // or the pattern suffix P[r+1..] (Y side); plain verified Patricia searches.
  patricia_tree::locus locate_x(std::span<const symbol_id> rev_probe,
                                std::vector<uint32_t>* path = nullptr) const;
  patricia_tree::locus locate_y(std::span<const symbol_id> probe,
                                std::vector<uint32_t>* path = nullptr) const;

  // Lowest ancestor of vx whose column range against rows [y1..y2] is
  // nonempty; the root signals no primary occurrence with this cut.
  patricia_tree::locus range_expand(patricia_tree::locus vx, uint32_t y1, uint32_t y2) const;

  // Primary occurrence of a pattern of length plen whose left part has length
  // r and crosses this point's junction: start position in T.
  text_pos primary_start(uint32_t col, uint64_t r) const {
    return pts_x_[col - 1].junction - r + 1;
  }

  // Enumerate occurrence start positions spawned by one primary occurrence:
  // the primary itself, the extra in-run crossings for run rules, and all
  // secondary copies. Stops early when the sink returns false.
  bool expand_occurrences(uint32_t col, uint64_t r, uint64_t plen,
                          const std::function<bool(text_pos, bool /*secondary*/)>& sink) const;

  // All occurrences of P, each exactly once.
  std::vector<occurrence> locate(std::span<const symbol_id> pattern) const;

 private:
  rlcfg g_;
  std::optional<lcg_levels> levels_;
  std::optional<grammar_tree> tree_;
  kr_context kr_;
  std::vector<grid_point> pts_x_;      // x-sorted
  std::vector<uint32_t> col_of_row_;   // y rank -> column
  point_grid grid_;
  std::optional<patricia_tree> px_, py_;
  symbol_id last_char_ = 0;

  void finish_build(uint64_t kr_base_or_zero, uint64_t seed);
  std::pair<symbol_id, uint32_t> left_of(const grid_point& p) const;  // (symbol, its rule pos)
};

}  // namespace memgram
