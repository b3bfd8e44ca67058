#pragma once

#include <functional>
#include <optional>

#include "memgram/common.hpp"

namespace memgram {

// One point per column and per row (the X/Y sets have equal cardinality and
// each string instance carries exactly one point). Queries on rectangles are
// answered with a merge-sort tree over the column-indexed row array.
class point_grid {
 public:
  point_grid() = default;
  explicit point_grid(std::vector<uint32_t> row_of_col);

  uint32_t size() const { return static_cast<uint32_t>(rows_.size()); }
  uint32_t row_of(uint32_t col) const { return rows_[col - 1]; }  // 1-based

  bool empty(uint32_t x1, uint32_t x2, uint32_t y1, uint32_t y2) const {
    return count(x1, x2, y1, y2) == 0;
  }
  uint64_t count(uint32_t x1, uint32_t x2, uint32_t y1, uint32_t y2) const;

  // smallest column >= x0 whose row lies in [y1..y2]; 0 if none
  uint32_t succ_in_band(uint32_t x0, uint32_t y1, uint32_t y2) const;
  // largest column <= x0 whose row lies in [y1..y2]; 0 if none
  uint32_t pred_in_band(uint32_t x0, uint32_t y1, uint32_t y2) const;

  // any point in the rectangle (leftmost column); (0,0) if empty
  std::pair<uint32_t, uint32_t> any_point(uint32_t x1, uint32_t x2, uint32_t y1,
                                          uint32_t y2) const;

  // visit (col,row) of every point in the rectangle, left to right, until the
  // callback returns false; returns false iff the callback stopped the walk
  bool enumerate(uint32_t x1, uint32_t x2, uint32_t y1, uint32_t y2,
                 const std::function<bool(uint32_t, uint32_t)>& f) const;

 private:
  std::vector<uint32_t> rows_;
  std::vector<std::vector<uint32_t>> tree_;  // sorted rows per segment node
  uint32_t base_ = 1;

  uint64_t count_node(uint32_t node, uint32_t y1, uint32_t y2) const;
};

}  // namespace memgram
