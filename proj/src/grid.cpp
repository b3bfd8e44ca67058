#include "memgram/grid.hpp"

#include <algorithm>

namespace memgram {

point_grid::point_grid(std::vector<uint32_t> row_of_col) : rows_(std::move(row_of_col)) {
  uint32_t n = static_cast<uint32_t>(rows_.size());
  base_ = 1;
  while (base_ < std::max<uint32_t>(n, 1)) base_ <<= 1;
  tree_.assign(2 * base_, {});
  for (uint32_t i = 0; i < n; ++i) tree_[base_ + i] = {rows_[i]};
  for (uint32_t v = base_; v-- > 1;) {
    const auto& a = tree_[2 * v];
    const auto& b = tree_[2 * v + 1];
    auto& out = tree_[v];
    out.resize(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  }
}

uint64_t point_grid::count_node(uint32_t node, uint32_t y1, uint32_t y2) const {
  const auto& v = tree_[node];
  return std::upper_bound(v.begin(), v.end(), y2) - std::lower_bound(v.begin(), v.end(), y1);
}

uint64_t point_grid::count(uint32_t x1, uint32_t x2, uint32_t y1, uint32_t y2) const {
  if (rows_.empty() || x1 > x2 || y1 > y2) return 0;
  x2 = std::min<uint32_t>(x2, size());
  if (x1 < 1) x1 = 1;
  if (x1 > x2) return 0;
  uint64_t total = 0;
  uint32_t lo = base_ + x1 - 1, hi = base_ + x2 - 1;
  while (lo <= hi) {
    if (lo & 1) total += count_node(lo++, y1, y2);
    if (!(hi & 1)) total += count_node(hi--, y1, y2);
    lo >>= 1;
    hi >>= 1;
    if (lo > hi) break;
  }
  return total;
}

uint32_t point_grid::succ_in_band(uint32_t x0, uint32_t y1, uint32_t y2) const {
  if (rows_.empty() || y1 > y2) return 0;
  if (x0 < 1) x0 = 1;
  if (x0 > size()) return 0;
  // canonical cover of [x0..size()], left to right; then descend
  uint32_t lo = base_ + x0 - 1, hi = base_ + size() - 1;
  std::vector<uint32_t> left, right;
  while (lo <= hi) {
    if (lo & 1) left.push_back(lo++);
    if (!(hi & 1)) right.push_back(hi--);
    lo >>= 1;
    hi >>= 1;
    if (lo > hi) break;
  }
  left.insert(left.end(), right.rbegin(), right.rend());
  for (uint32_t node : left) {
    if (count_node(node, y1, y2) == 0) continue;
    while (node < base_) {
      if (count_node(2 * node, y1, y2) > 0)
        node = 2 * node;
      else
        node = 2 * node + 1;
    }
    return node - base_ + 1;
  }
  return 0;
}

uint32_t point_grid::pred_in_band(uint32_t x0, uint32_t y1, uint32_t y2) const {
  if (rows_.empty() || y1 > y2 || x0 < 1) return 0;
  x0 = std::min<uint32_t>(x0, size());
  uint32_t lo = base_, hi = base_ + x0 - 1;
  std::vector<uint32_t> left, right;
  while (lo <= hi) {
    if (lo & 1) left.push_back(lo++);
    if (!(hi & 1)) right.push_back(hi--);
    lo >>= 1;
    hi >>= 1;
    if (lo > hi) break;
  }
  // rightmost-first order
  std::vector<uint32_t> order(right.begin(), right.end());
  order.insert(order.end(), left.rbegin(), left.rend());
  for (uint32_t node : order) {
    if (count_node(node, y1, y2) == 0) continue;
    while (node < base_) {
      if (count_node(2 * node + 1, y1, y2) > 0)
        node = 2 * node + 1;
      else
        node = 2 * node;
    }
    return node - base_ + 1;
  }
  return 0;
}

std::pair<uint32_t, uint32_t> point_grid::any_point(uint32_t x1, uint32_t x2, uint32_t y1,
                                                    uint32_t y2) const {
  uint32_t c = succ_in_band(x1, y1, y2);
  if (c == 0 || c > x2) return {0, 0};
  return {c, rows_[c - 1]};
}

bool point_grid::enumerate(uint32_t x1, uint32_t x2, uint32_t y1, uint32_t y2,
                           const std::function<bool(uint32_t, uint32_t)>& f) const {
  uint32_t c = x1;
  while (true) {
    c = succ_in_band(c, y1, y2);
    if (c == 0 || c > x2) return true;
    if (!f(c, rows_[c - 1])) return false;
    ++c;
  }
}

}  // namespace memgram
