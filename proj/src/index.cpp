#include "memgram/index.hpp"

#include <algorithm>
#include <cassert>

namespace memgram {

namespace {

// Lazily materialized prefixes of the X/Y strings, used while sorting and
// computing neighbor LCPs at build time.
struct memo_strings {
  std::function<void(uint32_t, uint64_t, uint64_t, sym_string&)> extract;
  std::vector<uint64_t> lens;
  std::vector<sym_string> buf;

  symbol_id at(uint32_t i, uint64_t q) {
    auto& b = buf[i];
    if (q > b.size()) {
      uint64_t upto = std::min(lens[i], std::max<uint64_t>(2 * b.size(), q + 31));
      extract(i, b.size() + 1, upto - b.size(), b);
    }
    return b[q - 1];
  }
  // three-way lexicographic compare, shorter string first on ties
  int cmp(uint32_t a, uint32_t b) {
    uint64_t la = lens[a], lb = lens[b];
    uint64_t lim = std::min(la, lb);
    for (uint64_t q = 1; q <= lim; ++q) {
      symbol_id ca = at(a, q), cb = at(b, q);
      if (ca != cb) return ca < cb ? -1 : 1;
    }
    if (la != lb) return la < lb ? -1 : 1;
    return 0;
  }
  uint64_t lcp(uint32_t a, uint32_t b) {
    uint64_t lim = std::min(lens[a], lens[b]);
    uint64_t q = 0;
    while (q < lim && at(a, q + 1) == at(b, q + 1)) ++q;
    return q;
  }
};

}  // namespace

std::pair<symbol_id, uint32_t> mem_index::left_of(const grid_point& p) const {
  const rule& r = g_.rule_of(p.nt);
  if (r.is_run) return {r.base, 0};
  return {r.rhs[p.split - 2], p.split - 2};
}

uint64_t mem_index::x_len(uint32_t col) const {
  auto [sym, pos] = left_of(pts_x_[col - 1]);
  return g_.exp_len(sym);
}

symbol_id mem_index::x_char(uint32_t col, uint64_t q) const {
  auto [sym, pos] = left_of(pts_x_[col - 1]);
  return g_.char_at(sym, g_.exp_len(sym) - q + 1);
}

void mem_index::x_extract(uint32_t col, uint64_t from, uint64_t len, sym_string& out) const {
  auto [sym, pos] = left_of(pts_x_[col - 1]);
  uint64_t total = g_.exp_len(sym);
  size_t at = out.size();
  g_.extract(sym, total - (from + len - 1) + 1, len, out);
  std::reverse(out.begin() + at, out.end());
}

uint64_t mem_index::x_sig(uint32_t col, uint64_t len) const {
  auto [sym, pos] = left_of(pts_x_[col - 1]);
  return kr_.sig_suffix_rev(sym, len);
}

namespace {
// Offset of the Y string inside exp(nt): runs start after the first copy,
// sequence splits after the first s-1 children.
uint64_t y_off(const rlcfg& g, const grid_point& p) {
  const rule& r = g.rule_of(p.nt);
  if (r.is_run) return g.exp_len(r.base);
  return g.prefix_lens(p.nt)[p.split - 1];
}
}  // namespace

uint64_t mem_index::y_len(uint32_t row) const {
  const grid_point& p = pts_x_[col_of_row_[row - 1] - 1];
  return g_.exp_len(p.nt) - y_off(g_, p);
}

symbol_id mem_index::y_char(uint32_t row, uint64_t q) const {
  const grid_point& p = pts_x_[col_of_row_[row - 1] - 1];
  return g_.char_at(p.nt, y_off(g_, p) + q);
}

void mem_index::y_extract(uint32_t row, uint64_t from, uint64_t len, sym_string& out) const {
  const grid_point& p = pts_x_[col_of_row_[row - 1] - 1];
  g_.extract(p.nt, y_off(g_, p) + from, len, out);
}

uint64_t mem_index::y_sig(uint32_t row, uint64_t len) const {
  const grid_point& p = pts_x_[col_of_row_[row - 1] - 1];
  uint64_t off = y_off(g_, p);
  uint64_t whole = kr_.sig_prefix(p.nt, off + len);
  uint64_t head = kr_.sig_prefix(p.nt, off);
  return kr_context::submod(whole, kr_context::mulmod(head, kr_.pow_base(len)));
}

patricia_tree::locus mem_index::locate_x(std::span<const symbol_id> rev_probe,
                                         std::vector<uint32_t>* path) const {
  return px_->locate(
      rev_probe.size(), [&](uint64_t q) { return rev_probe[q - 1]; },
      [this](uint32_t rank, uint64_t q) { return x_char(rank, q); }, path);
}

patricia_tree::locus mem_index::locate_y(std::span<const symbol_id> probe,
                                         std::vector<uint32_t>* path) const {
  return py_->locate(
      probe.size(), [&](uint64_t q) { return probe[q - 1]; },
      [this](uint32_t rank, uint64_t q) { return y_char(rank, q); }, path);
}

patricia_tree::locus mem_index::range_expand(patricia_tree::locus vx, uint32_t y1,
                                             uint32_t y2) const {
  if (num_points() == 0) return {px_->root(), 0};
  auto [x1, x2] = px_->range(vx);
  if (!grid_.empty(x1, x2, y1, y2)) return vx;
  uint32_t xl = x1 > 1 ? grid_.pred_in_band(x1 - 1, y1, y2) : 0;
  uint32_t xr = grid_.succ_in_band(x2 + 1, y1, y2);
  uint32_t v1 = xl ? px_->lca_leaves(xl, x2) : UINT32_MAX;
  uint32_t v2 = xr ? px_->lca_leaves(x1, xr) : UINT32_MAX;
  uint32_t best = UINT32_MAX;
  if (v1 != UINT32_MAX) best = v1;
  if (v2 != UINT32_MAX &&
      (best == UINT32_MAX || px_->at(v2).depth > px_->at(best).depth))
    best = v2;
  if (best == UINT32_MAX) return {px_->root(), 0};
  return {best, px_->at(best).depth};
}

bool mem_index::expand_occurrences(uint32_t col, uint64_t r, uint64_t plen,
                                   const std::function<bool(text_pos, bool)>& sink) const {
  const grid_point& p = pts_x_[col - 1];
  const grammar_tree& t = *tree_;
  uint32_t u = t.internal_node(p.nt);
  const rule& rl = g_.rule_of(p.nt);
  std::vector<std::pair<uint32_t, uint64_t>> work;
  auto spawn = [&](uint32_t v, uint64_t o, bool sec) -> bool {
    if (!sink(t.node(v).span_start + o - 1, sec)) return false;
    work.emplace_back(v, o);
    return true;
  };
  if (rl.is_run) {
    uint64_t bl = g_.exp_len(rl.base);
    uint64_t total = t.node(u).exp_len;
    for (uint64_t q = 1; q < rl.count; ++q) {
      uint64_t o = q * bl - r + 1;  // r <= bl <= q*bl
      if (o + plen - 1 > total) break;
      if (!spawn(u, o, q > 1)) return false;
    }
  } else {
    uint64_t o = g_.prefix_lens(p.nt)[p.split - 1] - r + 1;
    if (!spawn(u, o, false)) return false;
  }
  while (!work.empty()) {
    auto [v, o] = work.back();
    work.pop_back();
    while (true) {
      const gt_node& nd = t.node(v);
      if (nd.internal && t.has_copies(nd.label)) {
        for (const auto& ce : t.copies_of(nd.label)) {
          for (uint64_t q = 0; q < ce.count; ++q) {
            if (!spawn(ce.node, o + q * ce.stride, true)) return false;
          }
        }
      }
      if (v == t.root()) break;
      o += t.shortcut_delta(v);
      v = t.shortcut(v);
    }
  }
  return true;
}

std::vector<occurrence> mem_index::locate(std::span<const symbol_id> pattern) const {
  std::vector<occurrence> out;
  uint64_t m = pattern.size();
  if (m == 0) return out;
  if (m == 1 && last_char_ == pattern[0]) out.push_back({text_len(), false});
  if (num_points() == 0) {
    std::sort(out.begin(), out.end(),
              [](const occurrence& a, const occurrence& b) { return a.pos < b.pos; });
    return out;
  }
  uint64_t rmax = (m == 1) ? 1 : m - 1;
  sym_string rev;
  for (uint64_t r = 1; r <= rmax; ++r) {
    rev.assign(pattern.rbegin() + (m - r), pattern.rend());  // P[1..r] reversed
    auto lx = locate_x(rev);
    if (lx.depth < r) continue;
    patricia_tree::locus ly{py_->root(), 0};
    if (r < m) {
      ly = locate_y(pattern.subspan(r));
      if (ly.depth < m - r) continue;
    }
    auto [x1, x2] = px_->range(lx);
    auto [y1, y2] = py_->range(ly);
    grid_.enumerate(x1, x2, y1, y2, [&](uint32_t col, uint32_t /*row*/) {
      expand_occurrences(col, r, m, [&](text_pos start, bool sec) {
        out.push_back({start, sec});
        return true;
      });
      return true;
    });
  }
  std::sort(out.begin(), out.end(),
            [](const occurrence& a, const occurrence& b) { return a.pos < b.pos; });
  return out;
}

void mem_index::finish_build(uint64_t kr_base_or_zero, uint64_t seed) {
  if (kr_base_or_zero)
    kr_ = kr_context::with_base(g_, kr_base_or_zero);
  else
    kr_ = kr_context(g_, seed);
  tree_.emplace(g_);
  const grammar_tree& t = *tree_;

  pts_x_.clear();
  for (uint32_t idx = 0; idx < g_.num_rules(); ++idx) {
    symbol_id nt = g_.nt_symbol(idx);
    const rule& r = g_.rule_of(nt);
    uint64_t base = t.node(t.internal_node(nt)).span_start;
    if (r.is_run) {
      pts_x_.push_back({nt, 1, base + g_.exp_len(r.base) - 1});
    } else {
      const auto& w = g_.prefix_lens(nt);
      for (uint32_t s = 2; s <= r.rhs.size(); ++s)
        pts_x_.push_back({nt, s, base + w[s - 1] - 1});
    }
  }
  uint32_t n = static_cast<uint32_t>(pts_x_.size());
  const std::vector<grid_point> orig = pts_x_;  // memo lambdas index pre-sort points

  // sort columns by reversed-left-expansion order
  memo_strings mx;
  mx.lens.resize(n);
  mx.buf.assign(n, {});
  mx.extract = [&](uint32_t i, uint64_t from, uint64_t len, sym_string& outb) {
    const grid_point& p = orig[i];
    const rule& r = g_.rule_of(p.nt);
    symbol_id sym = r.is_run ? r.base : r.rhs[p.split - 2];
    uint64_t total = g_.exp_len(sym);
    size_t at = outb.size();
    g_.extract(sym, total - (from + len - 1) + 1, len, outb);
    std::reverse(outb.begin() + at, outb.end());
  };
  for (uint32_t i = 0; i < n; ++i) {
    const grid_point& p = orig[i];
    const rule& r = g_.rule_of(p.nt);
    mx.lens[i] = g_.exp_len(r.is_run ? r.base : r.rhs[p.split - 2]);
  }
  std::vector<uint32_t> xord(n);
  for (uint32_t i = 0; i < n; ++i) xord[i] = i;
  std::sort(xord.begin(), xord.end(), [&](uint32_t a, uint32_t b) {
    int c = mx.cmp(a, b);
    return c ? c < 0 : a < b;
  });

  // sort rows by the Y strings
  memo_strings my;
  my.lens.resize(n);
  my.buf.assign(n, {});
  my.extract = [&](uint32_t i, uint64_t from, uint64_t len, sym_string& outb) {
    const grid_point& p = orig[i];
    g_.extract(p.nt, y_off(g_, p) + from, len, outb);
  };
  for (uint32_t i = 0; i < n; ++i) {
    const grid_point& p = orig[i];
    my.lens[i] = g_.exp_len(p.nt) - y_off(g_, p);
  }
  std::vector<uint32_t> yord(n);
  for (uint32_t i = 0; i < n; ++i) yord[i] = i;
  std::sort(yord.begin(), yord.end(), [&](uint32_t a, uint32_t b) {
    int c = my.cmp(a, b);
    return c ? c < 0 : a < b;
  });

  // reorder points into x order, build permutations
  std::vector<uint32_t> xrank(n);  // original point index -> column
  for (uint32_t c = 0; c < n; ++c) xrank[xord[c]] = c + 1;
  std::vector<uint32_t> yrank(n);
  for (uint32_t rr = 0; rr < n; ++rr) yrank[yord[rr]] = rr + 1;

  std::vector<grid_point> sorted;
  sorted.reserve(n);
  for (uint32_t c = 0; c < n; ++c) sorted.push_back(pts_x_[xord[c]]);

  std::vector<uint32_t> row_of_col(n);
  col_of_row_.assign(n, 0);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t col = xrank[i], row = yrank[i];
    row_of_col[col - 1] = row;
    col_of_row_[row - 1] = col;
  }

  // neighbor LCPs in sorted order (memo buffers still index original points)
  std::vector<uint64_t> xlcp(n ? n - 1 : 0), ylcp(n ? n - 1 : 0);
  for (uint32_t i = 0; i + 1 < n; ++i) xlcp[i] = mx.lcp(xord[i], xord[i + 1]);
  for (uint32_t i = 0; i + 1 < n; ++i) ylcp[i] = my.lcp(yord[i], yord[i + 1]);

  pts_x_ = std::move(sorted);
  grid_ = point_grid(std::move(row_of_col));

  px_.emplace(
      n, [&](uint32_t rank) { return mx.lens[xord[rank]]; },
      [&](uint32_t rank, uint64_t q) { return mx.at(xord[rank - 1], q); }, xlcp);
  py_.emplace(
      n, [&](uint32_t rank) { return my.lens[yord[rank]]; },
      [&](uint32_t rank, uint64_t q) { return my.at(yord[rank - 1], q); }, ylcp);

  last_char_ = g_.char_at(g_.start(), g_.text_len());
}

mem_index mem_index::build(std::span<const symbol_id> text, uint64_t seed, uint32_t retries) {
  mem_index ix;
  auto r = build_lcg(text, seed, retries);
  ix.g_ = std::move(r.grammar);
  ix.levels_ = std::move(r.levels);
  ix.finish_build(0, seed);
  return ix;
}

mem_index mem_index::from_grammar(rlcfg g, uint64_t seed) {
  mem_index ix;
  ix.g_ = std::move(g);
  ix.finish_build(0, seed);
  return ix;
}

mem_index mem_index::assemble(rlcfg g, std::optional<lcg_levels> levels, uint64_t kr_base) {
  mem_index ix;
  ix.g_ = std::move(g);
  ix.levels_ = std::move(levels);
  ix.finish_build(kr_base, 0);
  return ix;
}

}  // namespace memgram
