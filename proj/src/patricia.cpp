#include "memgram/patricia.hpp"

#include <algorithm>
#include <cassert>

namespace memgram {

patricia_tree::patricia_tree(uint32_t n, const len_fn& len, const char_fn& chr,
                             const std::vector<uint64_t>& lcp) {
  nleaves_ = n;
  leaf_of_rank_.resize(n);
  nodes_.push_back(node{});  // root
  if (n == 0) {
    build_lca();
    return;
  }
  std::vector<uint32_t> st{0};  // rightmost path, nodes close as strings diverge
  auto attach = [&](uint32_t parent, uint32_t child) {
    nodes_[child].parent = parent;
    symbol_id bc = (nodes_[child].depth == nodes_[parent].depth)
                       ? TERM
                       : chr(nodes_[child].rep, nodes_[parent].depth + 1);
    nodes_[parent].kids.emplace_back(bc, child);
  };
  auto is_closed_leaf = [&](uint32_t v) {
    return nodes_[v].kids.empty() && nodes_[v].l == nodes_[v].r && nodes_[v].l != 0;
  };
  for (uint32_t i = 0; i < n; ++i) {
    uint64_t l = (i == 0) ? 0 : lcp[i - 1];
    uint32_t last = UINT32_MAX;
    while (st.size() > 1 && (nodes_[st.back()].depth > l ||
                             (nodes_[st.back()].depth == l && is_closed_leaf(st.back())))) {
      last = st.back();
      st.pop_back();
      attach(st.back(), last);
    }
    if (last != UINT32_MAX && nodes_[st.back()].depth < l) {
      // interpose a branching node at depth l above the node just closed
      uint32_t mid = static_cast<uint32_t>(nodes_.size());
      nodes_.push_back(node{});
      nodes_[mid].depth = l;
      nodes_[mid].rep = nodes_[last].rep;
      node& pp = nodes_[nodes_[last].parent];
      assert(!pp.kids.empty() && pp.kids.back().second == last);
      pp.kids.pop_back();
      attach(mid, last);
      st.push_back(mid);
    }
    uint32_t leaf = static_cast<uint32_t>(nodes_.size());
    nodes_.push_back(node{});
    nodes_[leaf].depth = len(i);
    nodes_[leaf].l = nodes_[leaf].r = i + 1;
    nodes_[leaf].rep = i + 1;
    leaf_of_rank_[i] = leaf;
    st.push_back(leaf);
  }
  while (st.size() > 1) {
    uint32_t v = st.back();
    st.pop_back();
    attach(st.back(), v);
  }
  // Aggregate leaf ranges and representatives in post-order.
  {
    std::vector<std::pair<uint32_t, size_t>> ps;
    ps.emplace_back(0, 0);
    while (!ps.empty()) {
      uint32_t v = ps.back().first;
      size_t& ci = ps.back().second;
      if (ci < nodes_[v].kids.size()) {
        uint32_t w = nodes_[v].kids[ci].second;
        ++ci;
        ps.emplace_back(w, 0);
      } else {
        ps.pop_back();
        if (!nodes_[v].kids.empty()) {
          uint32_t lo = UINT32_MAX, hi = 0;
          for (auto& [bc, w] : nodes_[v].kids) {
            lo = std::min(lo, nodes_[w].l);
            hi = std::max(hi, nodes_[w].r);
          }
          nodes_[v].l = lo;
          nodes_[v].r = hi;
          nodes_[v].rep = lo;
        }
      }
    }
  }
  build_lca();
}

uint32_t patricia_tree::child_by(uint32_t v, symbol_id c) const {
  for (const auto& [bc, w] : nodes_[v].kids)
    if (bc == c) return w;
  return UINT32_MAX;
}

patricia_tree::locus patricia_tree::locate(uint64_t probe_len,
                                           const std::function<symbol_id(uint64_t)>& probe,
                                           const char_fn& rep_chr,
                                           std::vector<uint32_t>* path) const {
  std::vector<uint32_t> local;
  std::vector<uint32_t>& pp = path ? *path : local;
  pp.clear();
  pp.push_back(0);
  if (nleaves_ == 0) return {0, 0};
  uint32_t v = 0;
  while (nodes_[v].depth < probe_len) {
    uint32_t w = child_by(v, probe(nodes_[v].depth + 1));
    if (w == UINT32_MAX) break;
    v = w;
    pp.push_back(v);
  }
  // Verify the blind candidate against its representative string; the true
  // locus depth is exactly the verified match length.
  uint64_t cand_depth = std::min<uint64_t>(nodes_[v].depth, probe_len);
  uint64_t d = 0;
  uint32_t rep = nodes_[v].rep;
  while (d < cand_depth && rep_chr(rep, d + 1) == probe(d + 1)) ++d;
  while (pp.size() > 1 && nodes_[pp[pp.size() - 2]].depth >= d) pp.pop_back();
  return {pp.back(), d};
}

patricia_tree::locus patricia_tree::weighted_ancestor(locus from, uint64_t target) const {
  assert(target <= from.depth);
  uint32_t v = from.node;
  while (v != 0 && nodes_[nodes_[v].parent].depth >= target) v = nodes_[v].parent;
  return {v, target};
}

void patricia_tree::build_lca() {
  // topological depths: string depths can tie across terminator edges
  tdepth_.assign(nodes_.size(), 0);
  euler_.clear();
  first_.assign(nodes_.size(), 0);
  std::vector<std::pair<uint32_t, size_t>> st;
  st.emplace_back(0, 0);
  first_[0] = 0;
  euler_.push_back(0);
  while (!st.empty()) {
    uint32_t v = st.back().first;
    size_t& ci = st.back().second;
    if (ci < nodes_[v].kids.size()) {
      uint32_t w = nodes_[v].kids[ci].second;
      ++ci;
      tdepth_[w] = tdepth_[v] + 1;
      first_[w] = static_cast<uint32_t>(euler_.size());
      euler_.push_back(w);
      st.emplace_back(w, 0);
    } else {
      st.pop_back();
      if (!st.empty()) euler_.push_back(st.back().first);
    }
  }
  size_t m = euler_.size();
  lg_.assign(m + 1, 0);
  for (size_t i = 2; i <= m; ++i) lg_[i] = lg_[i / 2] + 1;
  size_t levels = lg_[m] + 1;
  sparse_.assign(levels, std::vector<uint32_t>(m));
  for (size_t i = 0; i < m; ++i) sparse_[0][i] = euler_[i];
  auto lower = [&](uint32_t a, uint32_t b) { return tdepth_[a] <= tdepth_[b] ? a : b; };
  for (size_t k = 1; k < levels; ++k)
    for (size_t i = 0; i + (1ULL << k) <= m; ++i)
      sparse_[k][i] = lower(sparse_[k - 1][i], sparse_[k - 1][i + (1ULL << (k - 1))]);
}

uint32_t patricia_tree::lca_leaves(uint32_t rank_a, uint32_t rank_b) const {
  uint32_t a = first_[leaf_of_rank(rank_a)], b = first_[leaf_of_rank(rank_b)];
  if (a > b) std::swap(a, b);
  size_t k = lg_[b - a + 1];
  uint32_t x = sparse_[k][a], y = sparse_[k][b + 1 - (1ULL << k)];
  return tdepth_[x] <= tdepth_[y] ? x : y;
}

}  // namespace memgram
