#include "memgram/oracle.hpp"

#include <algorithm>
#include <cassert>

namespace memgram {
namespace oracle {

namespace {

// first occurrence of w in t at or after `from` (0-based); SIZE_MAX if none
size_t find_from(std::span<const symbol_id> t, std::span<const symbol_id> w, size_t from) {
  if (w.empty() || w.size() > t.size()) return SIZE_MAX;
  auto it = std::search(t.begin() + from, t.end(), w.begin(), w.end());
  return it == t.end() ? SIZE_MAX : static_cast<size_t>(it - t.begin());
}

}  // namespace

std::vector<uint64_t> find_all(std::span<const symbol_id> t, std::span<const symbol_id> w) {
  std::vector<uint64_t> out;
  size_t at = 0;
  while (true) {
    size_t hit = find_from(t, w, at);
    if (hit == SIZE_MAX) break;
    out.push_back(hit + 1);
    at = hit + 1;
  }
  return out;
}

uint64_t count_occ(std::span<const symbol_id> t, std::span<const symbol_id> w, uint64_t stop_at) {
  uint64_t cnt = 0;
  size_t at = 0;
  while (cnt < stop_at) {
    size_t hit = find_from(t, w, at);
    if (hit == SIZE_MAX) break;
    ++cnt;
    at = hit + 1;
  }
  return cnt;
}

uint64_t naive_count(std::span<const symbol_id> t, std::span<const symbol_id> w) {
  return count_occ(t, w);
}

namespace {

// Longest occurring (or k-supported) suffix windows: per end position j, the
// smallest start i_j such that pred(P[i_j..j]) holds; maximal windows are
// those whose start strictly grows at the next step.
template <typename Pred>
std::vector<mem_record> window_mems(std::span<const symbol_id> t, std::span<const symbol_id> p,
                                       const Pred& supported) {
  uint32_t m = static_cast<uint32_t>(p.size());
  std::vector<mem_record> out;
  if (m == 0) return out;
  std::vector<uint32_t> start(m + 2, 0);
  std::vector<text_pos> occ_end(m + 1, 0);
  uint32_t i = 1;
  for (uint32_t j = 1; j <= m; ++j) {
    text_pos e = 0;
    while (i <= j && !supported(p.subspan(i - 1, j - i + 1), &e)) ++i;
    start[j] = i;
    occ_end[j] = e;
  }
  start[m + 1] = m + 1;
  for (uint32_t j = 1; j <= m; ++j) {
    if (start[j] <= j && start[j + 1] > start[j]) out.push_back({start[j], j, occ_end[j]});
  }
  (void)t;
  return out;
}

}  // namespace

std::vector<mem_record> naive_mems(std::span<const symbol_id> t, std::span<const symbol_id> p) {
  return window_mems(t, p, [&](std::span<const symbol_id> w, text_pos* e) {
    size_t hit = find_from(t, w, 0);
    if (hit == SIZE_MAX) return false;
    *e = hit + w.size();
    return true;
  });
}

std::vector<mem_record> naive_kmems(std::span<const symbol_id> t, std::span<const symbol_id> p,
                                    uint64_t k) {
  return window_mems(t, p, [&](std::span<const symbol_id> w, text_pos* e) {
    if (count_occ(t, w, k) < k) return false;
    *e = find_from(t, w, 0) + w.size();
    return true;
  });
}

std::vector<mem_record> naive_krare(std::span<const symbol_id> t, std::span<const symbol_id> p,
                                    uint64_t k) {
  std::vector<mem_record> mems = naive_mems(t, p);
  std::vector<mem_record> out;
  for (const mem_record& r : mems) {
    auto w = p.subspan(r.i - 1, r.j - r.i + 1);
    if (count_occ(t, w, k + 1) <= k && count_occ(p, w, k + 1) <= k) out.push_back(r);
  }
  return out;
}

std::vector<mem_record> naive_mums(std::span<const symbol_id> t, std::span<const symbol_id> p) {
  return naive_krare(t, p, 1);
}

matching_stats naive_ms(std::span<const symbol_id> t, std::span<const symbol_id> p) {
  matching_stats ms;
  uint32_t m = static_cast<uint32_t>(p.size());
  ms.len.assign(m, 0);
  ms.pos.assign(m, 0);
  for (uint32_t q = 1; q <= m; ++q) {
    // longest prefix of P[q..] in t; grows by at most old+1, standard two-sided scan
    uint32_t len = 0;
    size_t hit = SIZE_MAX;
    for (uint32_t l = 1; l <= m - q + 1; ++l) {
      size_t h = find_from(t, p.subspan(q - 1, l), 0);
      if (h == SIZE_MAX) break;
      len = l;
      hit = h;
    }
    ms.len[q - 1] = len;
    ms.pos[q - 1] = len ? hit + len : 0;
  }
  return ms;
}

}  // namespace oracle

// ---------------------------------------------------------------------------

int suffix_automaton::add_state(uint64_t len) {
  st_.push_back({len, -1, {}});
  return static_cast<int>(st_.size()) - 1;
}

void suffix_automaton::set_next(int v, symbol_id c, int to) {
  auto& nx = st_[v].next;
  auto it = std::lower_bound(nx.begin(), nx.end(), c,
                             [](const auto& a, symbol_id b) { return a.first < b; });
  if (it != nx.end() && it->first == c)
    it->second = to;
  else
    nx.insert(it, {c, to});
}

int suffix_automaton::transition(int state, symbol_id c) const {
  const auto& nx = st_[state].next;
  auto it = std::lower_bound(nx.begin(), nx.end(), c,
                             [](const auto& a, symbol_id b) { return a.first < b; });
  return (it != nx.end() && it->first == c) ? it->second : -1;
}

suffix_automaton::suffix_automaton(std::span<const symbol_id> s) {
  add_state(0);
  std::vector<char> is_clone{0};
  std::vector<uint64_t> fe{0};
  int last = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    symbol_id c = s[i];
    int cur = add_state(st_[last].len + 1);
    is_clone.push_back(0);
    fe.push_back(i + 1);
    int p = last;
    while (p >= 0 && transition(p, c) < 0) {
      set_next(p, c, cur);
      p = st_[p].link;
    }
    if (p < 0) {
      st_[cur].link = 0;
    } else {
      int q = transition(p, c);
      if (st_[p].len + 1 == st_[q].len) {
        st_[cur].link = q;
      } else {
        int clone = add_state(st_[p].len + 1);
        is_clone.push_back(1);
        fe.push_back(fe[q]);
        st_[clone].next = st_[q].next;
        st_[clone].link = st_[q].link;
        while (p >= 0 && transition(p, c) == q) {
          set_next(p, c, clone);
          p = st_[p].link;
        }
        st_[q].link = clone;
        st_[cur].link = clone;
      }
    }
    last = cur;
  }
  // occurrence counts: 1 per non-clone, propagated along suffix links
  cnt_.assign(st_.size(), 0);
  first_end_ = std::move(fe);
  for (size_t v = 0; v < st_.size(); ++v)
    if (!is_clone[v] && v != 0) cnt_[v] = 1;
  std::vector<int> order(st_.size());
  for (size_t v = 0; v < st_.size(); ++v) order[v] = static_cast<int>(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return st_[a].len > st_[b].len; });
  for (int v : order)
    if (st_[v].link >= 0) cnt_[st_[v].link] += cnt_[v];
}

bool suffix_automaton::extend(cursor& cur, symbol_id c) const {
  int to = transition(cur.state, c);
  if (to < 0) return false;
  cur.state = to;
  ++cur.length;
  return true;
}

void suffix_automaton::shrink(cursor& cur, uint64_t new_len) const {
  assert(new_len <= cur.length);
  cur.length = new_len;
  if (new_len == 0) {
    cur.state = 0;
    return;
  }
  while (st_[cur.state].link >= 0 && st_[st_[cur.state].link].len >= new_len)
    cur.state = st_[cur.state].link;
}

std::vector<mem_record> stree_mems(std::span<const symbol_id> t, std::span<const symbol_id> p) {
  suffix_automaton sam(t);
  uint32_t m = static_cast<uint32_t>(p.size());
  std::vector<mem_record> out;
  if (m == 0) return out;
  int state = 0;
  uint64_t len = 0;
  uint32_t prev_start = 1;
  uint64_t prev_ij = 0;  // instrumentation guard: i+j never decreases
  text_pos prev_end = 0;
  for (uint32_t j = 1; j <= m; ++j) {
    symbol_id c = p[j - 1];
    // shorten (suffix links) until we can extend by c, like the shortening
    // phase of the suffix-tree walk
    while (state != 0 && sam.transition(state, c) < 0) {
      state = sam.link(state);
      len = sam.len(state);
    }
    int to = sam.transition(state, c);
    uint32_t start;
    if (to < 0) {
      state = 0;
      len = 0;
      start = j + 1;
    } else {
      state = to;
      ++len;
      start = j - static_cast<uint32_t>(len) + 1;
    }
    uint64_t ij = static_cast<uint64_t>(start) + j;
    assert(ij >= prev_ij);
    prev_ij = ij;
    if (j > 1 && prev_start <= j - 1 && start > prev_start)
      out.push_back({prev_start, j - 1, prev_end});
    prev_start = start;
    prev_end = to >= 0 ? sam.first_end(state) : 0;
  }
  if (prev_start <= m) out.push_back({prev_start, m, prev_end});
  return out;
}

}  // namespace memgram
