#include "memgram/mem.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>

#include "memgram/engine.hpp"

namespace memgram {

namespace {

uint64_t modpow(uint64_t b, uint64_t e) {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r = kr_context::mulmod(r, b);
    b = kr_context::mulmod(b, b);
    e >>= 1;
  }
  return r;
}

// Prefix signatures of the pattern, forward and reversed, for O(1) substring
// fingerprints during the batched searches.
struct pattern_sigs {
  const kr_context* kr = nullptr;
  std::vector<uint64_t> fwd_, rev_, pow_, ipow_;

  void init(const kr_context& k, std::span<const symbol_id> p) {
    kr = &k;
    size_t m = p.size();
    fwd_.assign(m + 1, 0);
    rev_.assign(m + 1, 0);
    pow_.assign(m + 1, 1);
    ipow_.assign(m + 1, 1);
    uint64_t inv = modpow(k.base(), kr_context::MOD - 2);
    for (size_t q = 1; q <= m; ++q) {
      fwd_[q] = kr_context::addmod(kr_context::mulmod(fwd_[q - 1], k.base()), k.sig_char(p[q - 1]));
      rev_[q] = kr_context::addmod(kr_context::mulmod(k.sig_char(p[q - 1]), pow_[q - 1]), rev_[q - 1]);
      pow_[q] = kr_context::mulmod(pow_[q - 1], k.base());
      ipow_[q] = kr_context::mulmod(ipow_[q - 1], inv);
    }
  }
  // kappa(P[u..v]), 1-based inclusive
  uint64_t fwd(uint64_t u, uint64_t v) const {
    if (u > v) return 0;
    return kr_context::submod(fwd_[v], kr_context::mulmod(fwd_[u - 1], pow_[v - u + 1]));
  }
  // kappa(reverse(P[u..v]))
  uint64_t rev(uint64_t u, uint64_t v) const {
    if (u > v) return 0;
    return kr_context::mulmod(kr_context::submod(rev_[v], rev_[u - 1]), ipow_[u - 1]);
  }
};

constexpr uint64_t CHEAP_VERIFY = 32;  // tails this short are always extracted

// Shared halving scheme: per position r, the deepest verified locus of its
// probe in one Patricia tree. `side` supplies probe characters, fingerprints
// and string extraction.
struct batched_side {
  const patricia_tree* tree;
  // character of probe r at string position q (1-based)
  std::function<symbol_id(uint32_t r, uint64_t q)> probe_char;
  // probe length of position r
  std::function<uint64_t(uint32_t r)> probe_len;
  std::function<uint64_t(uint32_t r, uint64_t len)> probe_sig;
  std::function<uint64_t(uint32_t rep, uint64_t len)> str_sig;
  std::function<void(uint32_t rep, uint64_t from, uint64_t len, sym_string&)> str_extract;
};

void batched_locate(const batched_side& side, uint32_t m,
                    std::vector<patricia_tree::locus>& out) {
  out.assign(m + 1, {side.tree->root(), 0});
  if (side.tree->leaf_count() == 0 || m == 0) return;
  std::vector<uint32_t> node(m + 1, side.tree->root());
  std::vector<uint64_t> depth(m + 1, 0);

  struct task {
    uint64_t lo, hi;  // verified length >= lo, known-not length hi+1
    std::vector<uint32_t> rs;
  };
  std::vector<task> stack;
  {
    task t0{0, m, {}};
    for (uint32_t r = 1; r <= m; ++r) t0.rs.push_back(r);
    stack.push_back(std::move(t0));
  }
  sym_string tailbuf, patbuf;
  while (!stack.empty()) {
    task t = std::move(stack.back());
    stack.pop_back();
    if (t.rs.empty()) continue;
    if (t.lo == t.hi) {
      for (uint32_t r : t.rs) out[r] = {node[r], depth[r]};
      continue;
    }
    uint64_t c = (t.lo + t.hi + 1) / 2;
    task ok{c, t.hi, {}}, fail{t.lo, c - 1, {}};
    struct cand {
      uint32_t r;
      uint32_t nd;
    };
    std::vector<cand> cands;
    for (uint32_t r : t.rs) {
      if (side.probe_len(r) < c) {
        fail.rs.push_back(r);
        continue;
      }
      // blind continuation from the verified locus by branching characters
      uint32_t v = node[r];
      bool stuck = false;
      while (side.tree->at(v).depth < c) {
        uint32_t w = side.tree->child_by(v, side.probe_char(r, side.tree->at(v).depth + 1));
        if (w == UINT32_MAX) {
          stuck = true;
          break;
        }
        v = w;
      }
      if (stuck) {
        fail.rs.push_back(r);
        continue;
      }
      if (side.probe_sig(r, c) != side.str_sig(side.tree->at(v).rep, c)) {
        fail.rs.push_back(r);
        continue;
      }
      cands.push_back({r, v});
    }
    // verification extraction: always for the longest surviving probe, and
    // for everyone whose unverified tail is short
    uint64_t longest_tail = 0;
    uint32_t longest_r = 0;
    for (const cand& cd : cands) {
      if (c - depth[cd.r] > longest_tail) {
        longest_tail = c - depth[cd.r];
        longest_r = cd.r;
      }
    }
    for (const cand& cd : cands) {
      uint64_t tail = c - depth[cd.r];
      bool verified = true;
      if (cd.r == longest_r || tail <= CHEAP_VERIFY) {
        tailbuf.clear();
        side.str_extract(side.tree->at(cd.nd).rep, depth[cd.r] + 1, tail, tailbuf);
        for (uint64_t q = 0; q < tail && verified; ++q)
          verified = tailbuf[q] == side.probe_char(cd.r, depth[cd.r] + 1 + q);
      }
      if (verified) {
        node[cd.r] = cd.nd;
        depth[cd.r] = c;
        ok.rs.push_back(cd.r);
      } else {
        fail.rs.push_back(cd.r);
      }
    }
    stack.push_back(std::move(ok));
    stack.push_back(std::move(fail));
  }
}

}  // namespace

void batched_deepest_y(const mem_index& ix, std::span<const symbol_id> pattern,
                       std::vector<patricia_tree::locus>& vy, std::vector<uint64_t>& ell) {
  uint32_t m = static_cast<uint32_t>(pattern.size());
  pattern_sigs sigs;
  sigs.init(ix.kr(), pattern);
  batched_side side;
  side.tree = &ix.py();
  // probe of position r is P[r+1..]; its length is m - r
  side.probe_char = [&](uint32_t r, uint64_t q) { return pattern[r + q - 1]; };
  side.probe_len = [&](uint32_t r) { return static_cast<uint64_t>(m - r); };
  side.probe_sig = [&](uint32_t r, uint64_t len) { return sigs.fwd(r + 1, r + len); };
  side.str_sig = [&](uint32_t rep, uint64_t len) { return ix.y_sig(rep, len); };
  side.str_extract = [&](uint32_t rep, uint64_t from, uint64_t len, sym_string& b) {
    ix.y_extract(rep, from, len, b);
  };
  std::vector<patricia_tree::locus> raw;
  // positions r = 1..m map to probes; r = m has the empty probe
  batched_locate(side, m == 0 ? 0 : m - 1, raw);
  vy.assign(m + 1, {ix.py().root(), 0});
  ell.assign(m + 1, 0);
  for (uint32_t r = 1; r + 1 <= m; ++r) {
    vy[r] = raw[r];
    ell[r] = raw[r].depth;
  }
}

void batched_deepest_x(const mem_index& ix, std::span<const symbol_id> pattern,
                       std::vector<patricia_tree::locus>& vx) {
  uint32_t m = static_cast<uint32_t>(pattern.size());
  pattern_sigs sigs;
  sigs.init(ix.kr(), pattern);
  batched_side side;
  side.tree = &ix.px();
  // probe of position r is reverse(P[..r]): char q is P[r-q+1]
  side.probe_char = [&](uint32_t r, uint64_t q) { return pattern[r - q]; };
  side.probe_len = [&](uint32_t r) { return static_cast<uint64_t>(r); };
  side.probe_sig = [&](uint32_t r, uint64_t len) { return sigs.rev(r - len + 1, r); };
  side.str_sig = [&](uint32_t rep, uint64_t len) { return ix.x_sig(rep, len); };
  side.str_extract = [&](uint32_t rep, uint64_t from, uint64_t len, sym_string& b) {
    ix.x_extract(rep, from, len, b);
  };
  batched_locate(side, m, vx);
}

// ---------------------------------------------------------------------------
// quadratic engine

quad_engine::quad_engine(const mem_index& ix, std::span<const symbol_id> pattern, options opts,
                         query_stats* stats)
    : ix_(ix), p_(pattern), opts_(opts), stats_(stats), m_(static_cast<uint32_t>(pattern.size())) {
  if (opts_.pattern_counts) psam_.emplace(pattern);
}

void quad_engine::note_sizes() {
  if (stats_) stats_->max_active = std::max<uint64_t>(stats_->max_active, R_.size());
}

std::optional<quad_engine::active> quad_engine::make_new_active(symbol_id c, bool simulated,
                                                                uint32_t jj) {
  active a;
  a.r = jj;
  if (simulated || jj >= m_) {
    a.ell = 0;
  } else {
    auto ly = ix_.py().locate(
        m_ - jj, [&](uint64_t q) { return p_[jj + q - 1]; },
        [&](uint32_t rank, uint64_t q) { return ix_.y_char(rank, q); });
    a.ell = ly.depth;
  }
  a.ynode = ix_.py().root();
  a.ydepth = 0;
  // probe = reverse of the would-be window [i_..jj]; in simulation the window
  // ends with the injected character instead of P[jj]
  uint64_t wlen = jj - i_ + 1;
  auto lx = ix_.px().locate(
      wlen,
      [&](uint64_t q) -> symbol_id {
        if (simulated && q == 1) return c;
        return p_[jj - q];
      },
      [&](uint32_t rank, uint64_t q) { return ix_.x_char(rank, q); });
  a.xnode = lx.node;
  a.xdepth = lx.depth;
  return a;
}

void quad_engine::extend_actives(symbol_id c, bool simulated, uint32_t jj) {
  const patricia_tree& py = ix_.py();
  const patricia_tree& px = ix_.px();
  std::vector<active> keep;
  keep.reserve(R_.size());
  for (active a : R_) {
    // must reach P[jj]
    if (!simulated) {
      if (a.r + a.ell <= jj - 1) continue;
    }
    // descend y by c
    uint64_t nd = a.ydepth + 1;
    if (nd <= py.at(a.ynode).depth) {
      if (simulated) {
        uint32_t rep = py.at(a.ynode).rep;
        if (ix_.y_char(rep, nd) != c) continue;
      }
      a.ydepth = nd;
    } else {
      uint32_t w = py.child_by(a.ynode, c);
      if (w == UINT32_MAX) {
        if (simulated) continue;
        assert(false && "verified path must have the child");
        continue;
      }
      a.ynode = w;
      a.ydepth = nd;
    }
    // restore nonemptiness by lifting x to physical ancestors
    auto yr = py.range({a.ynode, a.ydepth});
    while (true) {
      auto xr = px.range({a.xnode, a.xdepth});
      if (stats_) ++stats_->emptiness_queries;
      if (!ix_.grid().empty(xr.first, xr.second, yr.first, yr.second)) break;
      if (a.xdepth == 0) break;
      uint32_t par = px.at(a.xnode).parent;
      if (a.xnode == px.root()) {
        a.xdepth = 0;
        break;
      }
      a.xnode = par;
      a.xdepth = px.at(par).depth;
    }
    if (a.xdepth == 0) continue;
    keep.push_back(a);
  }
  R_ = std::move(keep);
}

uint64_t quad_engine::count_window(uint32_t l, uint32_t jj, symbol_id c, uint64_t stop,
                                   text_pos* some_end) const {
  uint64_t q = 0;
  for (const active& a : R_) {
    if (a.r - a.xdepth + 1 != l) continue;
    if (a.r == jj && l != jj) continue;  // whole-window junction-enders are
                                         // duplicates of crossing cuts
    auto xr = ix_.px().range({a.xnode, a.xdepth});
    auto yr = ix_.py().range({a.ynode, a.ydepth});
    ix_.grid().enumerate(xr.first, xr.second, yr.first, yr.second,
                         [&](uint32_t col, uint32_t) {
                           ix_.expand_occurrences(col, a.r - l + 1, jj - l + 1,
                                                  [&](text_pos start, bool) {
                                                    ++q;
                                                    if (some_end && *some_end == 0)
                                                      *some_end = start + (jj - l);
                                                    return q < stop;
                                                  });
                           return q < stop;
                         });
    if (q >= stop) return q;
  }
  if (l == jj && c == ix_.last_char()) {
    ++q;
    if (some_end && *some_end == 0) *some_end = ix_.text_len();
  }
  return q;
}

text_pos quad_engine::collect_p(uint32_t l, uint32_t jj, symbol_id c) const {
  for (const active& a : R_) {
    if (a.r - a.xdepth + 1 != l) continue;
    auto xr = ix_.px().range({a.xnode, a.xdepth});
    auto yr = ix_.py().range({a.ynode, a.ydepth});
    auto [col, row] = ix_.grid().any_point(xr.first, xr.second, yr.first, yr.second);
    if (col) return ix_.point_by_col(col).junction + (jj - a.r);
  }
  if (l == jj && c == ix_.last_char()) return ix_.text_len();
  return 0;
}

uint64_t quad_engine::support_l(uint32_t jj, symbol_id c) {
  bool pseudo = (c == ix_.last_char());
  auto min_start = [&]() -> uint64_t {
    uint64_t best = UINT64_MAX;
    for (const active& a : R_) best = std::min<uint64_t>(best, a.r - a.xdepth + 1);
    if (pseudo) best = std::min<uint64_t>(best, jj);
    return best;
  };
  uint64_t l = min_start();
  if (l == UINT64_MAX) return static_cast<uint64_t>(jj) + 1;
  if (opts_.k <= 1) return l;
  const patricia_tree& px = ix_.px();
  while (l <= jj) {
    text_pos dummy = 0;
    uint64_t q = count_window(static_cast<uint32_t>(l), jj, c, opts_.k, &dummy);
    if (q >= opts_.k) return l;
    if (l == jj) pseudo = false;
    std::vector<active> keep;
    keep.reserve(R_.size());
    for (active a : R_) {
      if (a.r - a.xdepth + 1 == l) {
        if (a.xdepth <= 1) continue;  // parent is the root: position dies
        --a.xdepth;
        uint32_t par = px.at(a.xnode).parent;
        if (px.at(par).depth >= a.xdepth) a.xnode = par;
      }
      keep.push_back(a);
    }
    R_ = std::move(keep);
    uint64_t nl = min_start();
    if (nl == UINT64_MAX) return static_cast<uint64_t>(jj) + 1;
    l = nl;
  }
  return static_cast<uint64_t>(jj) + 1;
}

std::optional<quad_engine::report> quad_engine::step_impl(symbol_id c, bool simulated) {
  uint32_t jj = j_ + 1;
  std::optional<report> rep;
  bool root_child = ix_.num_points() && ix_.px().child_by(ix_.px().root(), c) != UINT32_MAX;
  if (i_ == jj && !root_child && c != ix_.last_char()) {
    i_ = jj + 1;
    j_ = jj;
    if (psam_) pcur_ = {};
    pending_valid_ = false;
    return rep;
  }
  auto newact = make_new_active(c, simulated, jj);
  extend_actives(c, simulated, jj);
  if (newact && newact->xdepth >= 1) R_.push_back(*newact);
  note_sizes();
  uint32_t i_before = i_;
  uint64_t l = support_l(jj, c);
  if (l > i_) {
    if (i_ <= j_ && pending_valid_) rep = pending_;
    i_ = static_cast<uint32_t>(l);
  }
  j_ = jj;
  if (i_ <= jj) {
    pending_.i = i_;
    pending_.j = jj;
    pending_.t_count = 0;
    pending_.p_count = 0;
    text_pos pe = 0;
    if (opts_.classify_bound) {
      pending_.t_count =
          count_window(i_, jj, c, opts_.classify_bound + 1, &pe);
      pending_.p = pe ? pe : collect_p(i_, jj, c);
    } else {
      pending_.p = collect_p(i_, jj, c);
    }
    if (psam_) {
      bool okx = psam_->extend(pcur_, c);
      assert(okx && "window must be a substring of the pattern");
      (void)okx;
      psam_->shrink(pcur_, jj - i_ + 1);
      pending_.p_count = psam_->occ_count(pcur_.state);
    }
    pending_valid_ = true;
  } else {
    R_.clear();
    pending_valid_ = false;
    if (psam_) pcur_ = {};
  }
  (void)i_before;
  return rep;
}

std::optional<quad_engine::report> quad_engine::step() {
  assert(!done());
  return step_impl(p_[j_], false);
}

std::optional<quad_engine::report> quad_engine::finish() {
  if (i_ <= m_ && pending_valid_) {
    auto r = pending_;
    pending_valid_ = false;
    return r;
  }
  return std::nullopt;
}

void quad_engine::sim_step_char(symbol_id c) { step_impl(c, true); }

void quad_engine::collect_prefix_match_ends(std::vector<text_pos>& out) const {
  out.clear();
  if (i_ != 1 || j_ < 1) return;
  uint32_t jj = j_;
  for (const active& a : R_) {
    if (a.r - a.xdepth + 1 != 1) continue;
    if (a.r == jj && jj != 1) continue;
    auto xr = ix_.px().range({a.xnode, a.xdepth});
    auto yr = ix_.py().range({a.ynode, a.ydepth});
    ix_.grid().enumerate(xr.first, xr.second, yr.first, yr.second, [&](uint32_t col, uint32_t) {
      ix_.expand_occurrences(col, a.r, jj, [&](text_pos start, bool) {
        out.push_back(start + jj - 1);
        return true;
      });
      return true;
    });
  }
}

quad_engine::snapshot quad_engine::save() const {
  snapshot s;
  s.i = i_;
  s.j = j_;
  size_t bytes = sizeof(active) * R_.size() + sizeof(report) + 2 + sizeof(pcur_);
  s.blob.resize(bytes);
  uint8_t* at = s.blob.data();
  memcpy(at, R_.data(), sizeof(active) * R_.size());
  at += sizeof(active) * R_.size();
  memcpy(at, &pending_, sizeof(report));
  at += sizeof(report);
  *at++ = pending_valid_ ? 1 : 0;
  *at++ = 0;
  memcpy(at, &pcur_, sizeof(pcur_));
  return s;
}

void quad_engine::restore(const snapshot& s) {
  i_ = s.i;
  j_ = s.j;
  size_t nact = (s.blob.size() - sizeof(report) - 2 - sizeof(pcur_)) / sizeof(active);
  R_.assign(nact, active{});
  const uint8_t* at = s.blob.data();
  memcpy(R_.data(), at, sizeof(active) * nact);
  at += sizeof(active) * nact;
  memcpy(&pending_, at, sizeof(report));
  at += sizeof(report);
  pending_valid_ = *at++ != 0;
  ++at;
  memcpy(&pcur_, at, sizeof(pcur_));
}

uint64_t quad_engine::state_hash() const {
  uint64_t h = mix_seed(i_, j_);
  for (const active& a : R_) {
    h = mix_seed(h, a.r);
    h = mix_seed(h, a.ell);
    h = mix_seed(h, (static_cast<uint64_t>(a.ynode) << 32) ^ a.ydepth);
    h = mix_seed(h, (static_cast<uint64_t>(a.xnode) << 32) ^ a.xdepth);
  }
  h = mix_seed(h, pending_valid_ ? pending_.p : 0xdead);
  h = mix_seed(h, (static_cast<uint64_t>(pcur_.state) << 20) ^ pcur_.length);
  return h;
}

// ---------------------------------------------------------------------------
// LCG engine

lcg_engine::lcg_engine(const mem_index& ix, std::span<const symbol_id> pattern, options opts,
                       query_stats* stats)
    : ix_(ix), p_(pattern), opts_(opts), stats_(stats), m_(static_cast<uint32_t>(pattern.size())) {
  if (!ix.has_levels()) throw std::runtime_error("lcg engine requires an LCG-built index");
  plv_.emplace(ix.grammar(), ix.levels(), pattern);
  batched_deepest_y(ix, pattern, vy_, ell_);
  batched_deepest_x(ix, pattern, vx_);
  if (opts_.pattern_counts) psam_.emplace(pattern);
}

text_pos lcg_engine::collect_p(uint32_t l, uint32_t jj, symbol_id c) const {
  for (const active& a : R_) {
    if (a.r - a.xdepth + 1 != l) continue;
    auto xr = ix_.px().range({a.xnode, a.xdepth});
    auto yr = ix_.py().range({a.ynode, a.ydepth});
    auto [col, row] = ix_.grid().any_point(xr.first, xr.second, yr.first, yr.second);
    if (col) return ix_.point_by_col(col).junction + (jj - a.r);
  }
  if (l == jj && c == ix_.last_char()) return ix_.text_len();
  return 0;
}

uint64_t lcg_engine::count_window_at(uint32_t l, uint32_t jj, symbol_id c, uint64_t stop,
                                     text_pos* some_end) const {
  uint64_t q = 0;
  std::vector<uint32_t> cuts;
  plv_->cut_set_rebuild(l, jj, cuts);
  for (uint32_t r : cuts) {
    if (r == jj && l != jj) continue;
    if (r < l) continue;
    uint64_t need_y = jj - r;
    if (ell_[r] < need_y) continue;
    uint64_t need_x = r - l + 1;
    if (vx_[r].depth < need_x) continue;
    auto ya = ix_.py().weighted_ancestor(vy_[r], need_y);
    auto xa = ix_.px().weighted_ancestor(vx_[r], need_x);
    auto xr = ix_.px().range(xa);
    auto yr = ix_.py().range(ya);
    ix_.grid().enumerate(xr.first, xr.second, yr.first, yr.second, [&](uint32_t col, uint32_t) {
      ix_.expand_occurrences(col, need_x, jj - l + 1, [&](text_pos start, bool) {
        ++q;
        if (some_end && *some_end == 0) *some_end = start + (jj - l);
        return q < stop;
      });
      return q < stop;
    });
    if (q >= stop) return q;
  }
  if (l == jj && c == ix_.last_char()) {
    ++q;
    if (some_end && *some_end == 0) *some_end = ix_.text_len();
  }
  return q;
}

uint64_t lcg_engine::support_l(uint32_t jj, symbol_id c) {
  bool pseudo = (c == ix_.last_char());
  uint64_t best = UINT64_MAX;
  for (const active& a : R_) best = std::min<uint64_t>(best, a.r - a.xdepth + 1);
  if (pseudo) best = std::min<uint64_t>(best, jj);
  if (best == UINT64_MAX) return static_cast<uint64_t>(jj) + 1;
  if (opts_.k <= 1) return best;
  // bounded counting with per-l cut sets, advancing l while the support is
  // below k; l never retreats across steps so the total work stays linear
  uint64_t l = best;
  while (l <= jj) {
    text_pos dummy = 0;
    uint64_t q = count_window_at(static_cast<uint32_t>(l), jj, c, opts_.k, &dummy);
    if (q >= opts_.k) return l;
    ++l;
  }
  return static_cast<uint64_t>(jj) + 1;
}

void lcg_engine::verify_report(const report& r) const {
  uint64_t len = r.j - r.i + 1;
  if (r.p < len || r.p > ix_.text_len()) throw kr_collision{};
  sym_string got = ix_.grammar().access(r.p - len + 1, r.p);
  for (uint64_t q = 0; q < len; ++q)
    if (got[q] != p_[r.i - 1 + q]) throw kr_collision{};
}

std::optional<lcg_engine::report> lcg_engine::step() {
  assert(!done());
  uint32_t jj = j_ + 1;
  symbol_id c = p_[jj - 1];
  std::optional<report> rep;
  plv_->grow_j();
  if (i_ == jj && vx_[jj].depth == 0 && c != ix_.last_char()) {
    i_ = jj + 1;
    j_ = jj;
    plv_->grow_i();
    if (psam_) pcur_ = {};
    pending_valid_ = false;
    return rep;
  }
  plv_->cut_set(cuts_);
  if (stats_) stats_->max_cutset = std::max<uint64_t>(stats_->max_cutset, cuts_.size());
  // survivors: in the cut set and able to reach P[jj]
  std::vector<active> next;
  next.reserve(cuts_.size());
  std::vector<char> have(cuts_.size(), 0);
  for (const active& a : R_) {
    auto it = std::lower_bound(cuts_.begin(), cuts_.end(), a.r);
    if (it == cuts_.end() || *it != a.r) continue;
    if (a.r + ell_[a.r] <= jj - 1) continue;
    active b = a;
    uint64_t nd = b.ydepth + 1;
    if (nd > ix_.py().at(b.ynode).depth) {
      uint32_t w = ix_.py().child_by(b.ynode, c);
      assert(w != UINT32_MAX);
      b.ynode = w;
    }
    b.ydepth = nd;
    have[it - cuts_.begin()] = 1;
    next.push_back(b);
  }
  // new entries from the cut set, with y set by weighted ancestor of vy_r
  for (size_t ci = 0; ci < cuts_.size(); ++ci) {
    if (have[ci]) continue;
    uint32_t r = cuts_[ci];
    uint64_t need_y = jj - r;
    if (r + ell_[r] <= jj - 1) continue;  // cannot cover the window end
    active b;
    b.r = r;
    auto ya = need_y == 0 ? patricia_tree::locus{ix_.py().root(), 0}
                          : ix_.py().weighted_ancestor(vy_[r], need_y);
    b.ynode = ya.node;
    b.ydepth = need_y;
    next.push_back(b);
  }
  // x ranges for everyone via range successor expansion
  R_.clear();
  for (active b : next) {
    uint64_t cap = b.r - i_ + 1;
    patricia_tree::locus vx = vx_[b.r];
    if (vx.depth > cap) vx = ix_.px().weighted_ancestor(vx, cap);
    if (stats_) ++stats_->emptiness_queries;
    auto yr = ix_.py().range({b.ynode, b.ydepth});
    auto ex = ix_.range_expand(vx, yr.first, yr.second);
    if (ex.depth == 0) continue;
    b.xnode = ex.node;
    b.xdepth = ex.depth;
    R_.push_back(b);
  }
  if (stats_) stats_->max_active = std::max<uint64_t>(stats_->max_active, R_.size());
  uint64_t l = support_l(jj, c);
  if (l > i_) {
    if (i_ <= j_ && pending_valid_) rep = pending_;
    while (i_ < l) {
      plv_->grow_i();
      ++i_;
    }
  }
  j_ = jj;
  if (i_ <= jj) {
    pending_.i = i_;
    pending_.j = jj;
    pending_.t_count = 0;
    pending_.p_count = 0;
    text_pos pe = 0;
    if (opts_.classify_bound) {
      pending_.t_count = count_window_at(i_, jj, c, opts_.classify_bound + 1, &pe);
      pending_.p = pe ? pe : collect_p(i_, jj, c);
    } else {
      pending_.p = collect_p(i_, jj, c);
    }
    if (psam_) {
      bool okx = psam_->extend(pcur_, c);
      assert(okx);
      (void)okx;
      psam_->shrink(pcur_, jj - i_ + 1);
      pending_.p_count = psam_->occ_count(pcur_.state);
    }
    pending_valid_ = true;
  } else {
    R_.clear();
    pending_valid_ = false;
    if (psam_) pcur_ = {};
  }
  if (rep) verify_report(*rep);
  return rep;
}

std::optional<lcg_engine::report> lcg_engine::finish() {
  if (i_ <= m_ && pending_valid_) {
    auto r = pending_;
    pending_valid_ = false;
    verify_report(r);
    return r;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// drivers

namespace {

using report_filter = std::function<bool(const quad_engine::report&)>;

std::vector<mem_record> run_engine(const mem_index& ix, std::span<const symbol_id> p,
                                   quad_engine::options opts, mem_algo algo, query_stats* stats,
                                   const report_filter& accept) {
  std::vector<mem_record> out;
  auto push = [&](const quad_engine::report& r) {
    if (accept(r)) out.push_back({r.i, r.j, r.p});
  };
  bool use_lcg = algo == mem_algo::lcg || (algo == mem_algo::automatic && ix.has_levels());
  if (use_lcg) {
    try {
      lcg_engine eng(ix, p, opts, stats);
      while (!eng.done())
        if (auto r = eng.step()) push(*r);
      if (auto r = eng.finish()) push(*r);
      return out;
    } catch (const kr_collision&) {
      out.clear();  // fall through to the verified quadratic path
    }
  }
  quad_engine eng(ix, p, opts, stats);
  while (!eng.done())
    if (auto r = eng.step()) push(*r);
  if (auto r = eng.finish()) push(*r);
  return out;
}

// Windows longer than the text never occur, so patterns with m > 2n are cut
// into overlapping slabs of length 2n with step n; a slab-local MEM counts
// only when both of its maximality checks were decidable inside the slab.
// The single shape that escapes every slab, a match of the whole text at a
// slab seam, is checked directly.
std::vector<mem_record> chunked(const mem_index& ix, std::span<const symbol_id> p,
                                const std::function<std::vector<mem_record>(
                                    std::span<const symbol_id>)>& run) {
  uint64_t n = ix.text_len(), m = p.size();
  if (m <= 2 * n) return run(p);
  std::vector<mem_record> all;
  for (uint64_t s = 0; s < m; s += n) {
    uint64_t len = std::min<uint64_t>(2 * n, m - s);
    auto local = run(p.subspan(s, len));
    for (const mem_record& r : local) {
      uint64_t gi = s + r.i, gj = s + r.j;
      bool left_ok = r.i > 1 || s == 0;
      bool right_ok = r.j < len || s + len == m;
      if (left_ok && right_ok) all.push_back({static_cast<uint32_t>(gi),
                                              static_cast<uint32_t>(gj), r.p});
    }
    if (s + len == m) break;
  }
  // whole-text matches starting exactly at a slab seam
  sym_string text = ix.grammar().access(1, n);
  for (uint64_t s = n; s + n <= m; s += n) {
    bool eq = true;
    for (uint64_t q = 0; q < n && eq; ++q) eq = p[s + q] == text[q];
    if (eq) all.push_back({static_cast<uint32_t>(s + 1), static_cast<uint32_t>(s + n), n});
  }
  std::sort(all.begin(), all.end(), [](const mem_record& a, const mem_record& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const mem_record& a, const mem_record& b) {
                          return a.i == b.i && a.j == b.j;
                        }),
            all.end());
  return all;
}

}  // namespace

std::vector<mem_record> find_mems(const mem_index& ix, std::span<const symbol_id> pattern,
                                  mem_algo algo, query_stats* stats) {
  if (pattern.empty()) return {};
  return chunked(ix, pattern, [&](std::span<const symbol_id> sub) {
    return run_engine(ix, sub, {}, algo, stats, [](const auto&) { return true; });
  });
}

std::vector<mem_record> find_kmems(const mem_index& ix, std::span<const symbol_id> pattern,
                                   uint64_t k, mem_algo algo, query_stats* stats) {
  if (pattern.empty()) return {};
  if (k == 0) k = 1;
  quad_engine::options opts;
  opts.k = k;
  return chunked(ix, pattern, [&](std::span<const symbol_id> sub) {
    return run_engine(ix, sub, opts, algo, stats, [](const auto&) { return true; });
  });
}

std::vector<mem_record> find_krare(const mem_index& ix, std::span<const symbol_id> pattern,
                                   uint64_t k, mem_algo algo) {
  if (pattern.empty()) return {};
  if (k == 0) k = 1;
  uint64_t n = ix.text_len(), m = pattern.size();
  if (m > 2 * n) {
    // slab the MEM search, then apply both rarity filters globally
    auto mems = find_mems(ix, pattern, algo);
    suffix_automaton psam(pattern);
    std::vector<mem_record> out;
    for (const mem_record& r : mems) {
      auto w = pattern.subspan(r.i - 1, r.j - r.i + 1);
      auto bc = count_pattern_bounded(ix, w, k);
      if (bc.exceeded) continue;
      suffix_automaton::cursor cur{};
      bool ok = true;
      for (symbol_id ch : w) ok = ok && psam.extend(cur, ch);
      if (!ok || psam.occ_count(cur.state) > k) continue;
      out.push_back(r);
    }
    return out;
  }
  quad_engine::options opts;
  opts.classify_bound = k;
  opts.pattern_counts = true;
  return run_engine(ix, pattern, opts, algo, nullptr, [&](const quad_engine::report& r) {
    return r.t_count <= k && r.p_count <= k;
  });
}

std::vector<mem_record> find_mums(const mem_index& ix, std::span<const symbol_id> pattern,
                                  mem_algo algo) {
  return find_krare(ix, pattern, 1, algo);
}

bounded_count count_pattern_bounded(const mem_index& ix, std::span<const symbol_id> w,
                                    uint64_t bound) {
  bounded_count r;
  if (w.empty()) return r;
  quad_engine::options opts;
  opts.classify_bound = bound;
  quad_engine eng(ix, w, opts);
  std::optional<quad_engine::report> last;
  while (!eng.done())
    if (auto rep = eng.step()) last = rep;
  if (auto rep = eng.finish()) last = rep;
  if (!last || last->i != 1 || last->j != w.size()) return r;  // w does not occur
  r.value = last->t_count;
  r.exceeded = last->t_count > bound;
  return r;
}

matching_stats matching_statistics(const std::vector<mem_record>& mems, uint32_t m) {
  matching_stats ms;
  ms.len.assign(m, 0);
  ms.pos.assign(m, 0);
  for (size_t r = 0; r < mems.size(); ++r) {
    const mem_record& cur = mems[r];
    if (cur.i < 1 || cur.i > cur.j || cur.j > m) throw std::invalid_argument("bad MEM range");
    if (r + 1 < mems.size() &&
        (mems[r + 1].i <= cur.i || mems[r + 1].j <= cur.j))
      throw std::invalid_argument("MEM list not strictly increasing");
    uint32_t qhi = r + 1 < mems.size() ? std::min<uint32_t>(cur.j, mems[r + 1].i - 1) : cur.j;
    for (uint32_t q = cur.i; q <= qhi; ++q) {
      ms.len[q - 1] = cur.j - q + 1;
      ms.pos[q - 1] = cur.p;
    }
  }
  return ms;
}

std::vector<mem_record> mems_from_ms(const matching_stats& ms) {
  std::vector<mem_record> out;
  uint32_t m = static_cast<uint32_t>(ms.len.size());
  for (uint32_t i = 1; i <= m; ++i) {
    if (ms.len[i - 1] == 0) continue;
    if (i == 1 || ms.len[i - 1] >= ms.len[i - 2]) {
      out.push_back({i, i + ms.len[i - 1] - 1, ms.pos[i - 1]});
    }
  }
  return out;
}

std::vector<mem_record> collection_mems(const std::vector<std::vector<mem_record>>& lists) {
  if (lists.empty()) return {};
  for (const auto& l : lists)
    if (l.empty()) return {};
  if (lists.size() == 1) return lists[0];
  size_t tau = lists.size();
  std::vector<size_t> cur(tau, 0);
  std::vector<mem_record> out;
  // max of i-cursors maintained incrementally; min of j-cursors via a heap
  while (true) {
    uint32_t lo = 0, hi = UINT32_MAX;
    text_pos p = 0;
    for (size_t t = 0; t < tau; ++t) {
      const mem_record& r = lists[t][cur[t]];
      lo = std::max(lo, r.i);
      hi = std::min(hi, r.j);
    }
    {
      const mem_record& r0 = lists[0][cur[0]];
      if (lo >= r0.i && hi <= r0.j) p = r0.p - (r0.j - hi);
    }
    if (lo <= hi) out.push_back({lo, hi, p});
    bool exhausted = false;
    for (size_t t = 0; t < tau; ++t) {
      if (lists[t][cur[t]].j == hi) {
        if (++cur[t] == lists[t].size()) exhausted = true;
      }
    }
    if (exhausted) break;
  }
  // the cursor rule can emit segments contained in the next report
  std::vector<mem_record> filtered;
  for (size_t q = 0; q < out.size(); ++q) {
    if (q + 1 < out.size() && out[q + 1].i <= out[q].i && out[q + 1].j >= out[q].j) continue;
    filtered.push_back(out[q]);
  }
  return filtered;
}

}  // namespace memgram
