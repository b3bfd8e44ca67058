#include <algorithm>
#include <cassert>

#include "memgram/lcg.hpp"

namespace memgram {

namespace {

struct u64_vec_hash {
  size_t operator()(const std::vector<uint64_t>& v) const {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint64_t s : v) h = mix_seed(h, s);
    return h;
  }
};
struct u64_pair_hash {
  size_t operator()(const std::pair<uint64_t, uint64_t>& p) const {
    return mix_seed(p.first, p.second);
  }
};

}  // namespace

pattern_levels::pattern_levels(const rlcfg& g, const lcg_levels& lv,
                               std::span<const symbol_id> pattern) {
  m_ = static_cast<uint32_t>(pattern.size());
  std::vector<uint64_t> fresh_exp;  // expansion lengths of fresh symbols
  auto exp_of = [&](uint64_t s) -> uint64_t {
    if (s >= FRESH_BASE) return fresh_exp[s - FRESH_BASE];
    return g.exp_len(static_cast<symbol_id>(s));
  };
  // permutation value of a symbol at an even level; fresh symbols sort above
  // every grammar symbol, later levels beyond the text parse get a seeded
  // pseudo-random order (ties broken by id for strictness)
  auto pi_of = [&](uint64_t s, uint32_t k) -> std::pair<uint64_t, uint64_t> {
    if (s >= FRESH_BASE) return {FRESH_BASE + (s - FRESH_BASE), s};
    if (k < lv.pi.size() && !lv.pi[k].empty() && s < lv.pi[k].size())
      return {lv.pi[k][static_cast<size_t>(s)], s};
    return {mix_seed(mix_seed(lv.eff_seed, 0x50490000ULL + k), s) & 0xffffffffULL, s};
  };

  std::vector<std::unordered_map<std::pair<uint64_t, uint64_t>, uint64_t, u64_pair_hash>>
      fresh_runs;
  std::vector<std::unordered_map<std::vector<uint64_t>, uint64_t, u64_vec_hash>> fresh_blocks;

  auto& l0 = levels_.emplace_back();
  l0.reserve(m_);
  for (uint32_t q = 0; q < m_; ++q) l0.push_back({pattern[q], q + 1});

  uint32_t max_levels = static_cast<uint32_t>(lv.seq.size()) + 96;
  uint32_t k = 0;
  while (levels_.back().size() > 1) {
    ++k;
    if (k > max_levels) throw std::logic_error("pattern parse did not converge");
    if (fresh_runs.size() < k + 1) fresh_runs.resize(k + 1);
    if (fresh_blocks.size() < k + 1) fresh_blocks.resize(k + 1);
    const auto& S = levels_.back();
    std::vector<entry> S2;
    size_t len = S.size();
    if (k % 2 == 1) {
      size_t i = 0;
      while (i < len) {
        size_t j = i;
        while (j + 1 < len && S[j + 1].sym == S[i].sym) ++j;
        uint64_t t = j - i + 1;
        if (t >= 2 && lcg_groupable(exp_of(S[i].sym), k)) {
          uint64_t sym;
          if (S[i].sym < FRESH_BASE && k < lv.run_dict.size()) {
            auto it = lv.run_dict[k].find({static_cast<symbol_id>(S[i].sym), t});
            if (it != lv.run_dict[k].end()) {
              sym = it->second;
            } else {
              sym = 0;  // fall through to fresh
            }
          } else {
            sym = 0;
          }
          if (sym == 0) {
            auto key = std::make_pair(S[i].sym, t);
            auto [it2, inserted] = fresh_runs[k].try_emplace(key, FRESH_BASE + fresh_exp.size());
            if (inserted) fresh_exp.push_back(exp_of(S[i].sym) * t);
            sym = it2->second;
          }
          S2.push_back({sym, S[j].end});
        } else {
          for (size_t q = i; q <= j; ++q) S2.push_back(S[q]);
        }
        i = j + 1;
      }
    } else {
      std::vector<char> isend(len, 0);
      isend[len - 1] = 1;
      for (size_t idx = 0; idx < len; ++idx) {
        if (!lcg_groupable(exp_of(S[idx].sym), k)) {
          if (idx > 0) isend[idx - 1] = 1;
          isend[idx] = 1;
        }
      }
      for (size_t idx = 1; idx + 1 < len; ++idx)
        if (pi_of(S[idx - 1].sym, k) > pi_of(S[idx].sym, k) &&
            pi_of(S[idx].sym, k) < pi_of(S[idx + 1].sym, k))
          isend[idx] = 1;
      size_t i = 0;
      while (i < len) {
        size_t j = i;
        while (!isend[j]) ++j;
        if (j > i) {
          bool all_text = true;
          for (size_t q = i; q <= j; ++q) all_text &= S[q].sym < FRESH_BASE;
          uint64_t sym = 0;
          if (all_text && k < lv.block_dict.size()) {
            sym_string blk;
            blk.reserve(j - i + 1);
            for (size_t q = i; q <= j; ++q) blk.push_back(static_cast<symbol_id>(S[q].sym));
            auto it = lv.block_dict[k].find(blk);
            if (it != lv.block_dict[k].end()) sym = it->second;
          }
          if (sym == 0) {
            std::vector<uint64_t> key;
            key.reserve(j - i + 1);
            uint64_t elen = 0;
            for (size_t q = i; q <= j; ++q) {
              key.push_back(S[q].sym);
              elen += exp_of(S[q].sym);
            }
            auto [it2, inserted] = fresh_blocks[k].try_emplace(key, FRESH_BASE + fresh_exp.size());
            if (inserted) fresh_exp.push_back(elen);
            sym = it2->second;
          }
          S2.push_back({sym, S[j].end});
        } else {
          S2.push_back(S[i]);
        }
        i = j + 1;
      }
    }
    levels_.push_back(std::move(S2));
  }

  end_pos_.resize(levels_.size());
  for (size_t q = 0; q < levels_.size(); ++q) {
    end_pos_[q].reserve(levels_[q].size());
    for (const entry& e : levels_[q]) end_pos_[q].push_back(e.end);
  }
  reset_window();
}

void pattern_levels::reset_window() {
  i_ = 1;
  j_ = 0;
  ik_.assign(levels_.size(), 0);
  jk_.assign(levels_.size(), 0);
}

void pattern_levels::grow_j() {
  assert(j_ < m_);
  ++j_;
  for (size_t k = 0; k < levels_.size(); ++k) {
    if (end_pos_[k][jk_[k]] >= j_) break;  // this and all higher levels still cover j
    ++jk_[k];
    ++cursor_increments_;
    assert(end_pos_[k][jk_[k]] >= j_);
  }
}

void pattern_levels::grow_i() {
  assert(i_ <= m_);
  ++i_;
  if (i_ > m_) return;
  for (size_t k = 0; k < levels_.size(); ++k) {
    if (end_pos_[k][ik_[k]] >= i_) break;
    ++ik_[k];
    ++cursor_increments_;
    assert(end_pos_[k][ik_[k]] >= i_);
  }
}

void pattern_levels::collect_level(uint32_t k, uint32_t i, uint32_t j, uint32_t ik, uint32_t jk,
                                   std::vector<uint32_t>& out) const {
  if (ik >= jk) return;  // single covering block: no interior ends
  const auto& E = end_pos_[k];
  uint64_t alpha = lcg_alpha(k + 1);
  uint64_t L = static_cast<uint64_t>(i) - 1 + 2 * alpha;        // left zone top
  uint64_t R = (j > alpha) ? j - alpha : 0;                     // right zone bottom
  uint64_t top = j - 1;
  size_t idx = ik;
  while (idx < jk && E[idx] <= std::min(L, top)) {
    out.push_back(static_cast<uint32_t>(E[idx]));
    ++idx;
  }
  if (idx < jk && E[idx] < R) out.push_back(static_cast<uint32_t>(E[idx]));  // leftmost middle
  size_t idx2 = jk;
  while (idx2 > idx && E[idx2 - 1] >= R) {
    out.push_back(static_cast<uint32_t>(E[idx2 - 1]));
    --idx2;
  }
}

void pattern_levels::cut_set(std::vector<uint32_t>& out) const {
  out.clear();
  if (i_ > j_) return;
  for (uint32_t k = 0; k < levels_.size(); ++k) {
    if (ik_[k] >= jk_[k]) break;
    collect_level(k, i_, j_, ik_[k], jk_[k], out);
  }
  out.push_back(j_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

void pattern_levels::cut_set_rebuild(uint32_t i, uint32_t j, std::vector<uint32_t>& out) const {
  out.clear();
  if (i > j) return;
  for (uint32_t k = 0; k < levels_.size(); ++k) {
    const auto& E = end_pos_[k];
    uint32_t ik = static_cast<uint32_t>(std::lower_bound(E.begin(), E.end(), i) - E.begin());
    uint32_t jk = static_cast<uint32_t>(std::lower_bound(E.begin(), E.end(), j) - E.begin());
    if (ik >= jk) break;
    collect_level(k, i, j, ik, jk, out);
  }
  out.push_back(j);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

uint64_t pattern_levels::total_level_length() const {
  uint64_t t = 0;
  for (const auto& l : levels_) t += l.size();
  return t;
}

}  // namespace memgram
