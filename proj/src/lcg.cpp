#include "memgram/lcg.hpp"

#include <algorithm>
#include <cassert>

namespace memgram {

namespace {

// 4^e and 3^e as 128-bit values; e is clamped so they never overflow.
constexpr uint32_t MAX_EXACT_E = 60;

uint32_t level_exponent(uint32_t level) { return (level + 1) / 2 - 1; }  // ceil(k/2)-1

__uint128_t pow_u128(uint64_t b, uint32_t e) {
  __uint128_t r = 1;
  while (e--) r *= b;
  return r;
}

// deterministic Fisher-Yates, independent of std::shuffle internals
std::vector<uint32_t> make_pi(uint64_t eff_seed, uint32_t level, uint32_t domain) {
  std::vector<uint32_t> v(domain);
  for (uint32_t i = 0; i < domain; ++i) v[i] = i;
  std::mt19937_64 rng(mix_seed(eff_seed, 0x70690000ULL + level));
  for (uint32_t i = domain; i > 1; --i) {
    uint32_t j = static_cast<uint32_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
  return v;
}

}  // namespace

bool lcg_groupable(uint64_t exp_len, uint32_t level) {
  uint32_t e = level_exponent(level);
  if (e >= MAX_EXACT_E) return true;  // (4/3)^60 > 3e7, beyond desk-scale texts
  // exp_len <= 4^e / 3^e  <=>  exp_len * 3^e <= 4^e
  return static_cast<__uint128_t>(exp_len) * pow_u128(3, e) <= pow_u128(4, e);
}

uint64_t lcg_alpha(uint32_t level) {
  uint32_t e = level_exponent(level);
  if (e >= MAX_EXACT_E) return UINT64_MAX / 4;
  __uint128_t p3 = pow_u128(3, e);
  __uint128_t num = 8 * pow_u128(4, e) + p3 - 1;
  __uint128_t q = num / p3;
  return q > UINT64_MAX / 4 ? UINT64_MAX / 4 : static_cast<uint64_t>(q);
}

void lcg_levels::ends_in_range(uint32_t k, uint64_t from, uint64_t to,
                               std::vector<uint64_t>& out) const {
  const auto& E = ends[k];
  auto it = std::lower_bound(E.begin(), E.end(), from);
  for (; it != E.end() && *it <= to; ++it) out.push_back(*it);
}

namespace {

struct level_builder {
  rlcfg* g;
  lcg_levels* lv;
  bool replay;

  symbol_id run_symbol(uint32_t k, symbol_id base, uint64_t count) {
    auto& dict = lv->run_dict[k];
    lcg_levels::run_key key{base, count};
    auto it = dict.find(key);
    if (it != dict.end()) return it->second;
    if (replay) throw std::runtime_error("lcg replay: unknown run at level " + std::to_string(k));
    symbol_id id = g->add_run(base, count);
    lv->creation_level.push_back(k);
    dict.emplace(key, id);
    return id;
  }

  symbol_id block_symbol(uint32_t k, sym_string blk) {
    auto& dict = lv->block_dict[k];
    auto it = dict.find(blk);
    if (it != dict.end()) return it->second;
    if (replay) throw std::runtime_error("lcg replay: unknown block at level " + std::to_string(k));
    symbol_id id = g->add_sequence(blk);
    lv->creation_level.push_back(k);
    dict.emplace(std::move(blk), id);
    return id;
  }

  void parse(std::span<const symbol_id> text) {
    uint64_t n = text.size();
    lv->seq.emplace_back(text.begin(), text.end());
    auto& ends0 = lv->ends.emplace_back();
    ends0.resize(n);
    for (uint64_t i = 0; i < n; ++i) ends0[i] = i + 1;
    auto grow = [](auto& v, size_t sz) {
      if (v.size() < sz) v.resize(sz);
    };
    grow(lv->run_dict, 1);
    grow(lv->block_dict, 1);
    grow(lv->pi, 1);

    uint32_t max_levels = 64;
    {
      uint64_t x = n + 2;
      uint32_t lg = 0;
      while (x >>= 1) ++lg;
      max_levels += 5 * lg;
    }

    uint32_t k = 0;
    while (lv->seq.back().size() > 1) {
      ++k;
      if (k > max_levels) throw std::logic_error("lcg parse did not converge");
      grow(lv->run_dict, k + 1);
      grow(lv->block_dict, k + 1);
      grow(lv->pi, k + 1);
      const auto& S = lv->seq[k - 1];
      const auto& E = lv->ends[k - 1];
      std::vector<symbol_id> S2;
      std::vector<uint64_t> E2;
      size_t len = S.size();
      if (k % 2 == 1) {
        size_t i = 0;
        while (i < len) {
          size_t j = i;
          while (j + 1 < len && S[j + 1] == S[i]) ++j;
          uint64_t t = j - i + 1;
          if (t >= 2 && lcg_groupable(g->exp_len(S[i]), k)) {
            S2.push_back(run_symbol(k, S[i], t));
            E2.push_back(E[j]);
          } else {
            for (size_t q = i; q <= j; ++q) {
              S2.push_back(S[q]);
              E2.push_back(E[q]);
            }
          }
          i = j + 1;
        }
      } else {
        uint32_t domain = NUM_TERMINALS + static_cast<uint32_t>(
            replay ? std::upper_bound(lv->creation_level.begin(), lv->creation_level.end(), k - 1) -
                         lv->creation_level.begin()
                   : g->num_rules());
        lv->pi[k] = make_pi(lv->eff_seed, k, domain);
        const auto& pi = lv->pi[k];
        auto rank = [&](symbol_id s) { return pi[s]; };
        std::vector<char> isend(len, 0);
        isend[len - 1] = 1;
        for (size_t idx = 0; idx < len; ++idx) {
          if (!lcg_groupable(g->exp_len(S[idx]), k)) {
            if (idx > 0) isend[idx - 1] = 1;
            isend[idx] = 1;
          }
        }
        for (size_t idx = 1; idx + 1 < len; ++idx)
          if (rank(S[idx - 1]) > rank(S[idx]) && rank(S[idx]) < rank(S[idx + 1])) isend[idx] = 1;
        size_t i = 0;
        while (i < len) {
          size_t j = i;
          while (!isend[j]) ++j;
          if (j > i) {
            S2.push_back(block_symbol(k, sym_string(S.begin() + i, S.begin() + j + 1)));
            E2.push_back(E[j]);
          } else {
            S2.push_back(S[i]);
            E2.push_back(E[i]);
          }
          i = j + 1;
        }
      }
      lv->seq.push_back(std::move(S2));
      lv->ends.push_back(std::move(E2));
    }
    lv->num_levels = k;
    symbol_id top = lv->seq.back().empty() ? 0 : lv->seq.back()[0];
    if (lv->seq.back().empty()) throw std::invalid_argument("empty text");
    if (!g->is_nonterminal(top)) {
      if (replay) {
        top = g->start();
      } else {
        top = g->add_sequence({top});
        lv->creation_level.push_back(k + 1);
        g->set_start(top);
      }
    } else if (!replay) {
      g->set_start(top);
    }
  }
};

lcg_build_result build_one(std::span<const symbol_id> text, uint64_t eff_seed) {
  lcg_build_result r;
  r.levels.eff_seed = eff_seed;
  level_builder b{&r.grammar, &r.levels, false};
  b.parse(text);
  return r;
}

}  // namespace

lcg_build_result build_lcg(std::span<const symbol_id> text, uint64_t seed, uint32_t retries) {
  if (text.empty()) throw std::invalid_argument("build_lcg: empty text");
  if (retries == 0) retries = 1;
  std::optional<lcg_build_result> best;
  for (uint32_t a = 0; a < retries; ++a) {
    lcg_build_result r = build_one(text, mix_seed(seed, 0xb11dULL + a));
    if (!best || r.grammar.grammar_size() < best->grammar.grammar_size()) best = std::move(r);
  }
  return std::move(*best);
}

bool local_consistency_check(const rlcfg& g, const lcg_levels& lv, uint64_t i, uint64_t j,
                             uint64_t i2, uint64_t j2) {
  if (i < 1 || i > j || j > g.text_len() || i2 < 1 || i2 > j2 || j2 > g.text_len() ||
      j - i != j2 - i2)
    throw std::invalid_argument("local_consistency_check: bad ranges");
  {
    sym_string a = g.access(i, j), b = g.access(i2, j2);
    if (a != b) throw std::invalid_argument("local_consistency_check: substrings differ");
  }
  std::vector<uint64_t> ea, eb;
  for (uint32_t k = 1; k <= lv.num_levels; ++k) {
    uint64_t alpha = lcg_alpha(k);
    // restricted window [i+2a .. j-a]; block ends live in [from .. to-1]
    if (j < alpha || i + 2 * alpha > j - alpha) continue;
    uint64_t fa = i + 2 * alpha, ta = j - alpha;
    uint64_t fb = i2 + 2 * alpha, tb = j2 - alpha;
    if (fa >= ta) continue;  // empty restricted range
    ea.clear();
    eb.clear();
    lv.ends_in_range(k, fa, ta - 1, ea);
    lv.ends_in_range(k, fb, tb - 1, eb);
    if (ea.size() != eb.size()) return false;
    for (size_t q = 0; q < ea.size(); ++q)
      if (ea[q] - i != eb[q] - i2) return false;
  }
  return true;
}

lcg_levels replay_lcg(const rlcfg& g, const std::vector<uint32_t>& creation_level,
                      uint64_t eff_seed) {
  if (creation_level.size() != g.num_rules())
    throw std::runtime_error("lcg replay: creation level table size mismatch");
  lcg_levels lv;
  lv.eff_seed = eff_seed;
  lv.creation_level = creation_level;
  uint32_t maxlev = 0;
  for (uint32_t l : creation_level) maxlev = std::max(maxlev, l);
  lv.run_dict.resize(maxlev + 1);
  lv.block_dict.resize(maxlev + 1);
  for (uint32_t idx = 0; idx < g.num_rules(); ++idx) {
    uint32_t k = creation_level[idx];
    symbol_id nt = g.nt_symbol(idx);
    const rule& r = g.rule_of(nt);
    if (r.is_run)
      lv.run_dict[k].emplace(lcg_levels::run_key{r.base, r.count}, nt);
    else
      lv.block_dict[k].emplace(r.rhs, nt);
  }
  sym_string text = g.access(1, g.text_len());
  // parse() never mutates the grammar in replay mode
  level_builder b{const_cast<rlcfg*>(&g), &lv, true};
  b.parse(text);
  return lv;
}

}  // namespace memgram
