#include <algorithm>

#include "memgram/grammar.hpp"

namespace memgram {

kr_context::kr_context(const rlcfg& g, uint64_t seed) : g_(&g) {
  std::mt19937_64 rng(mix_seed(seed, 0x6b72));
  std::uniform_int_distribution<uint64_t> dist(NUM_TERMINALS + 1, MOD - 2);
  base_ = dist(rng);
  build_tables();
}

kr_context kr_context::with_base(const rlcfg& g, uint64_t base) {
  kr_context ctx;
  ctx.g_ = &g;
  ctx.base_ = base;
  ctx.build_tables();
  return ctx;
}

void kr_context::build_tables() {
  pow_cache_.resize(1025);
  pow_cache_[0] = 1;
  for (size_t i = 1; i < pow_cache_.size(); ++i) pow_cache_[i] = mulmod(pow_cache_[i - 1], base_);
  const rlcfg& g = *g_;
  sym_fwd_.resize(g.num_rules());
  sym_rev_.resize(g.num_rules());
  sym_pow_.resize(g.num_rules());
  for (uint32_t idx = 0; idx < g.num_rules(); ++idx) {
    symbol_id nt = g.nt_symbol(idx);
    const rule& r = g.rule_of(nt);
    auto pw = [&](symbol_id s) {
      return is_terminal(s) ? pow_cache_[1] : sym_pow_[s - NUM_TERMINALS];
    };
    if (r.is_run) {
      uint64_t s = sig_symbol(r.base), l = g.exp_len(r.base);
      sym_fwd_[idx] = repeat(s, l, r.count);
      sym_rev_[idx] = repeat(sig_symbol_rev(r.base), l, r.count);
      sym_pow_[idx] = pow_base(l * r.count);
    } else {
      uint64_t fwd = 0, p = 1;
      for (symbol_id c : r.rhs) {
        fwd = addmod(mulmod(fwd, pw(c)), sig_symbol(c));
        p = mulmod(p, pw(c));
      }
      uint64_t rev = 0;
      for (auto it = r.rhs.rbegin(); it != r.rhs.rend(); ++it)
        rev = addmod(mulmod(rev, pw(*it)), sig_symbol_rev(*it));
      sym_fwd_[idx] = fwd;
      sym_rev_[idx] = rev;
      sym_pow_[idx] = p;
    }
  }
}

uint64_t kr_context::pow_slow(uint64_t e) const {
  uint64_t r = 1, b = base_;
  while (e) {
    if (e & 1) r = mulmod(r, b);
    b = mulmod(b, b);
    e >>= 1;
  }
  return r;
}

uint64_t kr_context::pow_base(uint64_t e) const {
  if (e < pow_cache_.size()) return pow_cache_[e];
  return pow_slow(e);
}

uint64_t kr_context::sig_of(std::span<const symbol_id> s) const {
  uint64_t h = 0;
  for (symbol_id c : s) h = addmod(mulmod(h, base_), sig_char(c));
  return h;
}

uint64_t kr_context::repeat(uint64_t sig, uint64_t len, uint64_t times) const {
  // binary doubling over (signature, covered length)
  uint64_t acc = 0, acc_len = 0;
  uint64_t cur = sig, cur_len = len;
  while (times) {
    if (times & 1) {
      acc = addmod(mulmod(acc, pow_base(cur_len)), cur);
      acc_len += cur_len;
    }
    times >>= 1;
    if (times) {
      cur = addmod(mulmod(cur, pow_base(cur_len)), cur);
      cur_len *= 2;
    }
  }
  (void)acc_len;
  return acc;
}

uint64_t kr_context::rule_prefix_sig(symbol_id nt, uint32_t upto) const {
  const rlcfg& g = *g_;
  uint32_t idx = g.nt_index(nt);
  if (rule_pre_.size() < g.num_rules()) rule_pre_.resize(g.num_rules());
  auto& v = rule_pre_[idx];
  if (v.empty()) {
    const rule& r = g.rule_of(nt);
    assert(!r.is_run);
    v.resize(r.rhs.size() + 1);
    v[0] = 0;
    for (size_t i = 0; i < r.rhs.size(); ++i) {
      symbol_id c = r.rhs[i];
      v[i + 1] = addmod(mulmod(v[i], pow_base(g.exp_len(c))), sig_symbol(c));
    }
  }
  return v[upto];
}

uint64_t kr_context::rule_suffix_rev_sig(symbol_id nt, uint32_t from) const {
  const rlcfg& g = *g_;
  uint32_t idx = g.nt_index(nt);
  if (rule_suf_rev_.size() < g.num_rules()) rule_suf_rev_.resize(g.num_rules());
  auto& v = rule_suf_rev_[idx];
  if (v.empty()) {
    const rule& r = g.rule_of(nt);
    assert(!r.is_run);
    v.resize(r.rhs.size() + 2);
    v[r.rhs.size() + 1] = 0;
    for (size_t i = r.rhs.size(); i-- > 0;) {
      symbol_id c = r.rhs[i];
      v[i + 1] = addmod(mulmod(v[i + 2], pow_base(g.exp_len(c))), sig_symbol_rev(c));
    }
    v[0] = v[1];
  }
  return v[from];
}

uint64_t kr_context::sig_prefix(symbol_id sym, uint64_t len) const {
  const rlcfg& g = *g_;
  if (len > g.exp_len(sym)) throw std::out_of_range("sig_prefix: len out of range");
  uint64_t acc = 0;
  while (len > 0) {
    if (len == g.exp_len(sym)) {
      acc = addmod(mulmod(acc, pow_base(len)), sig_symbol(sym));
      break;
    }
    const rule& r = g.rule_of(sym);  // sym must be a nonterminal here
    if (r.is_run) {
      uint64_t bl = g.exp_len(r.base);
      uint64_t q = len / bl, rem = len % bl;
      if (q > 0) {
        uint64_t rep = repeat(sig_symbol(r.base), bl, q);
        acc = addmod(mulmod(acc, pow_base(q * bl)), rep);
      }
      len = rem;
      sym = r.base;
    } else {
      const auto& w = g.prefix_lens(sym);
      // largest i with w[i] <= len
      size_t i = std::upper_bound(w.begin(), w.end(), len) - w.begin() - 1;
      if (i > 0) acc = addmod(mulmod(acc, pow_base(w[i])), rule_prefix_sig(sym, static_cast<uint32_t>(i)));
      len -= w[i];
      sym = r.rhs[i];
    }
  }
  return acc;
}

uint64_t kr_context::sig_suffix_rev(symbol_id sym, uint64_t len) const {
  const rlcfg& g = *g_;
  if (len > g.exp_len(sym)) throw std::out_of_range("sig_suffix_rev: len out of range");
  uint64_t acc = 0;
  while (len > 0) {
    uint64_t total = g.exp_len(sym);
    if (len == total) {
      acc = addmod(mulmod(acc, pow_base(len)), sig_symbol_rev(sym));
      break;
    }
    const rule& r = g.rule_of(sym);
    if (r.is_run) {
      uint64_t bl = g.exp_len(r.base);
      uint64_t q = len / bl, rem = len % bl;
      if (q > 0) {
        uint64_t rep = repeat(sig_symbol_rev(r.base), bl, q);
        acc = addmod(mulmod(acc, pow_base(q * bl)), rep);
      }
      len = rem;
      sym = r.base;
    } else {
      const auto& w = g.prefix_lens(sym);
      uint64_t start = total - len + 1;  // suffix start within exp(sym), >= 2 here
      // child containing `start` (1-based): smallest i with w[i] >= start
      size_t i = std::upper_bound(w.begin(), w.end(), start - 1) - w.begin();
      uint64_t whole = total - w[i];  // children i+1..t fully inside the suffix
      if (whole > 0) {
        acc = addmod(mulmod(acc, pow_base(whole)),
                     rule_suffix_rev_sig(sym, static_cast<uint32_t>(i + 1)));
        len -= whole;
      }
      sym = r.rhs[i - 1];
    }
  }
  return acc;
}

}  // namespace memgram
