#pragma once

#include <cassert>
#include <optional>
#include <span>
#include <unordered_map>

#include "memgram/common.hpp"

namespace memgram {

// Run-length context-free grammar: one rule per nonterminal, either a
// sequence A -> B_1 ... B_t (t >= 1) or a run A -> B^t (t >= 2, size 2).
struct rule {
  bool is_run = false;
  sym_string rhs;       // sequence children (empty for run rules)
  symbol_id base = 0;   // run base
  uint64_t count = 0;   // run count, >= 2
  uint64_t size() const { return is_run ? 2 : rhs.size(); }
};

class rlcfg {
 public:
  // Children must already exist (terminals or previously added nonterminals),
  // which keeps the grammar acyclic by construction.
  symbol_id add_sequence(sym_string children);
  symbol_id add_run(symbol_id base, uint64_t count);
  void set_start(symbol_id s);

  symbol_id start() const { return start_; }
  size_t num_rules() const { return rules_.size(); }
  bool is_nonterminal(symbol_id s) const {
    return s >= NUM_TERMINALS && s < NUM_TERMINALS + rules_.size();
  }
  uint32_t nt_index(symbol_id s) const { return s - NUM_TERMINALS; }
  symbol_id nt_symbol(uint32_t idx) const { return NUM_TERMINALS + idx; }
  const rule& rule_of(symbol_id nt) const { return rules_[nt_index(nt)]; }

  uint64_t exp_len(symbol_id s) const {
    return is_terminal(s) ? 1 : exp_len_[nt_index(s)];
  }
  // Sum of rule sizes (run rules count 2).
  uint64_t grammar_size() const { return size_; }
  uint64_t text_len() const { return exp_len(start_); }

  // Cumulative child expansion lengths of a sequence rule: w[i] = |exp(B_1..B_i)|,
  // w[0] = 0. Built on demand, shared by extraction and signatures.
  const std::vector<uint64_t>& prefix_lens(symbol_id nt) const;

  // T[from..from+len-1] of exp(sym), 1-based, appended to out.
  void extract(symbol_id sym, uint64_t from, uint64_t len, sym_string& out) const;
  sym_string expansion_prefix(symbol_id sym, uint64_t len) const;
  sym_string expansion_suffix(symbol_id sym, uint64_t len) const;
  symbol_id char_at(symbol_id sym, uint64_t pos) const;

  // T[i..j] for the generated text.
  sym_string access(uint64_t i, uint64_t j) const;

 private:
  std::vector<rule> rules_;
  std::vector<uint64_t> exp_len_;
  mutable std::vector<std::vector<uint64_t>> prefix_lens_;  // lazy per rule
  symbol_id start_ = 0;
  uint64_t size_ = 0;
};

// True iff the grammar's rules satisfy all structural invariants and the start
// symbol expands to exactly `text`. On failure `why` carries the first
// violation found, naming the offending nonterminal.
bool validate(const rlcfg& g, std::span<const symbol_id> text, std::string* why = nullptr);

// ---------------------------------------------------------------------------
// Grammar tree: the parse tree pruned to one internal node per nonterminal
// (the leftmost), with run rules keeping the first child plus one special
// leaf standing for the remaining t-1 copies. Node count is grammar_size()+1.

struct gt_node {
  symbol_id label = 0;      // symbol; for special run leaves, the run base
  uint32_t parent = 0;      // root points to itself
  uint64_t span_start = 0;  // 1-based text position of the node's expansion
  uint64_t exp_len = 0;
  bool internal = false;
  bool special = false;     // run-remainder leaf B^[copies]
  uint64_t copies = 0;      // for special leaves: t-1
};

class grammar_tree {
 public:
  explicit grammar_tree(const rlcfg& g);

  const rlcfg& grammar() const { return *g_; }
  size_t node_count() const { return nodes_.size(); }
  const gt_node& node(uint32_t v) const { return nodes_[v]; }
  uint32_t root() const { return 0; }
  uint32_t internal_node(symbol_id nt) const { return internal_of_[g_->nt_index(nt)]; }

  // Leaves in left-to-right order; their expansions are the phrases of T.
  const std::vector<uint32_t>& leaves() const { return leaves_; }
  const std::vector<uint64_t>& phrase_ends() const { return phrase_ends_; }

  // Leaf occurrences of a symbol other than its internal node. Special run
  // leaves contribute `copies` occurrences at stride exp_len(label).
  struct copy_entry {
    uint32_t node;
    uint64_t count;   // number of copies this entry stands for
    uint64_t stride;  // offset step between consecutive copies
  };
  const std::vector<copy_entry>& copies_of(symbol_id s) const {
    static const std::vector<copy_entry> kEmpty;
    auto it = copies_.find(s);
    return it == copies_.end() ? kEmpty : it->second;
  }

  // Nearest ancestor that is the root or whose label occurs again in the tree,
  // with the offset of this node's span within that ancestor's span.
  uint32_t shortcut(uint32_t v) const { return shortcut_[v]; }
  uint64_t shortcut_delta(uint32_t v) const { return shortcut_delta_[v]; }
  bool has_copies(symbol_id s) const { return copies_.find(s) != copies_.end(); }

 private:
  const rlcfg* g_;
  std::vector<gt_node> nodes_;
  std::vector<uint32_t> internal_of_;
  std::vector<uint32_t> leaves_;
  std::vector<uint64_t> phrase_ends_;
  std::unordered_map<symbol_id, std::vector<copy_entry>> copies_;
  std::vector<uint32_t> shortcut_;
  std::vector<uint64_t> shortcut_delta_;
};

// ---------------------------------------------------------------------------
// Karp-Rabin signatures over a 61-bit Mersenne prime. kappa("") = 0 and
// kappa(S.c) = kappa(S)*base + c, so kappa(S.S') = kappa(S)*base^|S'| + kappa(S').
// Signatures are accelerators only: every fingerprint-guided match is
// confirmed by extraction before anything depends on it.

class kr_context {
 public:
  static constexpr uint64_t MOD = (1ULL << 61) - 1;

  kr_context() = default;
  kr_context(const rlcfg& g, uint64_t seed);
  // Rebuild the per-symbol tables against `g` with a previously chosen base.
  static kr_context with_base(const rlcfg& g, uint64_t base);

  uint64_t base() const { return base_; }

  static uint64_t mulmod(uint64_t a, uint64_t b) {
    __uint128_t t = static_cast<__uint128_t>(a) * b;
    uint64_t lo = static_cast<uint64_t>(t & MOD);
    uint64_t hi = static_cast<uint64_t>(t >> 61);
    uint64_t r = lo + hi;
    if (r >= MOD) r -= MOD;
    return r;
  }
  static uint64_t addmod(uint64_t a, uint64_t b) {
    uint64_t r = a + b;
    if (r >= MOD) r -= MOD;
    return r;
  }
  static uint64_t submod(uint64_t a, uint64_t b) { return addmod(a, MOD - b % MOD); }

  uint64_t pow_base(uint64_t e) const;
  uint64_t sig_char(symbol_id c) const { return (c + 1) % MOD; }
  // kappa(S . S') from kappa(S), kappa(S') and |S'|.
  uint64_t compose(uint64_t sa, uint64_t sb, uint64_t len_b) const {
    return addmod(mulmod(sa, pow_base(len_b)), sb);
  }
  uint64_t sig_of(std::span<const symbol_id> s) const;

  uint64_t sig_symbol(symbol_id s) const {
    return is_terminal(s) ? sig_char(s) : sym_fwd_[s - NUM_TERMINALS];
  }
  uint64_t sig_symbol_rev(symbol_id s) const {
    return is_terminal(s) ? sig_char(s) : sym_rev_[s - NUM_TERMINALS];
  }

  // kappa(exp(sym)[1..len]) and kappa(reverse(exp(sym))[1..len]).
  uint64_t sig_prefix(symbol_id sym, uint64_t len) const;
  uint64_t sig_suffix_rev(symbol_id sym, uint64_t len) const;

  // kappa of sig repeated `times`, where sig covers `len` characters.
  uint64_t repeat(uint64_t sig, uint64_t len, uint64_t times) const;

  // Per-rule cumulative signatures, lazy like rlcfg::prefix_lens.
  uint64_t rule_prefix_sig(symbol_id nt, uint32_t upto) const;      // kappa(exp(B_1..B_upto))
  uint64_t rule_suffix_rev_sig(symbol_id nt, uint32_t from) const;  // kappa(rev(exp(B_from..B_t)))

 private:
  const rlcfg* g_ = nullptr;
  uint64_t base_ = 0;
  std::vector<uint64_t> sym_fwd_, sym_rev_, sym_pow_;
  mutable std::vector<std::vector<uint64_t>> rule_pre_;
  mutable std::vector<std::vector<uint64_t>> rule_suf_rev_;
  std::vector<uint64_t> pow_cache_;

  void build_tables();
  uint64_t pow_slow(uint64_t e) const;
};

}  // namespace memgram
