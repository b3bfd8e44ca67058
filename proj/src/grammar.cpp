#include "memgram/grammar.hpp"

#include <algorithm>

namespace memgram {

symbol_id rlcfg::add_sequence(sym_string children) {
  if (children.empty()) throw std::invalid_argument("empty sequence rule");
  uint64_t len = 0;
  symbol_id id = nt_symbol(static_cast<uint32_t>(rules_.size()));
  for (symbol_id c : children) {
    if (!is_terminal(c) && c >= id) throw std::invalid_argument("rule references undefined symbol");
    len += exp_len(c);
  }
  size_ += children.size();
  rules_.push_back(rule{false, std::move(children), 0, 0});
  exp_len_.push_back(len);
  return id;
}

symbol_id rlcfg::add_run(symbol_id base, uint64_t count) {
  if (count < 2) throw std::invalid_argument("run rule needs count >= 2");
  symbol_id id = nt_symbol(static_cast<uint32_t>(rules_.size()));
  if (!is_terminal(base) && base >= id) throw std::invalid_argument("rule references undefined symbol");
  size_ += 2;
  rules_.push_back(rule{true, {}, base, count});
  exp_len_.push_back(exp_len(base) * count);
  return id;
}

void rlcfg::set_start(symbol_id s) {
  if (!is_nonterminal(s)) throw std::invalid_argument("start must be a nonterminal");
  start_ = s;
}

const std::vector<uint64_t>& rlcfg::prefix_lens(symbol_id nt) const {
  uint32_t idx = nt_index(nt);
  if (prefix_lens_.size() < rules_.size()) prefix_lens_.resize(rules_.size());
  auto& w = prefix_lens_[idx];
  if (w.empty()) {
    const rule& r = rules_[idx];
    if (r.is_run) {
      w = {0, exp_len(r.base), exp_len(r.base) * r.count};
    } else {
      w.resize(r.rhs.size() + 1);
      w[0] = 0;
      for (size_t i = 0; i < r.rhs.size(); ++i) w[i + 1] = w[i] + exp_len(r.rhs[i]);
    }
  }
  return w;
}

void rlcfg::extract(symbol_id sym, uint64_t from, uint64_t len, sym_string& out) const {
  if (len == 0) return;
  if (from < 1 || from + len - 1 > exp_len(sym)) throw std::out_of_range("extract: range out of bounds");
  struct frame {
    symbol_id sym;
    uint64_t from, len;
  };
  std::vector<frame> st;
  st.push_back({sym, from, len});
  while (!st.empty()) {
    frame f = st.back();
    st.pop_back();
    while (true) {
      if (is_terminal(f.sym)) {
        out.push_back(f.sym);
        break;
      }
      const rule& r = rules_[nt_index(f.sym)];
      if (r.is_run) {
        uint64_t bl = exp_len(r.base);
        uint64_t q0 = (f.from - 1) / bl;  // first copy touched (0-based)
        uint64_t off = f.from - q0 * bl;  // offset within that copy
        uint64_t take = std::min(f.len, bl - off + 1);
        if (take < f.len) st.push_back({f.sym, (q0 + 1) * bl + 1, f.len - take});
        f = {r.base, off, take};
        continue;
      }
      const auto& w = prefix_lens(f.sym);
      // child containing f.from: smallest i with w[i] >= from
      size_t i = std::upper_bound(w.begin(), w.end(), f.from - 1) - w.begin();
      uint64_t off = f.from - w[i - 1];
      uint64_t take = std::min(f.len, w[i] - w[i - 1] - off + 1);
      if (take < f.len) st.push_back({f.sym, w[i] + 1, f.len - take});
      f = {r.rhs[i - 1], off, take};
    }
  }
}

sym_string rlcfg::expansion_prefix(symbol_id sym, uint64_t len) const {
  if (len > exp_len(sym)) throw std::out_of_range("expansion_prefix: len out of range");
  sym_string out;
  out.reserve(len);
  extract(sym, 1, len, out);
  return out;
}

sym_string rlcfg::expansion_suffix(symbol_id sym, uint64_t len) const {
  uint64_t total = exp_len(sym);
  if (len > total) throw std::out_of_range("expansion_suffix: len out of range");
  sym_string out;
  out.reserve(len);
  extract(sym, total - len + 1, len, out);
  return out;
}

symbol_id rlcfg::char_at(symbol_id sym, uint64_t pos) const {
  if (pos < 1 || pos > exp_len(sym)) throw std::out_of_range("char_at: position out of range");
  while (!is_terminal(sym)) {
    const rule& r = rules_[nt_index(sym)];
    if (r.is_run) {
      uint64_t bl = exp_len(r.base);
      pos = (pos - 1) % bl + 1;
      sym = r.base;
    } else {
      const auto& w = prefix_lens(sym);
      size_t i = std::upper_bound(w.begin(), w.end(), pos - 1) - w.begin();
      pos -= w[i - 1];
      sym = r.rhs[i - 1];
    }
  }
  return sym;
}

sym_string rlcfg::access(uint64_t i, uint64_t j) const {
  if (i < 1 || i > j || j > text_len()) throw std::out_of_range("access: bad range");
  sym_string out;
  out.reserve(j - i + 1);
  extract(start_, i, j - i + 1, out);
  return out;
}

bool validate(const rlcfg& g, std::span<const symbol_id> text, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (g.num_rules() == 0) return fail("grammar has no rules");
  for (uint32_t idx = 0; idx < g.num_rules(); ++idx) {
    symbol_id nt = g.nt_symbol(idx);
    const rule& r = g.rule_of(nt);
    if (r.is_run) {
      if (r.count < 2) return fail("nonterminal " + std::to_string(idx) + ": run count < 2");
      if (!is_terminal(r.base) && !g.is_nonterminal(r.base))
        return fail("nonterminal " + std::to_string(idx) + ": undefined run base");
      if (g.exp_len(nt) != g.exp_len(r.base) * r.count)
        return fail("nonterminal " + std::to_string(idx) + ": inconsistent expansion length");
    } else {
      if (r.rhs.empty()) return fail("nonterminal " + std::to_string(idx) + ": empty right-hand side");
      uint64_t len = 0;
      for (symbol_id c : r.rhs) {
        if (!is_terminal(c) && !g.is_nonterminal(c))
          return fail("nonterminal " + std::to_string(idx) + ": undefined child symbol");
        len += g.exp_len(c);
      }
      if (len != g.exp_len(nt))
        return fail("nonterminal " + std::to_string(idx) + ": inconsistent expansion length");
    }
  }
  if (!g.is_nonterminal(g.start())) return fail("start symbol is not a nonterminal");
  if (g.text_len() != text.size())
    return fail("expansion length " + std::to_string(g.text_len()) + " != text length " +
                std::to_string(text.size()));
  // Streaming comparison of exp(start) against text, in blocks.
  constexpr uint64_t BLOCK = 4096;
  sym_string buf;
  for (uint64_t at = 0; at < text.size(); at += BLOCK) {
    uint64_t take = std::min<uint64_t>(BLOCK, text.size() - at);
    buf.clear();
    g.extract(g.start(), at + 1, take, buf);
    for (uint64_t k = 0; k < take; ++k) {
      if (buf[k] != text[at + k])
        return fail("expansion differs from text at position " + std::to_string(at + k + 1));
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

grammar_tree::grammar_tree(const rlcfg& g) : g_(&g) {
  internal_of_.assign(g.num_rules(), UINT32_MAX);
  struct frame {
    symbol_id sym;
    uint32_t parent;
    uint64_t start;
    bool special;      // emit a run-remainder leaf instead of expanding
    uint64_t copies;   // for special frames
  };
  std::vector<frame> st;
  st.push_back({g.start(), 0, 1, false, 0});
  while (!st.empty()) {
    frame f = st.back();
    st.pop_back();
    uint32_t id = static_cast<uint32_t>(nodes_.size());
    gt_node nd;
    nd.label = f.sym;
    nd.parent = nodes_.empty() ? 0 : f.parent;
    nd.span_start = f.start;
    if (f.special) {
      nd.exp_len = g.exp_len(f.sym) * f.copies;
      nd.special = true;
      nd.copies = f.copies;
      nodes_.push_back(nd);
      continue;
    }
    nd.exp_len = g.exp_len(f.sym);
    if (g.is_nonterminal(f.sym) && internal_of_[g.nt_index(f.sym)] == UINT32_MAX) {
      nd.internal = true;
      internal_of_[g.nt_index(f.sym)] = id;
      nodes_.push_back(nd);
      const rule& r = g.rule_of(f.sym);
      if (r.is_run) {
        uint64_t bl = g.exp_len(r.base);
        st.push_back({r.base, id, f.start + bl, true, r.count - 1});
        st.push_back({r.base, id, f.start, false, 0});
      } else {
        const auto& w = g.prefix_lens(f.sym);
        for (size_t k = r.rhs.size(); k-- > 0;)
          st.push_back({r.rhs[k], id, f.start + w[k], false, 0});
      }
    } else {
      nodes_.push_back(nd);  // leaf: terminal or repeated nonterminal
    }
  }

  // Leaves, phrase ends, copy lists.
  for (uint32_t v = 0; v < nodes_.size(); ++v) {
    const gt_node& nd = nodes_[v];
    if (nd.internal) continue;
    leaves_.push_back(v);
    uint64_t end = nd.span_start + nd.exp_len - 1;
    phrase_ends_.push_back(end);
    if (nd.special) {
      copies_[nd.label].push_back({v, nd.copies, g.exp_len(nd.label)});
    } else {
      copies_[nd.label].push_back({v, 1, 0});
    }
  }

  // Shortcut links: nearest ancestor that is the root or whose label occurs
  // again in the tree. Nodes are in DFS order, so parents precede children.
  shortcut_.assign(nodes_.size(), 0);
  shortcut_delta_.assign(nodes_.size(), 0);
  for (uint32_t v = 1; v < nodes_.size(); ++v) {
    uint32_t p = nodes_[v].parent;
    uint64_t delta = nodes_[v].span_start - nodes_[p].span_start;
    if (p == 0 || (nodes_[p].internal && has_copies(nodes_[p].label))) {
      shortcut_[v] = p;
      shortcut_delta_[v] = delta;
    } else {
      shortcut_[v] = shortcut_[p];
      shortcut_delta_[v] = delta + shortcut_delta_[p];
    }
  }
}

}  // namespace memgram
