#pragma once

#include <functional>

#include "memgram/common.hpp"

namespace memgram {

// Compacted trie over a lexicographically sorted multiset of strings, stored
// by rank only; characters come from accessor callbacks. Each node stores its
// string depth, leaf-rank range [l..r], parent and the representative leaf
// rank used to read its string. Strings that are prefixes of others (or
// duplicates) hang off their locus through zero-or-more terminator edges,
// which blind descent never follows.
class patricia_tree {
 public:
  static constexpr symbol_id TERM = UINT32_MAX;

  struct node {
    uint32_t parent = 0;
    uint64_t depth = 0;
    uint32_t l = 0, r = 0;  // 1-based leaf ranks
    uint32_t rep = 0;       // leaf rank whose string prefixes this node's string
    std::vector<std::pair<symbol_id, uint32_t>> kids;  // (branch char, node)
  };

  // Positions on the tree, possibly in the middle of an edge: `node` is the
  // explicit node at or below the position, `depth` its string depth.
  struct locus {
    uint32_t node = 0;
    uint64_t depth = 0;
  };

  using char_fn = std::function<symbol_id(uint32_t rank, uint64_t pos)>;  // 1-based pos
  using len_fn = std::function<uint64_t(uint32_t rank)>;

  patricia_tree() = default;
  // Build from `n` sorted strings; lcp[i] = LCP(string i, string i+1), 0-based.
  patricia_tree(uint32_t n, const len_fn& len, const char_fn& chr,
                const std::vector<uint64_t>& lcp);

  uint32_t root() const { return 0; }
  size_t node_count() const { return nodes_.size(); }
  uint32_t leaf_count() const { return nleaves_; }
  const node& at(uint32_t v) const { return nodes_[v]; }
  uint32_t leaf_of_rank(uint32_t rank) const { return leaf_of_rank_[rank - 1]; }

  std::pair<uint32_t, uint32_t> range(const locus& p) const {
    const node& nd = nodes_[p.node];
    return {nd.l, nd.r};
  }

  // child of v whose edge starts with c; UINT32_MAX if none
  uint32_t child_by(uint32_t v, symbol_id c) const;

  // Deepest position whose string is a prefix of the probe, verified through
  // the representative's characters (rep_chr(rank, pos)). Optionally records
  // the explicit nodes on the root-to-locus path (including the carrier).
  locus locate(uint64_t probe_len, const std::function<symbol_id(uint64_t)>& probe,
               const char_fn& rep_chr, std::vector<uint32_t>* path = nullptr) const;

  // Highest position with string depth >= target, as a locus at exactly
  // `target` on its edge. target must be <= from.depth.
  locus weighted_ancestor(locus from, uint64_t target) const;

  // Lowest common ancestor of the leaves with the given ranks (1-based).
  uint32_t lca_leaves(uint32_t rank_a, uint32_t rank_b) const;

  bool is_explicit(const locus& p) const { return nodes_[p.node].depth == p.depth; }

 private:
  std::vector<node> nodes_;
  std::vector<uint32_t> leaf_of_rank_;
  uint32_t nleaves_ = 0;
  // Euler tour + sparse table for LCA
  std::vector<uint32_t> tdepth_;
  std::vector<uint32_t> euler_, first_, lg_;
  std::vector<std::vector<uint32_t>> sparse_;  // positions of minimum depth

  void build_lca();
};

}  // namespace memgram
