#include "memgram/apps.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include "memgram/engine.hpp"

namespace memgram {

std::vector<rlz_phrase> rlz_compress(const mem_index& ref, std::span<const symbol_id> text,
                                     mem_algo algo) {
  std::vector<rlz_phrase> out;
  if (text.empty()) return out;
  auto mems = find_mems(ref, text, algo);
  matching_stats ms = matching_statistics(mems, static_cast<uint32_t>(text.size()));
  for (size_t q = 0; q < text.size(); ++q) {
    if (ms.len[q] == 0)
      throw std::invalid_argument("rlz: symbol of T at position " + std::to_string(q + 1) +
                                  " does not occur in the reference");
  }
  // greedy cover: phrase = the longest reference match starting at p
  size_t c = 0;
  uint64_t p = 1;
  uint64_t n = text.size();
  while (p <= n) {
    while (c + 1 < mems.size() && mems[c + 1].i <= p) ++c;
    const mem_record& r = mems[c];
    assert(r.i <= p && p <= r.j);
    uint64_t j = r.j;                       // phrase covers T[p..j]
    uint64_t end_in_ref = r.p;              // occurrence end of T[r.i..r.j]
    uint64_t b = end_in_ref;                // phrase maps to R[a..b]
    uint64_t a = b - (j - p);
    out.push_back({a, b});
    p = j + 1;
  }
  return out;
}

sym_string rlz_decompress(std::span<const symbol_id> reference,
                          const std::vector<rlz_phrase>& phrases) {
  sym_string out;
  for (const rlz_phrase& ph : phrases) {
    if (ph.a < 1 || ph.a > ph.b || ph.b > reference.size())
      throw std::out_of_range("rlz: phrase out of reference bounds");
    out.insert(out.end(), reference.begin() + (ph.a - 1), reference.begin() + ph.b);
  }
  return out;
}

std::vector<overlap_edge> all_pairs_suffix_prefix(const std::vector<sym_string>& reads,
                                                  const overlap_options& opts) {
  std::vector<overlap_edge> edges;
  if (reads.empty()) return edges;
  // concatenate read_i '$' ...; terminator positions identify reads
  sym_string text;
  std::vector<uint64_t> term_pos(reads.size());
  for (size_t t = 0; t < reads.size(); ++t) {
    for (symbol_id c : reads[t]) {
      if (c >= 256) throw std::invalid_argument("reads must be plain bytes");
      text.push_back(c);
    }
    text.push_back(SENTINEL_DOLLAR);
    term_pos[t] = text.size();
  }
  mem_index ix = mem_index::build(text, opts.seed, opts.retries);

  auto read_of_terminator = [&](text_pos pos) -> int64_t {
    auto it = std::lower_bound(term_pos.begin(), term_pos.end(), pos);
    if (it == term_pos.end() || *it != pos) return -1;
    return it - term_pos.begin();
  };

  std::map<std::pair<uint32_t, uint32_t>, uint64_t> longest;
  std::vector<text_pos> ends;
  for (uint32_t u = 0; u < reads.size(); ++u) {
    const sym_string& read = reads[u];
    uint64_t mlen = read.size();
    if (mlen == 0) continue;
    quad_engine eng(ix, read);
    for (uint32_t j = 1; j <= mlen; ++j) {
      eng.step();  // window now covers P[1..j]
      if (eng.win_i() != 1)
        throw std::logic_error("overlap engine: read prefix lost from the window");
      if (j >= opts.lmin) {
        auto snap = eng.save();
        uint64_t h0 = eng.state_hash();
        eng.sim_step_char(SENTINEL_DOLLAR);
        if (eng.win_i() == 1) {
          eng.collect_prefix_match_ends(ends);
          for (text_pos e : ends) {
            // e is the position of the matched terminator
            int64_t v = read_of_terminator(e);
            if (v < 0) continue;  // cannot happen: every '$' ends a read
            if (static_cast<uint32_t>(v) == u && j == mlen) continue;  // trivial self match
            if (opts.all_matches) {
              edges.push_back({static_cast<uint32_t>(v), u, j});
            } else {
              auto key = std::make_pair(static_cast<uint32_t>(v), u);
              auto it = longest.find(key);
              if (it == longest.end() || it->second < j) longest[key] = j;
            }
          }
        }
        eng.restore(snap);
        if (eng.state_hash() != h0)
          throw std::logic_error("overlap engine: snapshot restore diverged");
      }
      if (opts.hash_probe) opts.hash_probe(u, j, eng.state_hash());
    }
  }
  if (!opts.all_matches) {
    for (const auto& [key, len] : longest) edges.push_back({key.first, key.second, len});
  }
  std::sort(edges.begin(), edges.end(), [](const overlap_edge& a, const overlap_edge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    return a.len < b.len;
  });
  return edges;
}

}  // namespace memgram
