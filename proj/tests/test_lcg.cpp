#include "memgram/lcg.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "testutil.hpp"

using namespace memgram;

static void test_build_examples() {
  {
    auto r = build_lcg(to_symbols("aaaaaaaa"), 1);
    CHECK(validate(r.grammar, to_symbols("aaaaaaaa")));
    CHECK_EQ(r.grammar.grammar_size(), 2u);
    CHECK_EQ(r.levels.seq[1].size(), 1u);  // |S_1| = 1 after the run rule
    const rule& rl = r.grammar.rule_of(r.grammar.start());
    CHECK(rl.is_run && rl.base == 'a' && rl.count == 8);
  }
  {
    // no two equal adjacent symbols: rle is the identity at level 1
    sym_string t = to_symbols("abcabcabc");
    auto r = build_lcg(t, 3);
    CHECK(validate(r.grammar, t));
    CHECK_EQ(r.levels.seq[1], r.levels.seq[0]);
  }
  {
    // doubled random text compresses below n in most seeds
    std::mt19937_64 rng(11);
    sym_string base = tu::random_text(512, 16, rng);
    sym_string t = base;
    t.insert(t.end(), base.begin(), base.end());
    int smaller = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      auto r = build_lcg(t, seed);
      CHECK(validate(r.grammar, t));
      if (r.grammar.grammar_size() < t.size()) ++smaller;
    }
    CHECK(smaller >= 9);
  }
  {
    // determinism: same text, same seed, identical grammar and levels
    std::mt19937_64 rng(21);
    sym_string t = tu::repetitive_text(100, 5, 0.02, 4, rng);
    auto a = build_lcg(t, 77);
    auto b = build_lcg(t, 77);
    CHECK_EQ(a.grammar.grammar_size(), b.grammar.grammar_size());
    CHECK_EQ(a.grammar.num_rules(), b.grammar.num_rules());
    CHECK_EQ(a.levels.num_levels, b.levels.num_levels);
    CHECK(a.levels.seq == b.levels.seq);
    CHECK(a.levels.creation_level == b.levels.creation_level);
    // single-char text
    auto c = build_lcg(to_symbols("z"), 0);
    CHECK(validate(c.grammar, to_symbols("z")));
  }
}

static void test_replay() {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 20; ++iter) {
    sym_string t = iter % 2 ? tu::repetitive_text(60, 6, 0.05, 4, rng)
                            : tu::random_text(1 + rng() % 300, 2 + rng() % 16, rng);
    auto r = build_lcg(t, iter);
    lcg_levels lv = replay_lcg(r.grammar, r.levels.creation_level, r.levels.eff_seed);
    CHECK(lv.seq == r.levels.seq);
    CHECK(lv.ends == r.levels.ends);
    CHECK_EQ(lv.num_levels, r.levels.num_levels);
  }
}

static void test_local_consistency() {
  std::mt19937_64 rng(41);
  // identical windows are trivially consistent; short windows vacuous
  {
    sym_string t = tu::random_text(400, 4, rng);
    auto r = build_lcg(t, 5);
    CHECK(local_consistency_check(r.grammar, r.levels, 10, 200, 10, 200));
    CHECK(local_consistency_check(r.grammar, r.levels, 3, 10, 3, 10));
    CHECK_THROWS(local_consistency_check(r.grammar, r.levels, 1, 50, 2, 51));
  }
  // doubled text: every aligned pair of equal substrings, all levels
  for (int iter = 0; iter < 6; ++iter) {
    uint32_t half = 200 + static_cast<uint32_t>(rng() % 400);
    sym_string base = tu::random_text(half, 2 + rng() % 4, rng);
    sym_string t = base;
    t.insert(t.end(), base.begin(), base.end());
    auto r = build_lcg(t, iter);
    for (int q = 0; q < 60; ++q) {
      uint64_t len = 2 + rng() % half;
      uint64_t i = 1 + rng() % (half - len + 1);
      CHECK(local_consistency_check(r.grammar, r.levels, i, i + len - 1, i + half,
                                    i + half + len - 1));
    }
    // and a full sweep of length-200 windows
    for (uint64_t i = 1; i + 199 <= half; i += 37) {
      CHECK(local_consistency_check(r.grammar, r.levels, i, i + 199, i + half, i + half + 199));
    }
  }
}

static void test_pattern_alignment() {
  // a pattern equal to a mid-text substring parses like the text away from
  // its extremes: every known block in the safe region matches S_k
  std::mt19937_64 rng(51);
  for (int iter = 0; iter < 12; ++iter) {
    sym_string t = tu::repetitive_text(150, 8, 0.03, 4, rng);
    auto r = build_lcg(t, iter);
    uint64_t n = t.size();
    uint64_t len = 300 + rng() % 300;
    uint64_t a = 1 + rng() % (n - len);
    sym_string p(t.begin() + a - 1, t.begin() + a - 1 + len);
    pattern_levels plv(r.grammar, r.levels, p);
    for (uint32_t k = 1; k < std::min<uint32_t>(plv.num_levels(), r.levels.num_levels + 1); ++k) {
      uint64_t alpha = lcg_alpha(k + 1);
      if (3 * alpha + 2 > len) break;
      // pattern block ends inside the safe region, translated to text positions
      std::set<uint64_t> pat_ends, text_ends;
      for (const auto& e : plv.level(k)) {
        if (e.end >= 2 * alpha && e.end + alpha <= len) pat_ends.insert(a - 1 + e.end);
      }
      std::vector<uint64_t> te;
      r.levels.ends_in_range(k, a - 1 + 2 * alpha, a - 1 + len - alpha, te);
      text_ends.insert(te.begin(), te.end());
      for (uint64_t e : pat_ends) CHECK(text_ends.count(e));
      for (uint64_t e : text_ends) CHECK(pat_ends.count(e));
    }
  }
  {
    // a symbol absent from the text parses into fresh blocks without failing
    sym_string t = to_symbols("abracadabra");
    auto r = build_lcg(t, 9);
    sym_string p = to_symbols("xyx");
    pattern_levels plv(r.grammar, r.levels, p);
    CHECK(plv.num_levels() >= 1);
    CHECK_EQ(plv.level(0).size(), 3u);
  }
  {
    // P = T parses to a single block at the top
    sym_string t = to_symbols("mississippimississippi");
    auto r = build_lcg(t, 13);
    pattern_levels plv(r.grammar, r.levels, t);
    CHECK_EQ(plv.level(plv.num_levels() - 1).size(), 1u);
  }
}

static void test_window_and_cuts() {
  std::mt19937_64 rng(61);
  for (int iter = 0; iter < 25; ++iter) {
    uint32_t sigma = 2 + rng() % 4;
    sym_string t = iter % 2 ? tu::repetitive_text(64, 8, 0.05, sigma, rng)
                            : tu::random_text(200 + rng() % 200, sigma, rng);
    auto r = build_lcg(t, iter);
    uint32_t m = 2 + static_cast<uint32_t>(rng() % 120);
    sym_string p = tu::related_pattern(t, m, sigma, rng);
    pattern_levels plv(r.grammar, r.levels, p);

    // drive a random window walk; incremental cut set == rebuilt cut set
    std::vector<uint32_t> inc, scratch;
    uint32_t i = 1, j = 0;
    for (int step = 0; step < 400; ++step) {
      bool can_grow_j = j < m;
      bool can_grow_i = i <= j;
      if (!can_grow_j && !can_grow_i) break;
      bool gj = can_grow_j && (!can_grow_i || rng() % 2);
      if (gj) {
        plv.grow_j();
        ++j;
      } else {
        plv.grow_i();
        ++i;
      }
      CHECK_EQ(plv.win_i(), i);
      CHECK_EQ(plv.win_j(), j);
      plv.cut_set(inc);
      plv.cut_set_rebuild(i, j, scratch);
      CHECK_EQ(inc, scratch);
      if (i <= j) {
        CHECK(!inc.empty());
        CHECK_EQ(inc.back(), j);  // window end always a candidate
        CHECK(std::is_sorted(inc.begin(), inc.end()));
        for (uint32_t c : inc) CHECK(c >= i && c <= j);
      } else {
        CHECK(inc.empty());
      }
    }
    // total cursor movement bounded by the total parse length, once per
    // cursor family (i and j walk each level independently)
    CHECK(plv.cursor_increments() <= 2 * plv.total_level_length());
    // a pure grow-j sweep touches each level element at most once
    pattern_levels plv2(r.grammar, r.levels, p);
    for (uint32_t q = 0; q < m; ++q) plv2.grow_j();
    CHECK(plv2.cursor_increments() <= plv2.total_level_length());
  }
  {
    // window of length 1 has only the window end as a candidate
    sym_string t = to_symbols("abcabc");
    auto r = build_lcg(t, 1);
    sym_string p = to_symbols("abc");
    pattern_levels plv(r.grammar, r.levels, p);
    plv.grow_j();
    std::vector<uint32_t> cuts;
    plv.cut_set(cuts);
    CHECK_EQ(cuts, (std::vector<uint32_t>{1}));
  }
}

static void test_cutset_size_growth() {
  // |M| stays proportional to log m across window lengths
  std::mt19937_64 rng(71);
  sym_string t = tu::repetitive_text(512, 32, 0.01, 4, rng);
  auto r = build_lcg(t, 3);
  double worst_ratio = 0;
  for (uint32_t w : {32u, 128u, 512u, 2048u}) {
    sym_string p = tu::related_pattern(t, w, 4, rng);
    pattern_levels plv(r.grammar, r.levels, p);
    size_t maxm = 0;
    std::vector<uint32_t> cuts;
    for (uint32_t j = 0; j < w; ++j) {
      plv.grow_j();
      plv.cut_set(cuts);
      maxm = std::max(maxm, cuts.size());
    }
    double ratio = static_cast<double>(maxm) / (1.0 + std::log2(w));
    worst_ratio = std::max(worst_ratio, ratio);
  }
  CHECK(worst_ratio < 40.0);
}

int main() {
  test_build_examples();
  test_replay();
  test_local_consistency();
  test_pattern_alignment();
  test_window_and_cuts();
  test_cutset_size_growth();
  return test_summary("test_lcg");
}
