#include "memgram/oracle.hpp"

#include <algorithm>

#include "testutil.hpp"

using namespace memgram;

static void check_records_extract(std::span<const symbol_id> t, std::span<const symbol_id> p,
                                  const std::vector<mem_record>& recs) {
  uint32_t prev_i = 0, prev_j = 0;
  for (const mem_record& r : recs) {
    CHECK(r.i >= 1 && r.i <= r.j && r.j <= p.size());
    CHECK(r.i > prev_i && r.j > prev_j);
    prev_i = r.i;
    prev_j = r.j;
    uint64_t len = r.j - r.i + 1;
    CHECK(r.p >= len && r.p <= t.size());
    CHECK(std::equal(p.begin() + r.i - 1, p.begin() + r.j, t.begin() + r.p - len));
  }
}

static void test_fixtures() {
  sym_string t = to_symbols("la_sal_sala_la_ensalada");
  {
    auto m = oracle::naive_mems(t, to_symbols("lasal"));
    std::vector<std::pair<uint32_t, uint32_t>> got;
    for (auto& r : m) got.emplace_back(r.i, r.j);
    CHECK_EQ(got, (std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}, {3, 5}}));
  }
  {
    auto m = oracle::naive_mems(t, to_symbols("salad"));
    CHECK_EQ(m.size(), 1u);
    CHECK(m[0].i == 1 && m[0].j == 5);
  }
  CHECK(oracle::naive_mems(t, to_symbols("XYZ")).empty());
  {
    auto m = oracle::naive_kmems(t, to_symbols("sala"), 2);
    CHECK_EQ(m.size(), 1u);
    CHECK(m[0].i == 1 && m[0].j == 4);
  }
  {
    auto m = oracle::naive_kmems(t, to_symbols("sala"), 3);
    std::vector<std::pair<uint32_t, uint32_t>> got;
    for (auto& r : m) got.emplace_back(r.i, r.j);
    CHECK_EQ(got, (std::vector<std::pair<uint32_t, uint32_t>>{{1, 3}, {3, 4}}));
  }
  {
    auto m = oracle::naive_mums(t, to_symbols("ens"));
    CHECK_EQ(m.size(), 1u);
    CHECK(m[0].i == 1 && m[0].j == 3);
  }
  CHECK(oracle::naive_mums(t, to_symbols("la")).empty());
  CHECK_EQ(oracle::naive_count(t, to_symbols("la")), 4u);
  CHECK_EQ(oracle::naive_count(t, to_symbols("ens")), 1u);
  {
    auto m = oracle::naive_krare(t, to_symbols("sala"), 2);
    CHECK_EQ(m.size(), 1u);
    CHECK(m[0].i == 1 && m[0].j == 4);
    CHECK(oracle::naive_krare(t, to_symbols("sala"), 1).empty());
  }
  {
    // single char occurring once in both
    auto m = oracle::naive_mums(t, to_symbols("n"));
    CHECK_EQ(m.size(), 1u);
    CHECK(m[0].i == 1 && m[0].j == 1);
  }
}

static void test_cross_oracle() {
  std::mt19937_64 rng(101);
  for (int iter = 0; iter < 1200; ++iter) {
    uint32_t sigma = iter % 3 == 0 ? 2 : (iter % 3 == 1 ? 4 : 16);
    sym_string t = tu::random_text(1 + rng() % 120, sigma, rng);
    sym_string p = tu::related_pattern(t, 1 + rng() % 40, sigma, rng);
    auto a = oracle::naive_mems(t, p);
    auto b = stree_mems(t, p);
    check_records_extract(t, p, a);
    check_records_extract(t, p, b);
    std::vector<std::pair<uint32_t, uint32_t>> ra, rb;
    for (auto& r : a) ra.emplace_back(r.i, r.j);
    for (auto& r : b) rb.emplace_back(r.i, r.j);
    CHECK_EQ(ra, rb);
  }
  // full-pattern occurrence gives a single MEM
  std::mt19937_64 rng2(5);
  sym_string t = tu::random_text(300, 4, rng2);
  sym_string p(t.begin() + 30, t.begin() + 80);
  auto m = stree_mems(t, p);
  CHECK_EQ(m.size(), 1u);
  CHECK(m[0].i == 1 && m[0].j == p.size());
}

static void test_exhaustive_binary() {
  // all (T,P), n <= 9, m <= 5 over a binary alphabet: both oracles agree
  for (uint32_t n = 1; n <= 9; ++n) {
    for (uint32_t tc = 0; tc < (1u << n); ++tc) {
      sym_string t(n);
      for (uint32_t q = 0; q < n; ++q) t[q] = (tc >> q) & 1;
      for (uint32_t m = 1; m <= 5; ++m) {
        for (uint32_t pc = 0; pc < (1u << m); ++pc) {
          sym_string p(m);
          for (uint32_t q = 0; q < m; ++q) p[q] = (pc >> q) & 1;
          auto a = oracle::naive_mems(t, p);
          auto b = stree_mems(t, p);
          bool same = a.size() == b.size();
          for (size_t q = 0; same && q < a.size(); ++q)
            same = a[q].i == b[q].i && a[q].j == b[q].j;
          if (!same) {
            CHECK(same);
            return;
          }
        }
      }
    }
  }
  CHECK(true);
}

static void test_ms() {
  sym_string t = to_symbols("la_sal_sala_la_ensalada");
  sym_string p = to_symbols("lasal");
  auto ms = oracle::naive_ms(t, p);
  CHECK_EQ(ms.len, (std::vector<uint32_t>{2, 1, 3, 2, 1}));
  for (uint32_t q = 1; q <= p.size(); ++q) {
    if (ms.len[q - 1]) {
      uint64_t len = ms.len[q - 1];
      CHECK(std::equal(p.begin() + q - 1, p.begin() + q - 1 + len,
                       t.begin() + ms.pos[q - 1] - len));
    }
  }
}

static void test_sam_counts() {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 150; ++iter) {
    sym_string t = tu::random_text(2 + rng() % 60, 2 + rng() % 3, rng);
    suffix_automaton sam(t);
    for (int q = 0; q < 25; ++q) {
      uint32_t len = 1 + rng() % std::min<size_t>(8, t.size());
      uint32_t at = rng() % (t.size() - len + 1);
      sym_string w(t.begin() + at, t.begin() + at + len);
      suffix_automaton::cursor c{};
      bool ok = true;
      for (symbol_id ch : w) ok = ok && sam.extend(c, ch);
      CHECK(ok);
      CHECK_EQ(sam.occ_count(c.state), oracle::naive_count(t, w));
      // shrink tracking: drop characters from the left one by one
      for (uint32_t drop = 1; drop < len; ++drop) {
        sam.shrink(c, len - drop);
        sym_string w2(w.begin() + drop, w.end());
        CHECK_EQ(sam.occ_count(c.state), oracle::naive_count(t, w2));
      }
    }
  }
}

int main() {
  test_fixtures();
  test_cross_oracle();
  test_exhaustive_binary();
  test_ms();
  test_sam_counts();
  return test_summary("test_oracle");
}
