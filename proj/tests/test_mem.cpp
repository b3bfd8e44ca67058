#include "memgram/mem.hpp"

#include <algorithm>

#include "memgram/engine.hpp"
#include "memgram/oracle.hpp"
#include "testutil.hpp"

using namespace memgram;

namespace {

std::vector<std::pair<uint32_t, uint32_t>> ranges(const std::vector<mem_record>& v) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (const auto& r : v) out.emplace_back(r.i, r.j);
  return out;
}

void check_occurrences(std::span<const symbol_id> t, std::span<const symbol_id> p,
                       const std::vector<mem_record>& recs) {
  for (const mem_record& r : recs) {
    uint64_t len = r.j - r.i + 1;
    CHECK(r.p >= len && r.p <= t.size());
    CHECK(std::equal(p.begin() + r.i - 1, p.begin() + r.j, t.begin() + r.p - len));
  }
}

void compare_all(const mem_index& ix, std::span<const symbol_id> t, std::span<const symbol_id> p,
                 bool with_lcg) {
  auto naive = oracle::naive_mems(t, p);
  auto stree = stree_mems(t, p);
  auto quad = find_mems(ix, p, mem_algo::quadratic);
  CHECK_EQ(ranges(naive), ranges(stree));
  CHECK_EQ(ranges(naive), ranges(quad));
  check_occurrences(t, p, quad);
  if (with_lcg) {
    auto lcg = find_mems(ix, p, mem_algo::lcg);
    CHECK_EQ(ranges(naive), ranges(lcg));
    check_occurrences(t, p, lcg);
  }
}

void test_fixture() {
  sym_string t = to_symbols("la_sal_sala_la_ensalada");
  mem_index ix = mem_index::build(t, 7);
  {
    auto m = find_mems(ix, to_symbols("lasal"));
    CHECK_EQ(ranges(m), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 2}, {3, 5}}));
    auto q = find_mems(ix, to_symbols("lasal"), mem_algo::quadratic);
    CHECK_EQ(ranges(q), ranges(m));
  }
  {
    auto m = find_mems(ix, to_symbols("salad"));
    CHECK_EQ(ranges(m), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 5}}));
  }
  CHECK(find_mems(ix, to_symbols("XYZ")).empty());
  CHECK(find_mems(ix, sym_string{}).empty());
  {
    auto m = find_mems(ix, t);  // P = T
    CHECK_EQ(ranges(m), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 23}}));
  }
  {
    auto m = find_kmems(ix, to_symbols("sala"), 2);
    CHECK_EQ(ranges(m), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 4}}));
    auto m3 = find_kmems(ix, to_symbols("sala"), 3);
    CHECK_EQ(ranges(m3), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 3}, {3, 4}}));
  }
  {
    auto m = find_mums(ix, to_symbols("ens"));
    CHECK_EQ(ranges(m), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 3}}));
    CHECK(find_mums(ix, to_symbols("la")).empty());
  }
  {
    auto m = find_krare(ix, to_symbols("sala"), 2);
    CHECK_EQ(ranges(m), (std::vector<std::pair<uint32_t, uint32_t>>{{1, 4}}));
    CHECK(find_krare(ix, to_symbols("sala"), 1).empty());
  }
  {
    auto c = count_pattern_bounded(ix, to_symbols("ens"), 1);
    CHECK(!c.exceeded && c.value == 1);
    auto c2 = count_pattern_bounded(ix, to_symbols("la"), 3);
    CHECK(c2.exceeded && c2.value == 4);
    auto c3 = count_pattern_bounded(ix, to_symbols("zzz"), 5);
    CHECK(!c3.exceeded && c3.value == 0);
  }
}

void test_exhaustive_small() {
  // every (T,P) with n <= 10, m <= 5, binary alphabet, all four algorithms
  for (uint32_t n = 1; n <= 10; ++n) {
    for (uint32_t tc = 0; tc < (1u << n); ++tc) {
      sym_string t(n);
      for (uint32_t q = 0; q < n; ++q) t[q] = (tc >> q) & 1;
      mem_index ix = mem_index::build(t, 1);
      for (uint32_t m = 1; m <= 5; ++m) {
        for (uint32_t pc = 0; pc < (1u << m); ++pc) {
          sym_string p(m);
          for (uint32_t q = 0; q < m; ++q) p[q] = (pc >> q) & 1;
          auto naive = oracle::naive_mems(t, p);
          auto quad = find_mems(ix, p, mem_algo::quadratic);
          auto lcg = find_mems(ix, p, mem_algo::lcg);
          bool ok = ranges(naive) == ranges(quad) && ranges(naive) == ranges(lcg);
          CHECK(ok);
          if (!ok) {
            std::cerr << "T=";
            for (auto c : t) std::cerr << int(c);
            std::cerr << " P=";
            for (auto c : p) std::cerr << int(c);
            std::cerr << "\n";
            return;
          }
        }
      }
    }
  }
}

void test_random_equivalence() {
  std::mt19937_64 rng(0x1234);
  for (int iter = 0; iter < 350; ++iter) {
    uint32_t sigma = iter % 3 == 0 ? 2 : (iter % 3 == 1 ? 4 : 16);
    sym_string t = iter % 4 == 3 ? tu::repetitive_text(50, 10, 0.02, sigma, rng)
                                 : tu::random_text(2 + rng() % 400, sigma, rng);
    mem_index ix = mem_index::build(t, iter);
    for (int q = 0; q < 6; ++q) {
      sym_string p = tu::related_pattern(t, 1 + rng() % 80, sigma, rng);
      compare_all(ix, t, p, true);
    }
  }
}

void test_kmem_mum_krare_random() {
  std::mt19937_64 rng(0x777);
  for (int iter = 0; iter < 120; ++iter) {
    uint32_t sigma = iter % 2 ? 2 : 4;
    sym_string t = iter % 3 == 0 ? tu::repetitive_text(40, 8, 0.05, sigma, rng)
                                 : tu::random_text(2 + rng() % 200, sigma, rng);
    mem_index ix = mem_index::build(t, iter);
    for (int q = 0; q < 4; ++q) {
      sym_string p = tu::related_pattern(t, 1 + rng() % 50, sigma, rng);
      for (uint64_t k : {1, 2, 3, 5, 10}) {
        auto nk = oracle::naive_kmems(t, p, k);
        auto qk = find_kmems(ix, p, k, mem_algo::quadratic);
        auto lk = find_kmems(ix, p, k, mem_algo::lcg);
        CHECK_EQ(ranges(nk), ranges(qk));
        CHECK_EQ(ranges(nk), ranges(lk));
        check_occurrences(t, p, qk);
        check_occurrences(t, p, lk);
        auto nr = oracle::naive_krare(t, p, k);
        auto qr = find_krare(ix, p, k, mem_algo::quadratic);
        auto lr = find_krare(ix, p, k, mem_algo::lcg);
        CHECK_EQ(ranges(nr), ranges(qr));
        CHECK_EQ(ranges(nr), ranges(lr));
      }
      // k = 1 degenerations
      CHECK_EQ(ranges(find_kmems(ix, p, 1)), ranges(find_mems(ix, p)));
      CHECK_EQ(ranges(find_krare(ix, p, 1)), ranges(find_mums(ix, p)));
      auto nm = oracle::naive_mums(t, p);
      CHECK_EQ(ranges(find_mums(ix, p)), ranges(nm));
      // bounded counting against naive counts on the whole pattern
      auto cnt = oracle::naive_count(t, p);
      for (uint64_t b : {0, 1, 3}) {
        auto bc = count_pattern_bounded(ix, p, b);
        if (cnt <= b) {
          CHECK(!bc.exceeded && bc.value == cnt);
        } else {
          CHECK(bc.exceeded && bc.value == b + 1);
        }
      }
    }
  }
}

void test_matching_statistics() {
  {
    std::vector<mem_record> mems{{1, 2, 7}, {3, 5, 9}};
    auto ms = matching_statistics(mems, 5);
    CHECK_EQ(ms.len, (std::vector<uint32_t>{2, 1, 3, 2, 1}));
    auto back = mems_from_ms(ms);
    CHECK_EQ(ranges(back), ranges(mems));
  }
  {
    auto ms = matching_statistics({}, 4);
    CHECK_EQ(ms.len, (std::vector<uint32_t>{0, 0, 0, 0}));
    CHECK(mems_from_ms(ms).empty());
  }
  CHECK_THROWS(matching_statistics({{3, 4, 9}, {3, 5, 9}}, 6));
  CHECK_THROWS(matching_statistics({{1, 6, 9}}, 4));
  // round trip on random valid lists
  std::mt19937_64 rng(0x55);
  for (int iter = 0; iter < 1000; ++iter) {
    uint32_t m = 1 + rng() % 60;
    std::vector<mem_record> mems;
    uint32_t i = 1, j = 0;
    while (true) {
      i = i + rng() % 4;
      uint32_t nj = std::max(j + 1, i) + rng() % 4;
      if (i > m || nj > m) break;
      j = nj;
      mems.push_back({i, j, 1000 + j});
      ++i;
      if (rng() % 3 == 0 && rng() % 4 == 0) break;
    }
    auto ms = matching_statistics(mems, m);
    auto back = mems_from_ms(ms);
    CHECK_EQ(ranges(back), ranges(mems));
  }
  // ms of find_mems equals naive per-position longest matches
  std::mt19937_64 rng2(0x99);
  for (int iter = 0; iter < 60; ++iter) {
    uint32_t sigma = 2 + rng2() % 4;
    sym_string t = tu::random_text(30 + rng2() % 150, sigma, rng2);
    sym_string p = tu::related_pattern(t, 1 + rng2() % 40, sigma, rng2);
    mem_index ix = mem_index::build(t, iter);
    auto ms = matching_statistics(find_mems(ix, p), static_cast<uint32_t>(p.size()));
    auto nms = oracle::naive_ms(t, p);
    CHECK_EQ(ms.len, nms.len);
    for (uint32_t q = 1; q <= p.size(); ++q) {
      if (ms.len[q - 1]) {
        uint64_t len = ms.len[q - 1];
        CHECK(std::equal(p.begin() + q - 1, p.begin() + q - 1 + len,
                         t.begin() + ms.pos[q - 1] - len));
      }
    }
  }
}

void test_collection() {
  {
    std::vector<std::vector<mem_record>> lists{{{1, 3, 10}, {2, 6, 20}}};
    CHECK_EQ(ranges(collection_mems(lists)), ranges(lists[0]));
  }
  {
    std::vector<std::vector<mem_record>> lists{{{1, 3, 10}, {2, 6, 20}},
                                               {{2, 4, 30}, {5, 6, 40}}};
    auto got = collection_mems(lists);
    CHECK_EQ(ranges(got), (std::vector<std::pair<uint32_t, uint32_t>>{{2, 4}, {5, 6}}));
  }
  {
    std::vector<std::vector<mem_record>> lists{{{1, 3, 10}}, {}};
    CHECK(collection_mems(lists).empty());
  }
  // brute force: report segments contained in a segment of every list,
  // keeping only the maximal ones
  std::mt19937_64 rng(0xabc);
  for (int iter = 0; iter < 400; ++iter) {
    uint32_t m = 8 + rng() % 24;
    uint32_t tau = 2 + rng() % 3;
    std::vector<std::vector<mem_record>> lists(tau);
    bool any_empty = false;
    for (auto& l : lists) {
      uint32_t i = 1, j = 0;
      while (true) {
        i = i + rng() % 3;
        uint32_t nj = std::max(j + 1, i) + rng() % 5;
        if (i > m || nj > m) break;
        j = nj;
        l.push_back({i, j, 100});
        ++i;
      }
      any_empty |= l.empty();
    }
    auto got = collection_mems(lists);
    if (any_empty) {
      CHECK(got.empty());
      continue;
    }
    auto contained = [&](uint32_t a, uint32_t b) {
      for (const auto& l : lists) {
        bool ok = false;
        for (const auto& r : l) ok |= r.i <= a && b <= r.j;
        if (!ok) return false;
      }
      return true;
    };
    std::vector<std::pair<uint32_t, uint32_t>> want;
    for (uint32_t a = 1; a <= m; ++a)
      for (uint32_t b = a; b <= m; ++b)
        if (contained(a, b) && !(a > 1 && contained(a - 1, b)) &&
            !(b < m && contained(a, b + 1)))
          want.emplace_back(a, b);
    CHECK_EQ(ranges(got), want);
  }
}

void test_long_patterns() {
  // m > n engages the slab decomposition
  std::mt19937_64 rng(0xdef);
  for (int iter = 0; iter < 40; ++iter) {
    uint32_t sigma = 2 + rng() % 3;
    sym_string t = tu::random_text(8 + rng() % 40, sigma, rng);
    mem_index ix = mem_index::build(t, iter);
    uint32_t m = static_cast<uint32_t>(t.size() * (3 + rng() % 3) + rng() % 7);
    sym_string p = tu::related_pattern(t, m, sigma, rng);
    auto naive = oracle::naive_mems(t, p);
    auto got = find_mems(ix, p);
    CHECK_EQ(ranges(naive), ranges(got));
    check_occurrences(t, p, got);
    auto naive_k = oracle::naive_kmems(t, p, 2);
    CHECK_EQ(ranges(naive_k), ranges(find_kmems(ix, p, 2)));
    auto naive_r = oracle::naive_krare(t, p, 2);
    CHECK_EQ(ranges(naive_r), ranges(find_krare(ix, p, 2)));
  }
  // pattern containing the whole text repeatedly (whole-text seam matches)
  sym_string t = to_symbols("abcab");
  mem_index ix = mem_index::build(t, 3);
  sym_string p;
  for (int q = 0; q < 5; ++q) p.insert(p.end(), t.begin(), t.end());
  auto naive = oracle::naive_mems(t, p);
  CHECK_EQ(ranges(find_mems(ix, p)), ranges(naive));
}

void test_stats_instrumentation() {
  std::mt19937_64 rng(0x31415);
  sym_string t = tu::repetitive_text(128, 16, 0.01, 4, rng);
  mem_index ix = mem_index::build(t, 5);
  sym_string p = tu::related_pattern(t, 512, 4, rng);
  query_stats st;
  find_mems(ix, p, mem_algo::lcg, &st);
  CHECK(st.max_active > 0);
  CHECK(st.max_cutset > 0);
  CHECK(st.max_active <= st.max_cutset + 1);
}

}  // namespace

int main() {
  test_fixture();
  test_exhaustive_small();
  test_random_equivalence();
  test_kmem_mum_krare_random();
  test_matching_statistics();
  test_collection();
  test_long_patterns();
  test_stats_instrumentation();
  return test_summary("test_mem");
}
