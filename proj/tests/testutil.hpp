#pragma once

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "memgram/grammar.hpp"

// minimal check harness: counts failures, prints context, nonzero exit
inline int g_failures = 0;
inline int g_checks = 0;

#define CHECK(cond)                                                          \
  do {                                                                       \
    ++g_checks;                                                              \
    if (!(cond)) {                                                           \
      ++g_failures;                                                          \
      std::cerr << __FILE__ << ":" << __LINE__ << ": CHECK failed: " #cond   \
                << std::endl;                                                \
    }                                                                        \
  } while (0)

#define CHECK_EQ(a, b)                                                        \
  do {                                                                        \
    ++g_checks;                                                               \
    auto va = (a);                                                            \
    auto vb = (b);                                                            \
    if (!(va == vb)) {                                                        \
      ++g_failures;                                                           \
      std::cerr << __FILE__ << ":" << __LINE__ << ": CHECK_EQ failed: " #a    \
                << " vs " #b << std::endl;                                    \
    }                                                                         \
  } while (0)

#define CHECK_THROWS(expr)                                                    \
  do {                                                                        \
    ++g_checks;                                                               \
    bool thrown = false;                                                      \
    try {                                                                     \
      (void)(expr);                                                           \
    } catch (const std::exception&) {                                         \
      thrown = true;                                                          \
    }                                                                         \
    if (!thrown) {                                                            \
      ++g_failures;                                                           \
      std::cerr << __FILE__ << ":" << __LINE__ << ": expected throw: " #expr  \
                << std::endl;                                                 \
    }                                                                         \
  } while (0)

inline int test_summary(const char* name) {
  if (g_failures) {
    std::cerr << name << ": " << g_failures << "/" << g_checks << " checks failed" << std::endl;
    return 1;
  }
  std::cout << name << ": " << g_checks << " checks passed" << std::endl;
  return 0;
}

namespace tu {

using namespace memgram;

// The running example: T = "la_sal_sala_la_ensalada" with nonterminals
// A = "la_", B = "sal", C = "sala" (= B a), D = "sala_" (= C _), E = "da",
// S = A B _ D A e n C E. exp(C) = "sala"; the grammar tree leaves induce the
// parse l.a._.s.a.l._.sal.a._.la_.e.n.sala.d.a... with "sal", "sala", "la_"
// appearing as pruned leaves.
struct fixture {
  rlcfg g;
  symbol_id A, B, C, D, E, S;
  std::string text = "la_sal_sala_la_ensalada";
};

inline fixture make_fixture() {
  fixture f;
  auto sym = [](char c) { return static_cast<symbol_id>(static_cast<unsigned char>(c)); };
  f.A = f.g.add_sequence({sym('l'), sym('a'), sym('_')});
  f.B = f.g.add_sequence({sym('s'), sym('a'), sym('l')});
  f.C = f.g.add_sequence({f.B, sym('a')});
  f.D = f.g.add_sequence({f.C, sym('_')});
  f.E = f.g.add_sequence({sym('d'), sym('a')});
  f.S = f.g.add_sequence({f.A, f.B, sym('_'), f.D, f.A, sym('e'), sym('n'), f.C, f.E});
  f.g.set_start(f.S);
  return f;
}

inline sym_string random_text(uint32_t n, uint32_t sigma, std::mt19937_64& rng) {
  sym_string t(n);
  for (auto& c : t) c = static_cast<symbol_id>(rng() % sigma);
  return t;
}

// base string copied `copies` times with point substitutions at `rate`
inline sym_string repetitive_text(uint32_t base_len, uint32_t copies, double rate, uint32_t sigma,
                                  std::mt19937_64& rng) {
  sym_string base = random_text(base_len, sigma, rng);
  sym_string t;
  t.reserve(static_cast<size_t>(base_len) * copies);
  for (uint32_t c = 0; c < copies; ++c) {
    sym_string copy = base;
    for (auto& ch : copy)
      if (std::uniform_real_distribution<double>(0, 1)(rng) < rate)
        ch = static_cast<symbol_id>(rng() % sigma);
    t.insert(t.end(), copy.begin(), copy.end());
  }
  return t;
}

// mix of text substrings (possibly mutated) and random stretches
inline sym_string related_pattern(const sym_string& t, uint32_t m, uint32_t sigma,
                                  std::mt19937_64& rng) {
  sym_string p;
  while (p.size() < m) {
    if (!t.empty() && rng() % 4 != 0) {
      uint32_t len = 1 + static_cast<uint32_t>(rng() % std::min<size_t>(m - p.size(), t.size()));
      uint32_t at = static_cast<uint32_t>(rng() % (t.size() - len + 1));
      for (uint32_t q = 0; q < len; ++q) {
        symbol_id c = t[at + q];
        if (rng() % 50 == 0) c = static_cast<symbol_id>(rng() % sigma);
        p.push_back(c);
      }
    } else {
      p.push_back(static_cast<symbol_id>(rng() % sigma));
    }
  }
  p.resize(m);
  return p;
}

}  // namespace tu
