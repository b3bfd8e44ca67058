#pragma once

#include "memgram/common.hpp"

namespace memgram {

// One maximal match P[i..j] with the end position p of one occurrence in T:
// T[p-(j-i)..p] = P[i..j]. Lists are sorted by strictly increasing i and j.
struct mem_record {
  uint32_t i = 0, j = 0;
  text_pos p = 0;
  bool operator==(const mem_record& o) const = default;
};

// M[q] = length of the longest prefix of P[q..] occurring in T (0 if none),
// with the end position of one such occurrence.
struct matching_stats {
  std::vector<uint32_t> len;  // index 0 = position 1
  std::vector<text_pos> pos;
  bool operator==(const matching_stats& o) const = default;
};

}  // namespace memgram
