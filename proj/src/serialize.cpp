#include "memgram/serialize.hpp"

#include <fstream>
#include <sstream>

namespace memgram {

namespace {

struct fnv_writer {
  std::ostream* out;
  uint64_t hash = 0xcbf29ce484222325ULL;
  void bytes(const void* p, size_t n) {
    const uint8_t* b = static_cast<const uint8_t*>(p);
    for (size_t i = 0; i < n; ++i) {
      hash ^= b[i];
      hash *= 0x100000001b3ULL;
    }
    out->write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u8(uint8_t v) { bytes(&v, 1); }
  void u32(uint32_t v) { bytes(&v, 4); }
  void u64(uint64_t v) { bytes(&v, 8); }
};

struct fnv_reader {
  std::istream* in;
  uint64_t hash = 0xcbf29ce484222325ULL;
  void bytes(void* p, size_t n) {
    in->read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!*in) throw std::runtime_error("bundle: truncated input");
    const uint8_t* b = static_cast<const uint8_t*>(p);
    for (size_t i = 0; i < n; ++i) {
      hash ^= b[i];
      hash *= 0x100000001b3ULL;
    }
  }
  uint8_t u8() {
    uint8_t v;
    bytes(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint32_t v;
    bytes(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    bytes(&v, 8);
    return v;
  }
};

void write_rules(fnv_writer& w, const rlcfg& g) {
  w.u32(static_cast<uint32_t>(g.num_rules()));
  w.u32(g.start());
  for (uint32_t idx = 0; idx < g.num_rules(); ++idx) {
    const rule& r = g.rule_of(g.nt_symbol(idx));
    if (r.is_run) {
      w.u8(1);
      w.u32(r.base);
      w.u64(r.count);
    } else {
      w.u8(0);
      w.u32(static_cast<uint32_t>(r.rhs.size()));
      for (symbol_id c : r.rhs) w.u32(c);
    }
  }
}

rlcfg read_rules(fnv_reader& rd) {
  uint32_t nrules = rd.u32();
  symbol_id start = rd.u32();
  rlcfg g;
  for (uint32_t idx = 0; idx < nrules; ++idx) {
    uint8_t tag = rd.u8();
    if (tag == 1) {
      symbol_id base = rd.u32();
      uint64_t count = rd.u64();
      g.add_run(base, count);
    } else if (tag == 0) {
      uint32_t t = rd.u32();
      if (t == 0) throw std::runtime_error("grammar: empty right-hand side");
      sym_string rhs(t);
      for (uint32_t q = 0; q < t; ++q) rhs[q] = rd.u32();
      g.add_sequence(std::move(rhs));
    } else {
      throw std::runtime_error("grammar: unknown rule tag");
    }
  }
  g.set_start(start);
  return g;
}

}  // namespace

void save_bundle(const mem_index& ix, std::ostream& out) {
  fnv_writer w{&out};
  w.bytes("MGIX", 4);
  w.u32(BUNDLE_VERSION);
  w.u64(ix.text_len());
  w.u32(NUM_TERMINALS);
  w.u64(ix.kr().base());
  w.u8(ix.has_levels() ? 1 : 0);
  write_rules(w, ix.grammar());
  if (ix.has_levels()) {
    w.u64(ix.levels().eff_seed);
    for (uint32_t l : ix.levels().creation_level) w.u32(l);
  }
  uint64_t h = w.hash;
  w.u64(h);
  if (!out) throw std::runtime_error("bundle: write failed");
}

mem_index load_bundle(std::istream& in) {
  fnv_reader rd{&in};
  char magic[4];
  rd.bytes(magic, 4);
  if (std::string_view(magic, 4) != "MGIX") throw std::runtime_error("bundle: bad magic");
  uint32_t version = rd.u32();
  if (version != BUNDLE_VERSION)
    throw std::runtime_error("bundle: unsupported version " + std::to_string(version));
  uint64_t n = rd.u64();
  uint32_t sigma = rd.u32();
  if (sigma != NUM_TERMINALS) throw std::runtime_error("bundle: alphabet size mismatch");
  uint64_t kr_base = rd.u64();
  bool has_levels = rd.u8() != 0;
  rlcfg g = read_rules(rd);
  std::optional<lcg_levels> levels;
  if (has_levels) {
    uint64_t eff = rd.u64();
    std::vector<uint32_t> creation(g.num_rules());
    for (auto& c : creation) c = rd.u32();
    uint64_t expect = rd.hash;
    uint64_t stored = rd.u64();
    if (stored != expect) throw std::runtime_error("bundle: checksum mismatch");
    if (g.text_len() != n) throw std::runtime_error("bundle: text length mismatch");
    levels = replay_lcg(g, creation, eff);
    return mem_index::assemble(std::move(g), std::move(levels), kr_base);
  }
  uint64_t expect = rd.hash;
  uint64_t stored = rd.u64();
  if (stored != expect) throw std::runtime_error("bundle: checksum mismatch");
  if (g.text_len() != n) throw std::runtime_error("bundle: text length mismatch");
  return mem_index::assemble(std::move(g), std::nullopt, kr_base);
}

void save_bundle_file(const mem_index& ix, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  save_bundle(ix, f);
}

mem_index load_bundle_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  return load_bundle(f);
}

void save_grammar_file(const rlcfg& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  fnv_writer w{&f};
  w.bytes("MGRL", 4);
  w.u32(BUNDLE_VERSION);
  w.u64(g.text_len());
  write_rules(w, g);
  w.u64(w.hash);
  if (!f) throw std::runtime_error("grammar: write failed");
}

rlcfg load_grammar_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  fnv_reader rd{&f};
  char magic[4];
  rd.bytes(magic, 4);
  if (std::string_view(magic, 4) != "MGRL") throw std::runtime_error("grammar: bad magic");
  uint32_t version = rd.u32();
  if (version != BUNDLE_VERSION)
    throw std::runtime_error("grammar: unsupported version " + std::to_string(version));
  uint64_t n = rd.u64();
  rlcfg g = read_rules(rd);
  uint64_t expect = rd.hash;
  uint64_t stored = rd.u64();
  if (stored != expect) throw std::runtime_error("grammar: checksum mismatch");
  if (g.text_len() != n) throw std::runtime_error("grammar: text length mismatch");
  return g;
}

}  // namespace memgram
