#include "birm/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "birm/errors.hpp"

namespace birm::io {

namespace {

constexpr char kMagic[8] = {'B', 'I', 'R', 'M', 'C', 'O', 'O', 'C'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kRecordSize = 17;

void put_u16(char* p, std::uint16_t v) {
  p[0] = char(v & 0xFF);
  p[1] = char(v >> 8);
}
void put_u32(char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = char((v >> (8 * i)) & 0xFF);
}
void put_u64(char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = char((v >> (8 * i)) & 0xFF);
}
std::uint16_t get_u16(const char* p) {
  return std::uint16_t(std::uint8_t(p[0])) |
         (std::uint16_t(std::uint8_t(p[1])) << 8);
}
std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::uint8_t(p[i]);
  return v;
}
std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | std::uint8_t(p[i]);
  return v;
}

void write_header(std::ostream& out, std::uint16_t bucket_count) {
  char h[16] = {};
  std::memcpy(h, kMagic, 8);
  put_u16(h + 8, kVersion);
  put_u16(h + 10, bucket_count);
  put_u32(h + 12, 0);
  out.write(h, sizeof(h));
}

std::uint16_t read_header(std::istream& in, const std::string& path) {
  char h[16];
  in.read(h, sizeof(h));
  if (in.gcount() != sizeof(h) || std::memcmp(h, kMagic, 8) != 0)
    throw DataError(path + ": not a BIRMCOOC file");
  if (get_u16(h + 8) != kVersion)
    throw DataError(path + ": unsupported version");
  const std::uint16_t nb = get_u16(h + 10);
  if (nb == 0 || nb % 2 == 0) throw DataError(path + ": bad bucket count");
  return nb;
}

void put_record(char* p, std::uint32_t a, std::uint32_t b, std::int8_t x,
                double w) {
  put_u32(p, a);
  put_u32(p + 4, b);
  p[8] = char(x);
  put_u64(p + 9, std::bit_cast<std::uint64_t>(w));
}

}  // namespace

std::string trimmed(std::string_view line) {
  const std::string_view ws = " \t\r\n";
  const std::size_t b = line.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const std::size_t e = line.find_last_not_of(ws);
  return std::string(line.substr(b, e - b + 1));
}

std::vector<std::string> read_word_list(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    words.push_back(std::move(t));
  }
  return words;
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_word_list(in);
}

std::map<std::string, std::vector<std::string>> read_sections(
    std::istream& in, const std::vector<std::string>& allowed) {
  std::map<std::string, std::vector<std::string>> out;
  std::vector<std::string>* section = nullptr;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      const std::string name = t.substr(1, t.size() - 2);
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
        throw DataError("unknown section " + t);
      section = &out[name];
    } else {
      if (!section) throw DataError("token before first section header: " + t);
      section->push_back(t);
    }
  }
  return out;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

void write_scored(const std::string& path, const ScoredCooccurrence& sc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_header(out, std::uint16_t(sc.bucket_count()));
  const std::int32_t radius = sc.bucket_radius();
  char rec[kRecordSize];
  sc.for_each_pair_sorted(
      [&](std::int32_t a, std::int32_t b, std::span<const double> row) {
        for (std::int32_t x = -radius; x <= radius; ++x) {
          const double w = row[x + radius];
          if (w == 0.0) continue;
          put_record(rec, std::uint32_t(a), std::uint32_t(b), std::int8_t(x), w);
          out.write(rec, kRecordSize);
        }
      });
  if (!out) throw DataError("failed writing " + path);
}

ScoredCooccurrence read_scored(const std::string& path, std::int32_t vocab_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::uint16_t nb = read_header(in, path);
  const std::int32_t radius = (nb - 1) / 2;
  if (radius < 1) throw DataError(path + ": collapsed file, expected scored");
  ScoredCooccurrence sc(vocab_size, radius);
  char rec[kRecordSize];
  while (in.read(rec, kRecordSize)) {
    const std::uint32_t a = get_u32(rec);
    const std::uint32_t b = get_u32(rec + 4);
    const std::int32_t x = std::int8_t(rec[8]);
    const double w = std::bit_cast<double>(get_u64(rec + 9));
    if (a >= std::uint32_t(vocab_size) || b >= std::uint32_t(vocab_size))
      throw DataError(path + ": record id outside vocabulary");
    if (x < -radius || x > radius) throw DataError(path + ": bucket out of range");
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DataError(path + ": bad record weight");
    sc.add(std::int32_t(a), std::int32_t(b), x, w);
  }
  if (in.gcount() != 0) throw DataError(path + ": truncated record");
  return sc;
}

void write_matrix(const std::string& path, const CooccurrenceMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_header(out, 1);
  char rec[kRecordSize];
  m.for_each_sorted([&](std::int32_t a, std::int32_t b, double w) {
    put_record(rec, std::uint32_t(a), std::uint32_t(b), 0, w);
    out.write(rec, kRecordSize);
  });
  if (!out) throw DataError("failed writing " + path);
}

CooccurrenceMatrix read_matrix(const std::string& path, std::int32_t vocab_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::uint16_t nb = read_header(in, path);
  if (nb != 1) throw DataError(path + ": scored file, expected collapsed");
  CooccurrenceMatrix m(vocab_size);
  char rec[kRecordSize];
  while (in.read(rec, kRecordSize)) {
    const std::uint32_t a = get_u32(rec);
    const std::uint32_t b = get_u32(rec + 4);
    const double w = std::bit_cast<double>(get_u64(rec + 9));
    if (a >= std::uint32_t(vocab_size) || b >= std::uint32_t(vocab_size))
      throw DataError(path + ": record id outside vocabulary");
    if (rec[8] != 0) throw DataError(path + ": nonzero bucket in collapsed file");
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DataError(path + ": bad record weight");
    m.add(std::int32_t(a), std::int32_t(b), w);
  }
  if (in.gcount() != 0) throw DataError(path + ": truncated record");
  return m;
}

std::int32_t peek_bucket_radius(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  const std::uint16_t nb = read_header(in, path);
  return (nb - 1) / 2;
}

}  // namespace birm::io
