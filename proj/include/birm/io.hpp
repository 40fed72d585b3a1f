#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "birm/cooccurrence.hpp"

namespace birm::io {

std::string trimmed(std::string_view line);

// One token per line, '#' comments and blank lines skipped.
std::vector<std::string> read_word_list(std::istream& in);
std::vector<std::string> read_word_list(const std::string& path);

// Sections headed [NAME]; returns name -> tokens. Unknown section names and
// tokens before the first header are errors.
std::map<std::string, std::vector<std::string>> read_sections(
    std::istream& in, const std::vector<std::string>& allowed);

std::uint64_t fnv1a(std::string_view data);
std::uint64_t fnv1a_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Binary co-occurrence file: 16-byte header (magic "BIRMCOOC", version u16,
// bucket-count u16, reserved u32, little-endian), then packed 17-byte records
// (a u32, b u32, x i8, weight f64). Collapsed matrices are written with
// bucket-count 1 and x = 0. Records are sorted by (a, b, x).
void write_scored(const std::string& path, const ScoredCooccurrence& sc);
ScoredCooccurrence read_scored(const std::string& path, std::int32_t vocab_size);
void write_matrix(const std::string& path, const CooccurrenceMatrix& m);
CooccurrenceMatrix read_matrix(const std::string& path, std::int32_t vocab_size);

// Peeks at the header; collapsed files report bucket radius 0.
std::int32_t peek_bucket_radius(const std::string& path);

}  // namespace birm::io
