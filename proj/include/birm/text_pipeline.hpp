#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace birm {

// A normalized sentence: lowercase tokens, clitics and punctuation split off.
using Sentence = std::vector<std::string>;

struct NormalizeOptions {
  std::size_t min_sentence_len = 5;
  bool keep_punct = true;  // punctuation runs kept as their own tokens
};

struct NormalizeStats {
  std::uint64_t lines_in = 0;
  std::uint64_t sentences_out = 0;
  std::uint64_t dropped_short = 0;
  std::uint64_t invalid_utf8_lines = 0;
  std::uint64_t tokens_out = 0;
};

bool valid_utf8(std::string_view s);

// Tokenizes one line: lowercase, split punctuation runs off words, split
// English clitics (n't 's 're 've 'll 'd 'm). Idempotent on its own output.
std::vector<std::string> tokenize_line(std::string_view line, bool keep_punct);

// One sentence per input line. Lines shorter than min_sentence_len after
// tokenization are dropped; invalid UTF-8 lines are skipped and tallied.
void normalize_corpus(std::istream& in, const NormalizeOptions& opts,
                      const std::function<void(Sentence&&)>& sink,
                      NormalizeStats* stats = nullptr);
std::vector<Sentence> normalize_corpus(std::istream& in,
                                       const NormalizeOptions& opts = {},
                                       NormalizeStats* stats = nullptr);

// Dense token <-> id mapping ordered by corpus count descending, then token
// ascending. Only tokens with count >= min_count are kept.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary from_sentences(const std::vector<Sentence>& sentences,
                                   std::int64_t min_count);
  static Vocabulary from_counts(
      const std::unordered_map<std::string, std::int64_t>& counts,
      std::int64_t min_count);

  std::int32_t id(const std::string& token) const;  // -1 if absent
  const std::string& token(std::int32_t id) const { return tokens_[id]; }
  std::int64_t count(std::int32_t id) const { return counts_[id]; }
  std::int32_t size() const { return static_cast<std::int32_t>(tokens_.size()); }
  bool empty() const { return tokens_.empty(); }
  std::int64_t total_count() const;

  // One "token<SPACE>count" per line, in id order.
  void save(std::ostream& out) const;
  void save(const std::string& path) const;
  static Vocabulary load(std::istream& in);
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, std::int32_t> index_;

  void rebuild_index();
};

}  // namespace birm
