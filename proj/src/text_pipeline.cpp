#include "birm/text_pipeline.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <sstream>

#include "birm/errors.hpp"

namespace birm {

namespace {

constexpr std::array<std::string_view, 7> kClitics = {"n't", "'s", "'re", "'ve",
                                                      "'ll", "'d", "'m"};

inline bool is_core_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' ||
         c >= 0x80;
}

inline bool is_alnum_or_high(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Splits trailing clitics recursively: "i'd've" -> "i" "'d" "'ve".
void append_word_token(std::string&& tok, std::vector<std::string>& out) {
  for (std::string_view suffix : kClitics) {
    if (tok.size() > suffix.size() &&
        std::string_view(tok).ends_with(suffix)) {
      std::string prefix = tok.substr(0, tok.size() - suffix.size());
      append_word_token(std::move(prefix), out);
      out.emplace_back(suffix);
      return;
    }
  }
  out.push_back(std::move(tok));
}

}  // namespace

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    unsigned char lo = 0x80, hi = 0xBF;
    if (c < 0x80) {
      ++i;
      continue;
    } else if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
    } else if (c == 0xE0) {
      len = 3; lo = 0xA0;
    } else if (c == 0xED) {
      len = 3; hi = 0x9F;  // no surrogates
    } else if ((c >= 0xE1 && c <= 0xEF)) {
      len = 3;
    } else if (c == 0xF0) {
      len = 4; lo = 0x90;
    } else if (c >= 0xF1 && c <= 0xF3) {
      len = 4;
    } else if (c == 0xF4) {
      len = 4; hi = 0x8F;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + k]);
      const unsigned char want_lo = (k == 1) ? lo : 0x80;
      const unsigned char want_hi = (k == 1) ? hi : 0xBF;
      if (cc < want_lo || cc > want_hi) return false;
    }
    i += len;
  }
  return true;
}

std::vector<std::string> tokenize_line(std::string_view line, bool keep_punct) {
  std::string low(line);
  for (char& ch : low) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch + 32);
  }

  // Classify bytes: word runs and punctuation runs become tokens. A hyphen
  // is part of a word only between two alphanumeric bytes ("twenty-one").
  enum class Cls { space, word, punct };
  const std::size_t n = low.size();
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(low[i]);
    Cls cls;
    if (is_space_byte(c)) {
      ++i;
      continue;
    } else if (is_core_word_byte(c)) {
      cls = Cls::word;
    } else if (c == '-' && i > 0 && i + 1 < n &&
               is_alnum_or_high(static_cast<unsigned char>(low[i - 1])) &&
               is_alnum_or_high(static_cast<unsigned char>(low[i + 1]))) {
      cls = Cls::word;
    } else {
      cls = Cls::punct;
    }
    std::size_t j = i + 1;
    while (j < n) {
      const unsigned char cj = static_cast<unsigned char>(low[j]);
      Cls cj_cls;
      if (is_space_byte(cj)) break;
      if (is_core_word_byte(cj)) {
        cj_cls = Cls::word;
      } else if (cj == '-' && j + 1 < n &&
                 is_alnum_or_high(static_cast<unsigned char>(low[j - 1])) &&
                 is_alnum_or_high(static_cast<unsigned char>(low[j + 1]))) {
        cj_cls = Cls::word;
      } else {
        cj_cls = Cls::punct;
      }
      if (cj_cls != cls) break;
      ++j;
    }
    std::string run = low.substr(i, j - i);
    if (cls == Cls::word) {
      append_word_token(std::move(run), out);
    } else if (keep_punct) {
      out.push_back(std::move(run));
    }
    i = j;
  }
  return out;
}

void normalize_corpus(std::istream& in, const NormalizeOptions& opts,
                      const std::function<void(Sentence&&)>& sink,
                      NormalizeStats* stats) {
  NormalizeStats local;
  NormalizeStats& st = stats ? *stats : local;
  std::string line;
  while (std::getline(in, line)) {
    ++st.lines_in;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!valid_utf8(line)) {
      ++st.invalid_utf8_lines;
      continue;
    }
    std::vector<std::string> tokens = tokenize_line(line, opts.keep_punct);
    if (tokens.size() < opts.min_sentence_len) {
      ++st.dropped_short;
      continue;
    }
    ++st.sentences_out;
    st.tokens_out += tokens.size();
    sink(std::move(tokens));
  }
}

std::vector<Sentence> normalize_corpus(std::istream& in,
                                       const NormalizeOptions& opts,
                                       NormalizeStats* stats) {
  std::vector<Sentence> sentences;
  normalize_corpus(
      in, opts, [&](Sentence&& s) { sentences.push_back(std::move(s)); }, stats);
  return sentences;
}

Vocabulary Vocabulary::from_sentences(const std::vector<Sentence>& sentences,
                                      std::int64_t min_count) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const Sentence& s : sentences) {
    for (const std::string& tok : s) ++counts[tok];
  }
  return from_counts(counts, min_count);
}

Vocabulary Vocabulary::from_counts(
    const std::unordered_map<std::string, std::int64_t>& counts,
    std::int64_t min_count) {
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  std::vector<std::pair<std::string, std::int64_t>> entries;
  entries.reserve(counts.size());
  for (const auto& [tok, cnt] : counts) {
    if (cnt >= min_count) entries.emplace_back(tok, cnt);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.tokens_.reserve(entries.size());
  v.counts_.reserve(entries.size());
  for (auto& [tok, cnt] : entries) {
    v.tokens_.push_back(std::move(tok));
    v.counts_.push_back(cnt);
  }
  v.rebuild_index();
  return v;
}

std::int32_t Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

std::int64_t Vocabulary::total_count() const {
  std::int64_t total = 0;
  for (std::int64_t c : counts_) total += c;
  return total;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<std::int32_t>(i));
  }
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << tokens_[i] << ' ' << counts_[i] << '\n';
  }
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  save(static_cast<std::ostream&>(out));
  if (!out.good()) throw DataError("error writing vocabulary file: " + path);
}

Vocabulary Vocabulary::load(std::istream& in) {
  Vocabulary v;
  std::string line;
  std::int64_t prev = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t sp = line.rfind(' ');
    if (sp == std::string::npos || sp == 0) {
      throw DataError("malformed vocabulary line: " + line);
    }
    std::string tok = line.substr(0, sp);
    std::int64_t cnt;
    try {
      cnt = std::stoll(line.substr(sp + 1));
    } catch (const std::exception&) {
      throw DataError("malformed vocabulary count: " + line);
    }
    if (prev >= 0 && cnt > prev) {
      throw DataError("vocabulary not sorted by count: " + tok);
    }
    prev = cnt;
    v.tokens_.push_back(std::move(tok));
    v.counts_.push_back(cnt);
  }
  v.rebuild_index();
  if (v.index_.size() != v.tokens_.size()) {
    throw DataError("vocabulary contains duplicate tokens");
  }
  return v;
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  return load(static_cast<std::istream&>(in));
}

}  // namespace birm
