#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "birm/bias_scores.hpp"
#include "birm/text_pipeline.hpp"
#include "birm/weat.hpp"

namespace birm {

// Controlled stereotype corpus: every sentence is
// "[pronoun] is an [adjective] [noun]" over 20 synthetic adjectives and 20
// synthetic nouns, half feminine- and half masculine-stereotyped each.
// Stereotype-matched adjective-noun pairs take the matched pronoun
// matched_high times and the other matched_low times; cross pairs take each
// pronoun neutral times. Defaults total exactly 32,000 sentences.
struct SyntheticSpec {
  std::vector<std::string> fem_adjectives;   // 10, prefix "synth"
  std::vector<std::string> masc_adjectives;  // 10
  std::vector<std::string> fem_nouns;        // 10
  std::vector<std::string> masc_nouns;       // 10
  std::int32_t matched_high = 90;
  std::int32_t matched_low = 10;
  std::int32_t neutral = 30;
  std::uint64_t shuffle_seed = 1;

  static SyntheticSpec defaults(std::uint64_t seed = 1);
  void validate() const;  // shape, prefixes, 32,000 total
};

// The full corpus in a seed-determined order; the sentence multiset is
// independent of the seed.
std::vector<Sentence> generate(const SyntheticSpec& spec);

struct RatioRow {
  std::string word;
  std::string matched_pronoun;
  std::int64_t matched = 0;
  std::int64_t unmatched = 0;
  double ratio = 0.0;
  bool ok = false;  // matched == 3 * unmatched exactly
};

// Per-synthetic-word matched/unmatched pronoun counts over a generated
// corpus; every row must show ratio 3 on an uncorrupted stream.
std::vector<RatioRow> stereotype_ratio_check(const std::vector<Sentence>& sentences,
                                             const SyntheticSpec& spec);

// The three end-to-end WEAT tests over the synthetic vocabulary. X is the
// masculine-stereotyped half so positive effects mean stereotype-consistent
// association. Gender attributes come from the seed sets; the indirect test
// uses the synthetic nouns themselves as attributes.
WeatTestSpec synth_adjective_test(const SyntheticSpec& spec, const SeedSets& gender);
WeatTestSpec synth_noun_test(const SyntheticSpec& spec, const SeedSets& gender);
WeatTestSpec synth_indirect_test(const SyntheticSpec& spec);

// Line-level corpus mixing for synth-mix: concatenate and seed-shuffle.
std::vector<std::string> mix_lines(std::vector<std::string> a,
                                   std::vector<std::string> b,
                                   std::uint64_t seed);

}  // namespace birm
