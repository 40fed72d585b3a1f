#include "birm/synthetic.hpp"

#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "birm/errors.hpp"
#include "birm/rng.hpp"

namespace birm {

namespace {

std::vector<std::string> numbered(const std::string& stem, int from, int to) {
  std::vector<std::string> v;
  for (int i = from; i < to; ++i) {
    std::string n = std::to_string(i);
    if (n.size() < 2) n = "0" + n;
    v.push_back(stem + n);
  }
  return v;
}

void check_ten(const std::vector<std::string>& v, const char* what) {
  if (v.size() != 10)
    throw DataError(std::string(what) + " must have exactly 10 tokens");
  for (const auto& t : v)
    if (t.rfind("synth", 0) != 0)
      throw DataError("synthetic token missing 'synth' prefix: " + t);
}

}  // namespace

SyntheticSpec SyntheticSpec::defaults(std::uint64_t seed) {
  SyntheticSpec s;
  s.fem_adjectives = numbered("synthadj", 0, 10);
  s.masc_adjectives = numbered("synthadj", 10, 20);
  s.fem_nouns = numbered("synthnoun", 0, 10);
  s.masc_nouns = numbered("synthnoun", 10, 20);
  s.shuffle_seed = seed;
  return s;
}

void SyntheticSpec::validate() const {
  check_ten(fem_adjectives, "feminine adjectives");
  check_ten(masc_adjectives, "masculine adjectives");
  check_ten(fem_nouns, "feminine nouns");
  check_ten(masc_nouns, "masculine nouns");
  std::unordered_set<std::string> all;
  for (const auto* list : {&fem_adjectives, &masc_adjectives, &fem_nouns, &masc_nouns})
    for (const auto& t : *list)
      if (!all.insert(t).second) throw DataError("duplicate synthetic token: " + t);
  if (matched_high <= 0 || matched_low <= 0 || neutral <= 0)
    throw DataError("synthetic counts must be positive");
  const std::int64_t total =
      200LL * (matched_high + matched_low) + 400LL * neutral;
  if (total != 32000)
    throw DataError("synthetic count table totals " + std::to_string(total) +
                    " sentences, expected 32000");
}

std::vector<Sentence> generate(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<Sentence> out;
  out.reserve(32000);
  auto emit = [&](const std::string& pronoun, const std::string& adj,
                  const std::string& noun, std::int32_t times) {
    for (std::int32_t i = 0; i < times; ++i)
      out.push_back({pronoun, "is", "an", adj, noun});
  };
  auto block = [&](const std::vector<std::string>& adjs,
                   const std::vector<std::string>& nouns, std::int32_t he,
                   std::int32_t she) {
    for (const auto& adj : adjs)
      for (const auto& noun : nouns) {
        emit("he", adj, noun, he);
        emit("she", adj, noun, she);
      }
  };
  block(spec.fem_adjectives, spec.fem_nouns, spec.matched_low, spec.matched_high);
  block(spec.masc_adjectives, spec.masc_nouns, spec.matched_high, spec.matched_low);
  block(spec.fem_adjectives, spec.masc_nouns, spec.neutral, spec.neutral);
  block(spec.masc_adjectives, spec.fem_nouns, spec.neutral, spec.neutral);

  std::mt19937_64 gen(spec.shuffle_seed);
  rng::shuffle(out, gen);
  return out;
}

std::vector<RatioRow> stereotype_ratio_check(const std::vector<Sentence>& sentences,
                                             const SyntheticSpec& spec) {
  spec.validate();
  std::unordered_map<std::string, std::pair<std::int64_t, std::int64_t>> counts;
  // .first = "he" co-occurrences, .second = "she"
  for (const auto& s : sentences) {
    if (s.size() != 5 || s[1] != "is" || s[2] != "an" ||
        (s[0] != "he" && s[0] != "she"))
      throw DataError("sentence not of the synthetic form");
    const bool he = s[0] == "he";
    for (const auto& w : {s[3], s[4]}) {
      auto& c = counts[w];
      (he ? c.first : c.second) += 1;
    }
  }

  std::vector<RatioRow> rows;
  auto add_rows = [&](const std::vector<std::string>& words, bool feminine) {
    for (const auto& w : words) {
      const auto& c = counts[w];
      RatioRow row;
      row.word = w;
      row.matched_pronoun = feminine ? "she" : "he";
      row.matched = feminine ? c.second : c.first;
      row.unmatched = feminine ? c.first : c.second;
      row.ratio = row.unmatched > 0
                      ? double(row.matched) / double(row.unmatched)
                      : std::numeric_limits<double>::infinity();
      row.ok = row.unmatched > 0 && row.matched == 3 * row.unmatched;
      rows.push_back(std::move(row));
    }
  };
  add_rows(spec.fem_adjectives, true);
  add_rows(spec.masc_adjectives, false);
  add_rows(spec.fem_nouns, true);
  add_rows(spec.masc_nouns, false);
  return rows;
}

WeatTestSpec synth_adjective_test(const SyntheticSpec& spec,
                                  const SeedSets& gender) {
  WeatTestSpec t;
  t.name = "synthetic_adjectives";
  t.x = spec.masc_adjectives;
  t.y = spec.fem_adjectives;
  t.a = gender.a;  // masculine pole
  t.b = gender.b;
  t.validate();
  return t;
}

WeatTestSpec synth_noun_test(const SyntheticSpec& spec, const SeedSets& gender) {
  WeatTestSpec t;
  t.name = "synthetic_nouns";
  t.x = spec.masc_nouns;
  t.y = spec.fem_nouns;
  t.a = gender.a;
  t.b = gender.b;
  t.validate();
  return t;
}

WeatTestSpec synth_indirect_test(const SyntheticSpec& spec) {
  WeatTestSpec t;
  t.name = "synthetic_indirect";
  t.x = spec.masc_adjectives;
  t.y = spec.fem_adjectives;
  t.a = spec.masc_nouns;
  t.b = spec.fem_nouns;
  t.validate();
  return t;
}

std::vector<std::string> mix_lines(std::vector<std::string> a,
                                   std::vector<std::string> b,
                                   std::uint64_t seed) {
  a.reserve(a.size() + b.size());
  for (auto& line : b) a.push_back(std::move(line));
  std::mt19937_64 gen(seed);
  rng::shuffle(a, gen);
  return a;
}

}  // namespace birm
