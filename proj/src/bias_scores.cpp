#include "birm/bias_scores.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "birm/cooccurrence.hpp"
#include "birm/errors.hpp"

namespace birm {

namespace {

std::string trimmed(const std::string& line) {
  const char* ws = " \t\r\n";
  const std::size_t b = line.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const std::size_t e = line.find_last_not_of(ws);
  return line.substr(b, e - b + 1);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

}  // namespace

SeedSets SeedSets::load(std::istream& in) {
  SeedSets s;
  std::vector<std::string>* section = nullptr;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    if (t == "[A]" || t == "[a]") {
      section = &s.a;
    } else if (t == "[B]" || t == "[b]") {
      section = &s.b;
    } else if (t[0] == '[') {
      throw DataError("unknown seed section " + t);
    } else {
      if (!section) throw DataError("seed token before [A]/[B] header: " + t);
      section->push_back(t);
    }
  }
  s.validate();
  return s;
}

SeedSets SeedSets::load(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return load(in);
}

void SeedSets::validate() const {
  if (a.empty() || b.empty()) throw DataError("seed sets must both be non-empty");
  if (seed_magnitude <= 0) throw DataError("seed magnitude must be positive");
  std::unordered_set<std::string> seen;
  for (const auto& w : a)
    if (!seen.insert(w).second) throw DataError("duplicate seed token: " + w);
  for (const auto& w : b)
    if (!seen.insert(w).second)
      throw DataError("seed token in both sets or duplicated: " + w);
}

std::vector<std::string> SeedSets::missing_from(const Vocabulary& vocab) const {
  std::vector<std::string> missing;
  for (const auto& w : a)
    if (vocab.id(w) < 0) missing.push_back(w);
  for (const auto& w : b)
    if (vocab.id(w) < 0) missing.push_back(w);
  return missing;
}

void ScoreTable::save(std::ostream& out, const Vocabulary& vocab) const {
  if (vocab.size() != size()) throw UsageError("score table size != vocabulary");
  for (std::int32_t i = 0; i < size(); ++i)
    out << vocab.token(i) << '\t' << scores_[i] << '\n';
  if (!out) throw DataError("failed writing score table");
}

void ScoreTable::save(const std::string& path, const Vocabulary& vocab) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  save(out, vocab);
}

ScoreTable ScoreTable::load(std::istream& in, const Vocabulary& vocab) {
  std::unordered_map<std::string, std::int32_t> by_token;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trimmed(line);
    if (t.empty()) continue;
    std::istringstream ls(t);
    std::string token;
    long long score = 0;
    if (!(ls >> token >> score))
      throw DataError("bad score line " + std::to_string(lineno) + ": " + t);
    if (!by_token.emplace(token, std::int32_t(score)).second)
      throw DataError("duplicate score entry: " + token);
  }
  std::vector<std::int32_t> scores(vocab.size(), 0);
  for (std::int32_t i = 0; i < vocab.size(); ++i) {
    auto it = by_token.find(vocab.token(i));
    if (it == by_token.end())
      throw DataError("score table missing vocabulary token: " + vocab.token(i));
    scores[i] = it->second;
  }
  if (by_token.size() != std::size_t(vocab.size()))
    throw DataError("score table contains tokens outside the vocabulary");
  return ScoreTable(std::move(scores), 1.3);
}

ScoreTable ScoreTable::load(const std::string& path, const Vocabulary& vocab) {
  std::ifstream in = open_or_throw(path);
  return load(in, vocab);
}

double log_relative_odds(double mass_with_b, double mass_with_a,
                         double pole_b_total, double pole_a_total, double c,
                         double smoothing) {
  const double word_odds = (mass_with_b + smoothing) / (mass_with_a + smoothing);
  const double corpus_odds = pole_b_total / pole_a_total;
  return c * std::log(word_odds / corpus_odds);
}

ScoreTable compute_word_scores(const CooccurrenceMatrix& raw_counts,
                               const Vocabulary& vocab, const SeedSets& seeds,
                               double c, double smoothing, bool seeds_only,
                               ScoreDiagnostics* diag) {
  seeds.validate();
  if (smoothing <= 0) throw UsageError("smoothing must be > 0");
  if (raw_counts.vocab_size() != vocab.size())
    throw UsageError("co-occurrence matrix does not match vocabulary");

  std::vector<std::int32_t> a_ids, b_ids;
  for (const auto& w : seeds.a) {
    const std::int32_t id = vocab.id(w);
    if (id >= 0) a_ids.push_back(id);
  }
  for (const auto& w : seeds.b) {
    const std::int32_t id = vocab.id(w);
    if (id >= 0) b_ids.push_back(id);
  }
  if (diag) diag->missing_seeds = seeds.missing_from(vocab);
  if (a_ids.empty() || b_ids.empty())
    throw DataError("a seed pole is entirely absent from the vocabulary");

  const std::vector<double> marginals = raw_counts.context_marginals();
  double pole_a = 0.0, pole_b = 0.0;
  for (std::int32_t id : a_ids) pole_a += marginals[id];
  for (std::int32_t id : b_ids) pole_b += marginals[id];
  if (pole_a <= 0.0 || pole_b <= 0.0)
    throw DataError("a seed pole has zero co-occurrence mass in the corpus");

  std::vector<std::int32_t> scores(vocab.size(), 0);
  for (std::int32_t id : a_ids) scores[id] = -seeds.seed_magnitude;
  for (std::int32_t id : b_ids) scores[id] = seeds.seed_magnitude;

  if (!seeds_only) {
    std::vector<bool> is_seed(vocab.size(), false);
    for (std::int32_t id : a_ids) is_seed[id] = true;
    for (std::int32_t id : b_ids) is_seed[id] = true;
    for (std::int32_t w = 0; w < vocab.size(); ++w) {
      if (is_seed[w]) continue;
      double with_a = 0.0, with_b = 0.0;
      for (std::int32_t id : a_ids) with_a += raw_counts.weight(w, id);
      for (std::int32_t id : b_ids) with_b += raw_counts.weight(w, id);
      if (with_a == 0.0 && with_b == 0.0) {
        if (diag) ++diag->zero_mass_words;
        continue;  // score stays 0
      }
      const double v = log_relative_odds(with_b, with_a, pole_b, pole_a, c, smoothing);
      if (!std::isfinite(v)) throw NumericalError("non-finite bias score");
      scores[w] = std::int32_t(std::llround(v));  // rounds halves away from zero
    }
  }
  return ScoreTable(std::move(scores), c);
}

}  // namespace birm
