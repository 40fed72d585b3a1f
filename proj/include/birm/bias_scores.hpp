#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "birm/text_pipeline.hpp"

namespace birm {

class CooccurrenceMatrix;

// Two poles of the bias attribute. Words in `a` are fixed at -seed_magnitude,
// words in `b` at +seed_magnitude.
struct SeedSets {
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::int32_t seed_magnitude = 100;

  // File format: sections headed [A] and [B], one token per line,
  // '#' comments allowed.
  static SeedSets load(std::istream& in);
  static SeedSets load(const std::string& path);

  void validate() const;  // throws DataError on empty or overlapping sets
  std::vector<std::string> missing_from(const Vocabulary& vocab) const;
};

// Per-word integer bias score, aligned to vocabulary ids.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::vector<std::int32_t> scores, double c)
      : scores_(std::move(scores)), c_(c) {}
  static ScoreTable zeros(std::int32_t vocab_size, double c = 1.3) {
    return ScoreTable(std::vector<std::int32_t>(vocab_size, 0), c);
  }

  std::int32_t score(std::int32_t id) const { return scores_[id]; }
  std::int32_t size() const { return static_cast<std::int32_t>(scores_.size()); }
  double c() const { return c_; }

  // One "token<TAB>score" per line, in id order.
  void save(std::ostream& out, const Vocabulary& vocab) const;
  void save(const std::string& path, const Vocabulary& vocab) const;
  static ScoreTable load(std::istream& in, const Vocabulary& vocab);
  static ScoreTable load(const std::string& path, const Vocabulary& vocab);

 private:
  std::vector<std::int32_t> scores_;
  double c_ = 1.3;
};

struct ScoreDiagnostics {
  std::int64_t zero_mass_words = 0;  // no co-occurrence with either pole
  std::vector<std::string> missing_seeds;
};

// Log relative odds of w appearing near pole B vs pole A, against the
// corpus-wide odds, scaled by c and rounded half away from zero. Seed words
// get the fixed +/-seed_magnitude. Words with no mass on either pole score 0.
// Set seeds_only to force every non-seed score to 0.
ScoreTable compute_word_scores(const CooccurrenceMatrix& raw_counts,
                               const Vocabulary& vocab, const SeedSets& seeds,
                               double c = 1.3, double smoothing = 0.5,
                               bool seeds_only = false,
                               ScoreDiagnostics* diag = nullptr);

// Pre-rounding score of one word given its pole masses and the corpus odds.
double log_relative_odds(double mass_with_b, double mass_with_a,
                         double pole_b_total, double pole_a_total, double c,
                         double smoothing);

}  // namespace birm
