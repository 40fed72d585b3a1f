#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "birm/bias_scores.hpp"
#include "birm/text_pipeline.hpp"

namespace birm {

// Sparse (word, context) -> weight map. Weights are harmonic or flat window
// counts, or corrected pseudo-counts; always non-negative.
class CooccurrenceMatrix {
 public:
  CooccurrenceMatrix() = default;
  explicit CooccurrenceMatrix(std::int32_t vocab_size) : vocab_size_(vocab_size) {}

  std::int32_t vocab_size() const { return vocab_size_; }
  std::size_t size() const { return entries_.size(); }
  double total_mass() const { return total_; }

  void add(std::int32_t word, std::int32_t context, double w);
  double weight(std::int32_t word, std::int32_t context) const;

  // M(b) = sum_a X(a, b) for every context b.
  std::vector<double> context_marginals() const;

  template <typename F>
  void for_each(F&& f) const {  // unspecified order
    for (const auto& [key, w] : entries_) {
      f(static_cast<std::int32_t>(key >> 32),
        static_cast<std::int32_t>(key & 0xFFFFFFFFull), w);
    }
  }
  template <typename F>
  void for_each_sorted(F&& f) const {  // (word, context) ascending
    std::vector<std::uint64_t> keys = sorted_keys();
    for (std::uint64_t key : keys) {
      f(static_cast<std::int32_t>(key >> 32),
        static_cast<std::int32_t>(key & 0xFFFFFFFFull), entries_.at(key));
    }
  }

 private:
  std::int32_t vocab_size_ = 0;
  double total_ = 0.0;
  std::unordered_map<std::uint64_t, double> entries_;

  std::vector<std::uint64_t> sorted_keys() const;
};

// Sparse (word, context, bucket) -> weight map with bucket set
// S = {-radius .. +radius}.
class ScoredCooccurrence {
 public:
  ScoredCooccurrence() = default;
  ScoredCooccurrence(std::int32_t vocab_size, std::int32_t bucket_radius);

  std::int32_t vocab_size() const { return vocab_size_; }
  std::int32_t bucket_radius() const { return radius_; }
  std::int32_t bucket_count() const { return 2 * radius_ + 1; }
  std::size_t pair_count() const { return index_.size(); }

  void add(std::int32_t word, std::int32_t context, std::int32_t bucket, double w);
  double weight(std::int32_t word, std::int32_t context, std::int32_t bucket) const;

  // Adds every entry of other into this. Shapes must match.
  void merge(const ScoredCooccurrence& other);

  // f(word, context, span of bucket weights indexed by bucket + radius)
  template <typename F>
  void for_each_pair(F&& f) const {
    const std::size_t nb = bucket_count();
    for (const auto& [key, slot] : index_) {
      f(static_cast<std::int32_t>(key >> 32),
        static_cast<std::int32_t>(key & 0xFFFFFFFFull),
        std::span<const double>(&weights_[std::size_t(slot) * nb], nb));
    }
  }
  template <typename F>
  void for_each_pair_sorted(F&& f) const {
    const std::size_t nb = bucket_count();
    std::vector<std::uint64_t> keys = sorted_keys();
    for (std::uint64_t key : keys) {
      const std::uint32_t slot = index_.at(key);
      f(static_cast<std::int32_t>(key >> 32),
        static_cast<std::int32_t>(key & 0xFFFFFFFFull),
        std::span<const double>(&weights_[std::size_t(slot) * nb], nb));
    }
  }

 private:
  std::int32_t vocab_size_ = 0;
  std::int32_t radius_ = 1;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::vector<double> weights_;  // slot * bucket_count + (bucket + radius)

  std::vector<std::uint64_t> sorted_keys() const;
};

// Cached marginals of a ScoredCooccurrence: M(b,x), M(b), M(x), M.
struct Marginals {
  std::int32_t vocab_size = 0;
  std::int32_t radius = 0;
  std::vector<double> context_bucket;  // b * bucket_count + (x + radius)
  std::vector<double> context;         // b
  std::vector<double> bucket;          // x + radius
  double total = 0.0;

  double m_context_bucket(std::int32_t b, std::int32_t x) const {
    return context_bucket[std::size_t(b) * (2 * radius + 1) + (x + radius)];
  }
  double m_context(std::int32_t b) const { return context[b]; }
  double m_bucket(std::int32_t x) const { return bucket[x + radius]; }
};

Marginals compute_marginals(const ScoredCooccurrence& sc);

struct CountOptions {
  std::int32_t window = 15;
  std::int32_t score_window = 0;  // 0 -> same as window
  enum class Weighting { harmonic, flat };
  Weighting weighting = Weighting::harmonic;
  std::int32_t bucket_radius = 1;
  bool exclude_focal = false;  // drop the focal word's score from the bucket sum
  std::int32_t threads = 1;
};

// Bucket of one context occurrence: the window score sum clamped to
// [-radius, +radius]. With radius 1 this is the sign of the sum.
std::int32_t pair_bucket(std::span<const std::int32_t> window_scores,
                         std::int32_t radius = 1);

// Counts word-context pairs within the window, bidirectionally, inside one
// sentence. Positions are taken over in-vocabulary tokens only. Each context
// occurrence gets one bucket from the scores of its surrounding in-window
// tokens (context's own score excluded; focal included unless exclude_focal).
ScoredCooccurrence count_scored_pairs(const std::vector<Sentence>& sentences,
                                      const Vocabulary& vocab,
                                      const ScoreTable& scores,
                                      const CountOptions& opts);

CooccurrenceMatrix collapse(const ScoredCooccurrence& sc);

}  // namespace birm
