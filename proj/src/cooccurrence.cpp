#include "birm/cooccurrence.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "birm/errors.hpp"

namespace birm {

namespace {

std::uint64_t pack(std::int32_t a, std::int32_t b) {
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

}  // namespace

void CooccurrenceMatrix::add(std::int32_t word, std::int32_t context, double w) {
  if (word < 0 || context < 0 || word >= vocab_size_ || context >= vocab_size_)
    throw UsageError("cooccurrence index out of range");
  entries_[pack(word, context)] += w;
  total_ += w;
}

double CooccurrenceMatrix::weight(std::int32_t word, std::int32_t context) const {
  auto it = entries_.find(pack(word, context));
  return it == entries_.end() ? 0.0 : it->second;
}

std::vector<double> CooccurrenceMatrix::context_marginals() const {
  std::vector<double> m(vocab_size_, 0.0);
  for (const auto& [key, w] : entries_)
    m[static_cast<std::uint32_t>(key & 0xFFFFFFFFull)] += w;
  return m;
}

std::vector<std::uint64_t> CooccurrenceMatrix::sorted_keys() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(entries_.size());
  for (const auto& [key, w] : entries_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

ScoredCooccurrence::ScoredCooccurrence(std::int32_t vocab_size,
                                       std::int32_t bucket_radius)
    : vocab_size_(vocab_size), radius_(bucket_radius) {
  if (bucket_radius < 1) throw UsageError("bucket radius must be >= 1");
}

void ScoredCooccurrence::add(std::int32_t word, std::int32_t context,
                             std::int32_t bucket, double w) {
  if (word < 0 || context < 0 || word >= vocab_size_ || context >= vocab_size_)
    throw UsageError("cooccurrence index out of range");
  if (bucket < -radius_ || bucket > radius_)
    throw UsageError("bucket out of range");
  const std::uint64_t key = pack(word, context);
  auto [it, inserted] = index_.try_emplace(key, std::uint32_t(index_.size()));
  if (inserted) weights_.resize(weights_.size() + bucket_count(), 0.0);
  weights_[std::size_t(it->second) * bucket_count() + (bucket + radius_)] += w;
}

double ScoredCooccurrence::weight(std::int32_t word, std::int32_t context,
                                  std::int32_t bucket) const {
  auto it = index_.find(pack(word, context));
  if (it == index_.end()) return 0.0;
  return weights_[std::size_t(it->second) * bucket_count() + (bucket + radius_)];
}

void ScoredCooccurrence::merge(const ScoredCooccurrence& other) {
  if (other.vocab_size_ != vocab_size_ || other.radius_ != radius_)
    throw UsageError("cannot merge cooccurrence tables of different shape");
  const std::size_t nb = bucket_count();
  // Sorted iteration keeps slot assignment order independent of the other
  // table's hash layout, so merged results are deterministic.
  other.for_each_pair_sorted(
      [&](std::int32_t a, std::int32_t b, std::span<const double> row) {
        const std::uint64_t key = pack(a, b);
        auto [it, inserted] = index_.try_emplace(key, std::uint32_t(index_.size()));
        if (inserted) weights_.resize(weights_.size() + nb, 0.0);
        double* dst = &weights_[std::size_t(it->second) * nb];
        for (std::size_t i = 0; i < nb; ++i) dst[i] += row[i];
      });
}

std::vector<std::uint64_t> ScoredCooccurrence::sorted_keys() const {
  std::vector<std::uint64_t> keys;
  keys.reserve(index_.size());
  for (const auto& [key, slot] : index_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

Marginals compute_marginals(const ScoredCooccurrence& sc) {
  Marginals m;
  m.vocab_size = sc.vocab_size();
  m.radius = sc.bucket_radius();
  const std::size_t nb = sc.bucket_count();
  m.context_bucket.assign(std::size_t(m.vocab_size) * nb, 0.0);
  m.context.assign(m.vocab_size, 0.0);
  m.bucket.assign(nb, 0.0);
  sc.for_each_pair([&](std::int32_t a, std::int32_t b, std::span<const double> row) {
    (void)a;
    for (std::size_t i = 0; i < nb; ++i) {
      const double w = row[i];
      if (w == 0.0) continue;
      m.context_bucket[std::size_t(b) * nb + i] += w;
      m.context[b] += w;
      m.bucket[i] += w;
      m.total += w;
    }
  });
  return m;
}

std::int32_t pair_bucket(std::span<const std::int32_t> window_scores,
                         std::int32_t radius) {
  std::int64_t sum = 0;
  for (std::int32_t s : window_scores) sum += s;
  return std::int32_t(std::clamp<std::int64_t>(sum, -radius, radius));
}

namespace {

// Counts one sentence into out. ids holds in-vocabulary token ids; positions
// and distances are over this filtered sequence.
void count_sentence(const std::vector<std::int32_t>& ids,
                    const ScoreTable& scores, const CountOptions& opts,
                    ScoredCooccurrence& out) {
  const std::int32_t n = std::int32_t(ids.size());
  if (n < 2) return;
  const std::int32_t win = opts.window;
  const std::int32_t swin = opts.score_window > 0 ? opts.score_window : win;

  // prefix[i] = sum of scores of ids[0..i-1]
  std::vector<std::int64_t> prefix(std::size_t(n) + 1, 0);
  for (std::int32_t i = 0; i < n; ++i)
    prefix[i + 1] = prefix[i] + scores.score(ids[i]);

  for (std::int32_t j = 0; j < n; ++j) {  // j = context occurrence
    const std::int32_t lo = std::max(0, j - swin);
    const std::int32_t hi = std::min(n - 1, j + swin);
    // Window score sum around the context, excluding the context itself.
    const std::int64_t base =
        (prefix[hi + 1] - prefix[lo]) - scores.score(ids[j]);
    for (std::int32_t i = std::max(0, j - win); i <= std::min(n - 1, j + win);
         ++i) {
      if (i == j) continue;
      std::int64_t sum = base;
      if (opts.exclude_focal && i >= lo && i <= hi) sum -= scores.score(ids[i]);
      const std::int32_t bucket = std::int32_t(
          std::clamp<std::int64_t>(sum, -opts.bucket_radius, opts.bucket_radius));
      const double w = opts.weighting == CountOptions::Weighting::harmonic
                           ? 1.0 / std::abs(i - j)
                           : 1.0;
      out.add(ids[i], ids[j], bucket, w);
    }
  }
}

}  // namespace

ScoredCooccurrence count_scored_pairs(const std::vector<Sentence>& sentences,
                                      const Vocabulary& vocab,
                                      const ScoreTable& scores,
                                      const CountOptions& opts) {
  if (opts.window < 1) throw UsageError("window must be >= 1");
  if (vocab.size() != scores.size())
    throw UsageError("score table does not match vocabulary");

  const int threads = std::max(1, opts.threads);
  std::vector<ScoredCooccurrence> shards;
  shards.reserve(threads);
  for (int t = 0; t < threads; ++t)
    shards.emplace_back(std::int32_t(vocab.size()), opts.bucket_radius);

  auto worker = [&](int t) {
    // Contiguous sentence ranges; shard t gets [t*len/T, (t+1)*len/T).
    const std::size_t begin = sentences.size() * t / threads;
    const std::size_t end = sentences.size() * (t + 1) / threads;
    std::vector<std::int32_t> ids;
    for (std::size_t s = begin; s < end; ++s) {
      ids.clear();
      for (const std::string& tok : sentences[s]) {
        const std::int32_t id = vocab.id(tok);
        if (id >= 0) ids.push_back(id);
      }
      count_sentence(ids, scores, opts, shards[t]);
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  ScoredCooccurrence total = std::move(shards[0]);
  for (int t = 1; t < threads; ++t) total.merge(shards[t]);
  return total;
}

CooccurrenceMatrix collapse(const ScoredCooccurrence& sc) {
  CooccurrenceMatrix m(sc.vocab_size());
  sc.for_each_pair_sorted(
      [&](std::int32_t a, std::int32_t b, std::span<const double> row) {
        double sum = 0.0;
        for (double w : row) sum += w;
        if (sum != 0.0) m.add(a, b, sum);
      });
  return m;
}

}  // namespace birm
