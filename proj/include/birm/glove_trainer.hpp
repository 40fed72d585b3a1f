#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "birm/cooccurrence.hpp"
#include "birm/text_pipeline.hpp"

namespace birm {

struct TrainerConfig {
  std::int32_t dim = 300;
  std::int32_t epochs = 15;
  double x_max = 100.0;
  double alpha = 0.75;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  bool deterministic = true;  // sequential updates in a seeded shuffle order
  std::int32_t threads = 1;   // hogwild workers when not deterministic

  enum class ExportMode { sum, main_only };
  ExportMode export_mode = ExportMode::sum;

  void validate() const;  // throws UsageError
};

// Cells at or below this weight are excluded from training (log would blow up
// on the tiny fractional counts a correction can leave behind).
inline constexpr double kTrainCountFloor = 1e-10;

class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(std::int32_t vocab_size, std::int32_t dim)
      : size_(vocab_size),
        dim_(dim),
        main_(std::size_t(vocab_size) * dim, 0.0),
        context_(std::size_t(vocab_size) * dim, 0.0),
        main_bias_(vocab_size, 0.0),
        context_bias_(vocab_size, 0.0) {}

  std::int32_t size() const { return size_; }
  std::int32_t dim() const { return dim_; }

  double* main(std::int32_t id) { return &main_[std::size_t(id) * dim_]; }
  const double* main(std::int32_t id) const { return &main_[std::size_t(id) * dim_]; }
  double* context(std::int32_t id) { return &context_[std::size_t(id) * dim_]; }
  const double* context(std::int32_t id) const {
    return &context_[std::size_t(id) * dim_];
  }
  double& main_bias(std::int32_t id) { return main_bias_[id]; }
  double main_bias(std::int32_t id) const { return main_bias_[id]; }
  double& context_bias(std::int32_t id) { return context_bias_[id]; }
  double context_bias(std::int32_t id) const { return context_bias_[id]; }

  bool all_finite() const;

 private:
  std::int32_t size_ = 0;
  std::int32_t dim_ = 0;
  std::vector<double> main_;
  std::vector<double> context_;
  std::vector<double> main_bias_;
  std::vector<double> context_bias_;
};

// Uniform init in [-0.5/dim, +0.5/dim] for vectors and biases, fully
// determined by the seed.
EmbeddingSet init_embeddings(std::int32_t vocab_size, std::int32_t dim,
                             std::uint64_t seed);

// AdaGrad on J = sum f(X) * (w.c + b + b_hat - ln X)^2 / 2 with
// f(x) = min(1, (x/x_max)^alpha). Accumulators start at 1.
void train_in_place(EmbeddingSet& emb, const CooccurrenceMatrix& matrix,
                    const TrainerConfig& cfg,
                    std::vector<double>* epoch_loss = nullptr);

EmbeddingSet train(const CooccurrenceMatrix& matrix, const TrainerConfig& cfg,
                   std::vector<double>* epoch_loss = nullptr);

// Objective value over trainable cells, and its gradient laid out as
// [main vectors | context vectors | main biases | context biases].
double glove_loss(const CooccurrenceMatrix& matrix, const EmbeddingSet& emb,
                  const TrainerConfig& cfg);
std::vector<double> glove_gradient(const CooccurrenceMatrix& matrix,
                                   const EmbeddingSet& emb,
                                   const TrainerConfig& cfg);

// One "token v1 ... vdim" line per word, shortest round-trip decimals.
void export_vectors(const EmbeddingSet& emb, const Vocabulary& vocab,
                    TrainerConfig::ExportMode mode, std::ostream& out);
void export_vectors(const EmbeddingSet& emb, const Vocabulary& vocab,
                    TrainerConfig::ExportMode mode, const std::string& path);

}  // namespace birm
