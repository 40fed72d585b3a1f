#include "birm/glove_trainer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "birm/errors.hpp"
#include "birm/kernels.hpp"
#include "birm/rng.hpp"

namespace birm {

namespace {

struct Cell {
  std::int32_t a;
  std::int32_t b;
  double logx;
  double fx;
};

double loss_weight(double x, double x_max, double alpha) {
  return x < x_max ? std::pow(x / x_max, alpha) : 1.0;
}

std::vector<Cell> collect_cells(const CooccurrenceMatrix& matrix,
                                const TrainerConfig& cfg) {
  std::vector<Cell> cells;
  cells.reserve(matrix.size());
  matrix.for_each_sorted([&](std::int32_t a, std::int32_t b, double x) {
    if (x <= kTrainCountFloor) return;
    cells.push_back({a, b, std::log(x), loss_weight(x, cfg.x_max, cfg.alpha)});
  });
  if (cells.empty()) throw DataError("no trainable cells in co-occurrence matrix");
  return cells;
}

char* write_double(char* p, double v) {
  auto [end, ec] = std::to_chars(p, p + 32, v);
  (void)ec;
  return end;
}

}  // namespace

void TrainerConfig::validate() const {
  if (dim < 1) throw UsageError("dim must be >= 1");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (x_max <= 0) throw UsageError("x_max must be > 0");
  if (alpha <= 0 || alpha > 1) throw UsageError("alpha must be in (0, 1]");
  if (learning_rate <= 0) throw UsageError("learning rate must be > 0");
  if (threads < 1) throw UsageError("threads must be >= 1");
}

bool EmbeddingSet::all_finite() const {
  for (double v : main_)
    if (!std::isfinite(v)) return false;
  for (double v : context_)
    if (!std::isfinite(v)) return false;
  for (double v : main_bias_)
    if (!std::isfinite(v)) return false;
  for (double v : context_bias_)
    if (!std::isfinite(v)) return false;
  return true;
}

EmbeddingSet init_embeddings(std::int32_t vocab_size, std::int32_t dim,
                             std::uint64_t seed) {
  EmbeddingSet emb(vocab_size, dim);
  std::mt19937_64 gen(rng::derive_seed(seed, 0));
  const double span = 1.0 / dim;
  auto u = [&] { return (rng::uniform01(gen) - 0.5) * span; };
  for (std::int32_t i = 0; i < vocab_size; ++i)
    for (std::int32_t k = 0; k < dim; ++k) emb.main(i)[k] = u();
  for (std::int32_t i = 0; i < vocab_size; ++i)
    for (std::int32_t k = 0; k < dim; ++k) emb.context(i)[k] = u();
  for (std::int32_t i = 0; i < vocab_size; ++i) emb.main_bias(i) = u();
  for (std::int32_t i = 0; i < vocab_size; ++i) emb.context_bias(i) = u();
  return emb;
}

void train_in_place(EmbeddingSet& emb, const CooccurrenceMatrix& matrix,
                    const TrainerConfig& cfg, std::vector<double>* epoch_loss) {
  cfg.validate();
  if (emb.size() != matrix.vocab_size() || emb.dim() != cfg.dim)
    throw UsageError("embedding shape does not match matrix/config");

  std::vector<Cell> cells = collect_cells(matrix, cfg);
  const std::int32_t dim = cfg.dim;
  const double lr = cfg.learning_rate;
  const std::int32_t n = emb.size();

  // AdaGrad accumulators, one per parameter, starting at 1.
  std::vector<double> g_main(std::size_t(n) * dim, 1.0);
  std::vector<double> g_context(std::size_t(n) * dim, 1.0);
  std::vector<double> g_mbias(n, 1.0);
  std::vector<double> g_cbias(n, 1.0);

  auto step = [&](const Cell& cell, double& loss_acc) {
    double* w = emb.main(cell.a);
    double* c = emb.context(cell.b);
    const double diff = kernels::dot(w, c, dim) + emb.main_bias(cell.a) +
                        emb.context_bias(cell.b) - cell.logx;
    if (!std::isfinite(diff))
      throw NumericalError("non-finite update at cell (" +
                           std::to_string(cell.a) + ", " +
                           std::to_string(cell.b) + ")");
    const double fdiff = cell.fx * diff;
    loss_acc += 0.5 * fdiff * diff;
    kernels::adagrad_pair_update(w, c, &g_main[std::size_t(cell.a) * dim],
                                 &g_context[std::size_t(cell.b) * dim], dim,
                                 fdiff, lr);
    double& gmb = g_mbias[cell.a];
    double& gcb = g_cbias[cell.b];
    gmb += fdiff * fdiff;
    gcb += fdiff * fdiff;
    emb.main_bias(cell.a) -= lr * fdiff / std::sqrt(gmb);
    emb.context_bias(cell.b) -= lr * fdiff / std::sqrt(gcb);
  };

  if (epoch_loss) epoch_loss->clear();
  for (std::int32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 gen(rng::derive_seed(cfg.seed, 1 + std::uint64_t(epoch)));
    rng::shuffle(cells, gen);

    double loss = 0.0;
    if (cfg.deterministic || cfg.threads == 1) {
      for (const Cell& cell : cells) step(cell, loss);
    } else {
      // Hogwild: workers share the parameters without locks; collisions are
      // rare on sparse matrices and tolerated.
      std::vector<double> partial(cfg.threads, 0.0);
      std::vector<std::exception_ptr> errors(cfg.threads);
      std::vector<std::thread> pool;
      pool.reserve(cfg.threads);
      for (std::int32_t t = 0; t < cfg.threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            const std::size_t begin = cells.size() * t / cfg.threads;
            const std::size_t end = cells.size() * (t + 1) / cfg.threads;
            for (std::size_t i = begin; i < end; ++i) step(cells[i], partial[t]);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (double p : partial) loss += p;
    }
    if (!std::isfinite(loss)) throw NumericalError("non-finite epoch loss");
    if (epoch_loss) epoch_loss->push_back(loss / double(cells.size()));
  }
}

EmbeddingSet train(const CooccurrenceMatrix& matrix, const TrainerConfig& cfg,
                   std::vector<double>* epoch_loss) {
  cfg.validate();
  EmbeddingSet emb = init_embeddings(matrix.vocab_size(), cfg.dim, cfg.seed);
  train_in_place(emb, matrix, cfg, epoch_loss);
  return emb;
}

double glove_loss(const CooccurrenceMatrix& matrix, const EmbeddingSet& emb,
                  const TrainerConfig& cfg) {
  double loss = 0.0;
  matrix.for_each_sorted([&](std::int32_t a, std::int32_t b, double x) {
    if (x <= kTrainCountFloor) return;
    const double diff = kernels::dot(emb.main(a), emb.context(b), cfg.dim) +
                        emb.main_bias(a) + emb.context_bias(b) - std::log(x);
    loss += 0.5 * loss_weight(x, cfg.x_max, cfg.alpha) * diff * diff;
  });
  return loss;
}

std::vector<double> glove_gradient(const CooccurrenceMatrix& matrix,
                                   const EmbeddingSet& emb,
                                   const TrainerConfig& cfg) {
  const std::int32_t n = emb.size();
  const std::int32_t dim = emb.dim();
  const std::size_t vec_block = std::size_t(n) * dim;
  std::vector<double> grad(2 * vec_block + 2 * std::size_t(n), 0.0);
  double* g_main = grad.data();
  double* g_context = grad.data() + vec_block;
  double* g_mbias = grad.data() + 2 * vec_block;
  double* g_cbias = g_mbias + n;

  matrix.for_each_sorted([&](std::int32_t a, std::int32_t b, double x) {
    if (x <= kTrainCountFloor) return;
    const double* w = emb.main(a);
    const double* c = emb.context(b);
    const double diff = kernels::dot(w, c, dim) + emb.main_bias(a) +
                        emb.context_bias(b) - std::log(x);
    const double fdiff = loss_weight(x, cfg.x_max, cfg.alpha) * diff;
    for (std::int32_t k = 0; k < dim; ++k) {
      g_main[std::size_t(a) * dim + k] += fdiff * c[k];
      g_context[std::size_t(b) * dim + k] += fdiff * w[k];
    }
    g_mbias[a] += fdiff;
    g_cbias[b] += fdiff;
  });
  return grad;
}

void export_vectors(const EmbeddingSet& emb, const Vocabulary& vocab,
                    TrainerConfig::ExportMode mode, std::ostream& out) {
  if (vocab.size() != emb.size())
    throw UsageError("embedding size does not match vocabulary");
  std::string line;
  for (std::int32_t i = 0; i < emb.size(); ++i) {
    line = vocab.token(i);
    const double* w = emb.main(i);
    const double* c = emb.context(i);
    char buf[34];
    for (std::int32_t k = 0; k < emb.dim(); ++k) {
      const double v =
          mode == TrainerConfig::ExportMode::sum ? w[k] + c[k] : w[k];
      buf[0] = ' ';
      char* end = write_double(buf + 1, v);
      line.append(buf, end - buf);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw DataError("failed writing vectors");
}

void export_vectors(const EmbeddingSet& emb, const Vocabulary& vocab,
                    TrainerConfig::ExportMode mode, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  export_vectors(emb, vocab, mode, out);
}

}  // namespace birm
