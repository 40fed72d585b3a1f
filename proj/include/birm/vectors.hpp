#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace birm {

class Vocabulary;
class EmbeddingSet;

// Dense token -> vector table, the exported form embeddings are evaluated in.
class VectorTable {
 public:
  VectorTable() = default;
  VectorTable(std::vector<std::string> tokens, std::vector<double> data,
              std::int32_t dim);

  static VectorTable load(std::istream& in);
  static VectorTable load(const std::string& path);
  void save(std::ostream& out) const;
  void save(const std::string& path) const;

  // Builds the evaluation view of a trained EmbeddingSet (sum or main_only
  // per mode flag).
  static VectorTable from_embeddings(const EmbeddingSet& emb,
                                     const Vocabulary& vocab, bool sum_mode);

  std::int32_t id(const std::string& token) const;  // -1 if absent
  const std::string& token(std::int32_t id) const { return tokens_[id]; }
  const double* vec(std::int32_t id) const {
    return &data_[std::size_t(id) * dim_];
  }
  std::int32_t dim() const { return dim_; }
  std::int32_t size() const { return static_cast<std::int32_t>(tokens_.size()); }

 private:
  std::vector<std::string> tokens_;
  std::vector<double> data_;
  std::int32_t dim_ = 0;
  std::unordered_map<std::string, std::int32_t> index_;

  void rebuild_index();
};

double cosine(const double* a, const double* b, std::int32_t dim);

}  // namespace birm
