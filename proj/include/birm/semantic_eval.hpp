#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "birm/vectors.hpp"

namespace birm {

struct SimilarityDataset {
  struct Row {
    std::string w1, w2;
    double score;
  };
  std::vector<Row> rows;

  // "word1<TAB>word2<TAB>score" per line, '#' comments allowed.
  static SimilarityDataset load(std::istream& in);
  static SimilarityDataset load(const std::string& path);
};

struct AnalogyDataset {
  struct Row {
    std::string a, b, c, d;
  };
  std::vector<Row> rows;

  // "a b c d" per line, '#' comments allowed.
  static AnalogyDataset load(std::istream& in);
  static AnalogyDataset load(const std::string& path);
};

struct SimilarityResult {
  double spearman = 0.0;
  std::int64_t covered = 0;
  std::int64_t skipped = 0;
};

struct AnalogyResult {
  double accuracy = 0.0;
  std::int64_t covered = 0;
  std::int64_t skipped = 0;
};

// Average-rank ties on both sides.
std::vector<double> average_ranks(const std::vector<double>& values);

SimilarityResult similarity_eval(const SimilarityDataset& ds,
                                 const VectorTable& vt);

// 3CosAdd over unit-normalized vectors; argmax excludes a, b, c; ties go to
// the lowest word id.
AnalogyResult analogy_eval(const AnalogyDataset& ds, const VectorTable& vt);

}  // namespace birm
