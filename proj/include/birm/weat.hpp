#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "birm/vectors.hpp"

namespace birm {

struct WeatTestSpec {
  std::string name;
  std::vector<std::string> x, y, a, b;

  // File format: sections [X] [Y] [A] [B], one token per line.
  static WeatTestSpec load(std::istream& in, const std::string& name);
  static WeatTestSpec load(const std::string& path);

  void validate() const;  // sizes and within-pair disjointness
};

struct WeatResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  double effect_size = 0.0;
  bool effect_degenerate = false;  // zero spread of associations
  enum class Mode { exact, montecarlo };
  Mode mode = Mode::exact;
  // Exact: p = p_num / p_den over all C(2n, n) partitions.
  // Monte-Carlo: p = p_num / p_den with the observed draw included.
  std::uint64_t p_num = 0;
  std::uint64_t p_den = 0;
};

// Mean cosine to A minus mean cosine to B.
double association(const VectorTable& vt, std::int32_t w,
                   const std::vector<std::int32_t>& a_ids,
                   const std::vector<std::int32_t>& b_ids);

WeatResult weat(const WeatTestSpec& spec, const VectorTable& vt,
                std::uint64_t max_exact = 1000000,
                std::uint64_t mc_samples = 100000, std::uint64_t seed = 1);

// Projection of w onto the normalized f - m direction; positive means
// f-leaning.
double ripa(const double* w, const double* f, const double* m, std::int32_t dim);

struct RipaRow {
  std::string word;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::vector<double> scores;  // all |F| x |M| pairs, f-major order
};

struct RipaReport {
  std::vector<RipaRow> rows;
  std::vector<std::string> skipped;  // out-of-vocabulary words
};

RipaReport ripa_report(const std::vector<std::string>& words,
                       const std::vector<std::string>& fem,
                       const std::vector<std::string>& masc,
                       const VectorTable& vt);

std::uint64_t binomial(std::uint32_t n, std::uint32_t k);

}  // namespace birm
