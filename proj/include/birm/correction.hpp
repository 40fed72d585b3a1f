#pragma once

#include <cstdint>
#include <vector>

#include "birm/cooccurrence.hpp"

namespace birm {

// Which contexts get corrected. One mask entry per vocabulary id; contexts
// outside the mask are passed through (their pairs collapse unchanged).
struct NeutralizationPolicy {
  std::vector<std::uint8_t> neutralize;  // 1 = correct this context
  bool symmetrize_marginals = false;

  static NeutralizationPolicy neutralize_all_except(
      std::int32_t vocab_size, const std::vector<std::int32_t>& protected_ids,
      bool symmetrize = false);
  static NeutralizationPolicy neutralize_only(
      std::int32_t vocab_size, const std::vector<std::int32_t>& ids,
      bool symmetrize = false);
};

// Replaces each neutralized context's counts by their bucket-averaged value:
//   X'(a,b) = M(b) * sum_{x in S_b} (X(a,b,x)/M(b,x)) * w(x) / sum_{x in S_b} w(x)
// with S_b the observed buckets and w(x) = M(x)/M, or the symmetrized weights
// w(+x) = w(-x) = (M(+x)+M(-x))/(2M) when symmetrize_marginals is set.
// Non-neutralized contexts collapse unchanged. Corrected cells at or below
// 1e-10 are dropped.
CooccurrenceMatrix correct(const ScoredCooccurrence& sc,
                           const NeutralizationPolicy& policy);

struct CorrectionStats {
  std::int64_t cells_before = 0;
  std::int64_t cells_after = 0;
  std::int64_t modified_cells = 0;
  double max_rel_change = 0.0;
  std::int32_t max_rel_word = -1;
  std::int32_t max_rel_context = -1;
  std::vector<double> context_mass_ratio;  // after/before; 1 where before = 0
};

CorrectionStats report_correction_stats(const CooccurrenceMatrix& before,
                                        const CooccurrenceMatrix& after);

}  // namespace birm
