#include "birm/correction.hpp"

#include <algorithm>
#include <cmath>

#include "birm/errors.hpp"

namespace birm {

namespace {
// Corrected counts at or below this are dropped (the trainer ignores them).
constexpr double kCountFloor = 1e-10;
}  // namespace

NeutralizationPolicy NeutralizationPolicy::neutralize_all_except(
    std::int32_t vocab_size, const std::vector<std::int32_t>& protected_ids,
    bool symmetrize) {
  NeutralizationPolicy p;
  p.neutralize.assign(vocab_size, 1);
  for (std::int32_t id : protected_ids) {
    if (id < 0 || id >= vocab_size) throw UsageError("protected id out of range");
    p.neutralize[id] = 0;
  }
  p.symmetrize_marginals = symmetrize;
  return p;
}

NeutralizationPolicy NeutralizationPolicy::neutralize_only(
    std::int32_t vocab_size, const std::vector<std::int32_t>& ids,
    bool symmetrize) {
  NeutralizationPolicy p;
  p.neutralize.assign(vocab_size, 0);
  for (std::int32_t id : ids) {
    if (id < 0 || id >= vocab_size) throw UsageError("neutralize id out of range");
    p.neutralize[id] = 1;
  }
  p.symmetrize_marginals = symmetrize;
  return p;
}

CooccurrenceMatrix correct(const ScoredCooccurrence& sc,
                           const NeutralizationPolicy& policy) {
  const std::int32_t n = sc.vocab_size();
  if (std::int32_t(policy.neutralize.size()) != n)
    throw UsageError("neutralization mask does not match vocabulary");

  const Marginals m = compute_marginals(sc);
  const std::size_t nb = sc.bucket_count();
  const std::int32_t radius = sc.bucket_radius();

  // Bucket weights w(x). Symmetrized: mirror buckets share the average mass.
  std::vector<double> wx(nb, 0.0);
  if (m.total > 0.0) {
    for (std::size_t i = 0; i < nb; ++i) wx[i] = m.bucket[i] / m.total;
    if (policy.symmetrize_marginals) {
      for (std::int32_t x = 1; x <= radius; ++x) {
        const double avg = (wx[radius - x] + wx[radius + x]) / 2.0;
        wx[radius - x] = wx[radius + x] = avg;
      }
    }
  }

  // coeff[b*nb + i]: multiplier applied to X(a,b,x). 1.0 where the context is
  // passed through or has a single observed bucket, so those sums stay
  // bit-identical to collapse().
  std::vector<double> coeff(std::size_t(n) * nb, 1.0);
  for (std::int32_t b = 0; b < n; ++b) {
    if (m.context[b] <= 0.0) continue;
    if (!policy.neutralize[b]) continue;
    std::size_t observed = 0, last = 0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      if (m.context_bucket[std::size_t(b) * nb + i] > 0.0) {
        ++observed;
        last = i;
        wsum += wx[i];
      }
    }
    if (observed == 0)
      throw DataError("context with mass but no observed bucket (corrupt counts)");
    if (observed == 1) {
      (void)last;
      continue;  // averaging over one bucket is the identity
    }
    for (std::size_t i = 0; i < nb; ++i) {
      const double mbx = m.context_bucket[std::size_t(b) * nb + i];
      coeff[std::size_t(b) * nb + i] =
          mbx > 0.0 ? m.context[b] * wx[i] / (mbx * wsum) : 0.0;
    }
  }

  CooccurrenceMatrix out(n);
  sc.for_each_pair_sorted(
      [&](std::int32_t a, std::int32_t b, std::span<const double> row) {
        const double* cf = &coeff[std::size_t(b) * nb];
        double sum = 0.0;
        for (std::size_t i = 0; i < nb; ++i) sum += row[i] * cf[i];
        if (policy.neutralize[b] ? sum > kCountFloor : sum != 0.0)
          out.add(a, b, sum);
      });
  return out;
}

CorrectionStats report_correction_stats(const CooccurrenceMatrix& before,
                                        const CooccurrenceMatrix& after) {
  if (before.vocab_size() != after.vocab_size())
    throw UsageError("matrices from different vocabularies");
  CorrectionStats st;
  st.cells_before = std::int64_t(before.size());
  st.cells_after = std::int64_t(after.size());
  std::vector<double> mass_before(before.vocab_size(), 0.0);
  std::vector<double> mass_after(before.vocab_size(), 0.0);

  auto note = [&](std::int32_t a, std::int32_t b, double x, double y) {
    if (x == y) return;
    ++st.modified_cells;
    const double rel = std::abs(y - x) / std::max(std::abs(x), std::abs(y));
    if (rel > st.max_rel_change) {
      st.max_rel_change = rel;
      st.max_rel_word = a;
      st.max_rel_context = b;
    }
  };

  before.for_each([&](std::int32_t a, std::int32_t b, double x) {
    mass_before[b] += x;
    note(a, b, x, after.weight(a, b));
  });
  after.for_each([&](std::int32_t a, std::int32_t b, double y) {
    mass_after[b] += y;
    if (before.weight(a, b) == 0.0) note(a, b, 0.0, y);
  });

  st.context_mass_ratio.resize(before.vocab_size(), 1.0);
  for (std::int32_t b = 0; b < before.vocab_size(); ++b)
    if (mass_before[b] != 0.0)
      st.context_mass_ratio[b] = mass_after[b] / mass_before[b];
  return st;
}

}  // namespace birm
