#include "birm/weat.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "birm/errors.hpp"
#include "birm/io.hpp"
#include "birm/kernels.hpp"
#include "birm/rng.hpp"

namespace birm {

namespace {

std::vector<std::int32_t> resolve_all(const std::vector<std::string>& words,
                                      const VectorTable& vt,
                                      const std::string& what) {
  std::vector<std::int32_t> ids;
  std::vector<std::string> missing;
  for (const auto& w : words) {
    const std::int32_t id = vt.id(w);
    if (id < 0)
      missing.push_back(w);
    else
      ids.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = what + " words missing from vectors:";
    for (const auto& w : missing) msg += " " + w;
    throw DataError(msg);
  }
  return ids;
}

// Sum of assoc[i] over the subset, ascending index order. The observed
// statistic and every partition statistic go through this same path so the
// observed partition compares equal to itself bit-for-bit.
double subset_stat(const std::vector<double>& assoc,
                   const std::vector<std::uint32_t>& subset, double total) {
  double s = 0.0;
  for (std::uint32_t i : subset) s += assoc[i];
  return 2.0 * s - total;
}

}  // namespace

WeatTestSpec WeatTestSpec::load(std::istream& in, const std::string& name) {
  auto sections = io::read_sections(in, {"X", "Y", "A", "B"});
  WeatTestSpec spec;
  spec.name = name;
  spec.x = sections["X"];
  spec.y = sections["Y"];
  spec.a = sections["A"];
  spec.b = sections["B"];
  spec.validate();
  return spec;
}

WeatTestSpec WeatTestSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string name = path;
  const std::size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return load(in, name);
}

void WeatTestSpec::validate() const {
  if (x.empty() || y.empty() || a.empty() || b.empty())
    throw DataError("WEAT spec " + name + ": all four sections must be non-empty");
  if (x.size() != y.size())
    throw DataError("WEAT spec " + name + ": |X| != |Y|");
  std::unordered_set<std::string> tx(x.begin(), x.end());
  for (const auto& w : y)
    if (tx.count(w))
      throw DataError("WEAT spec " + name + ": word in both X and Y: " + w);
  std::unordered_set<std::string> ta(a.begin(), a.end());
  for (const auto& w : b)
    if (ta.count(w))
      throw DataError("WEAT spec " + name + ": word in both A and B: " + w);
}

double association(const VectorTable& vt, std::int32_t w,
                   const std::vector<std::int32_t>& a_ids,
                   const std::vector<std::int32_t>& b_ids) {
  const double* wv = vt.vec(w);
  double sa = 0.0, sb = 0.0;
  for (std::int32_t id : a_ids) sa += cosine(wv, vt.vec(id), vt.dim());
  for (std::int32_t id : b_ids) sb += cosine(wv, vt.vec(id), vt.dim());
  return sa / double(a_ids.size()) - sb / double(b_ids.size());
}

std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    // c * (n - k + i) stays exact for the sizes used here (2n <= 64)
    c = c * (n - k + i) / i;
  }
  return c;
}

WeatResult weat(const WeatTestSpec& spec, const VectorTable& vt,
                std::uint64_t max_exact, std::uint64_t mc_samples,
                std::uint64_t seed) {
  spec.validate();
  const std::vector<std::int32_t> x_ids = resolve_all(spec.x, vt, "X");
  const std::vector<std::int32_t> y_ids = resolve_all(spec.y, vt, "Y");
  const std::vector<std::int32_t> a_ids = resolve_all(spec.a, vt, "A");
  const std::vector<std::int32_t> b_ids = resolve_all(spec.b, vt, "B");

  const std::uint32_t n = std::uint32_t(x_ids.size());
  const std::uint32_t pool = 2 * n;
  std::vector<double> assoc(pool);
  for (std::uint32_t i = 0; i < n; ++i)
    assoc[i] = association(vt, x_ids[i], a_ids, b_ids);
  for (std::uint32_t i = 0; i < n; ++i)
    assoc[n + i] = association(vt, y_ids[i], a_ids, b_ids);

  double total = 0.0;
  for (double s : assoc) total += s;

  std::vector<std::uint32_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const double observed = subset_stat(assoc, identity, total);

  WeatResult r;
  r.name = spec.name;
  r.statistic = observed;

  const std::uint64_t partitions = binomial(pool, n);
  if (partitions <= max_exact) {
    r.mode = WeatResult::Mode::exact;
    std::uint64_t ge = 0;
    std::vector<std::uint32_t> comb = identity;
    while (true) {
      if (subset_stat(assoc, comb, total) >= observed) ++ge;
      // next n-combination of {0..pool-1} in lexicographic order
      std::int32_t i = std::int32_t(n) - 1;
      while (i >= 0 && comb[i] == pool - n + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (std::uint32_t j = std::uint32_t(i) + 1; j < n; ++j)
        comb[j] = comb[j - 1] + 1;
    }
    r.p_num = ge;
    r.p_den = partitions;
  } else {
    r.mode = WeatResult::Mode::montecarlo;
    std::mt19937_64 gen(seed);
    std::vector<std::uint32_t> perm(pool);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::uint32_t> subset(n);
    std::uint64_t ge = 0;
    for (std::uint64_t s = 0; s < mc_samples; ++s) {
      rng::shuffle(perm, gen);
      std::copy(perm.begin(), perm.begin() + n, subset.begin());
      std::sort(subset.begin(), subset.end());
      if (subset_stat(assoc, subset, total) >= observed) ++ge;
    }
    r.p_num = ge + 1;  // the observed partition itself
    r.p_den = mc_samples + 1;
  }
  r.p_value = double(r.p_num) / double(r.p_den);

  // Effect size with population stddev over the pooled associations.
  double mean = total / double(pool);
  double var = 0.0;
  for (double s : assoc) var += (s - mean) * (s - mean);
  var /= double(pool);
  double mean_x = 0.0, mean_y = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) mean_x += assoc[i];
  for (std::uint32_t i = 0; i < n; ++i) mean_y += assoc[n + i];
  mean_x /= double(n);
  mean_y /= double(n);
  if (var == 0.0) {
    r.effect_degenerate = true;
    r.effect_size = 0.0;
  } else {
    r.effect_size = (mean_x - mean_y) / std::sqrt(var);
  }
  return r;
}

double ripa(const double* w, const double* f, const double* m,
            std::int32_t dim) {
  std::vector<double> diff(dim);
  for (std::int32_t k = 0; k < dim; ++k) diff[k] = f[k] - m[k];
  const double norm2 = kernels::dot(diff.data(), diff.data(), dim);
  if (norm2 == 0.0)
    throw NumericalError("RIPA attribute pair has identical vectors");
  return kernels::dot(w, diff.data(), dim) / std::sqrt(norm2);
}

RipaReport ripa_report(const std::vector<std::string>& words,
                       const std::vector<std::string>& fem,
                       const std::vector<std::string>& masc,
                       const VectorTable& vt) {
  const std::vector<std::int32_t> f_ids = resolve_all(fem, vt, "feminine");
  const std::vector<std::int32_t> m_ids = resolve_all(masc, vt, "masculine");

  RipaReport report;
  for (const auto& w : words) {
    const std::int32_t id = vt.id(w);
    if (id < 0) {
      report.skipped.push_back(w);
      continue;
    }
    RipaRow row;
    row.word = w;
    row.scores.reserve(f_ids.size() * m_ids.size());
    for (std::int32_t f : f_ids)
      for (std::int32_t m : m_ids)
        row.scores.push_back(ripa(vt.vec(id), vt.vec(f), vt.vec(m), vt.dim()));
    std::vector<double> sorted = row.scores;
    std::sort(sorted.begin(), sorted.end());
    row.min = sorted.front();
    row.max = sorted.back();
    const std::size_t half = sorted.size() / 2;
    row.median = sorted.size() % 2 == 1
                     ? sorted[half]
                     : (sorted[half - 1] + sorted[half]) / 2.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace birm
