#include "birm/semantic_eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "birm/errors.hpp"
#include "birm/io.hpp"
#include "birm/kernels.hpp"

namespace birm {

SimilarityDataset SimilarityDataset::load(std::istream& in) {
  SimilarityDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = io::trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    Row row;
    if (!(ls >> row.w1 >> row.w2 >> row.score) || !std::isfinite(row.score))
      throw DataError("bad similarity line " + std::to_string(lineno));
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw DataError("empty similarity dataset");
  return ds;
}

SimilarityDataset SimilarityDataset::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load(in);
}

AnalogyDataset AnalogyDataset::load(std::istream& in) {
  AnalogyDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = io::trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    Row row;
    std::string extra;
    if (!(ls >> row.a >> row.b >> row.c >> row.d) || (ls >> extra))
      throw DataError("bad analogy line " + std::to_string(lineno));
    if (row.a == row.b || row.a == row.c || row.a == row.d ||
        row.b == row.c || row.b == row.d || row.c == row.d)
      throw DataError("repeated word in analogy line " + std::to_string(lineno));
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw DataError("empty analogy dataset");
  return ds;
}

AnalogyDataset AnalogyDataset::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load(in);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (double(i) + double(j)) / 2.0 + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

SimilarityResult similarity_eval(const SimilarityDataset& ds,
                                 const VectorTable& vt) {
  std::vector<double> sys, gold;
  SimilarityResult res;
  for (const auto& row : ds.rows) {
    const std::int32_t i1 = vt.id(row.w1);
    const std::int32_t i2 = vt.id(row.w2);
    if (i1 < 0 || i2 < 0) {
      ++res.skipped;
      continue;
    }
    sys.push_back(cosine(vt.vec(i1), vt.vec(i2), vt.dim()));
    gold.push_back(row.score);
    ++res.covered;
  }
  if (res.covered < 2)
    throw DataError("fewer than 2 similarity pairs covered by the vectors");

  const std::vector<double> rs = average_ranks(sys);
  const std::vector<double> rg = average_ranks(gold);
  const double n = double(rs.size());
  double ms = 0.0, mg = 0.0;
  for (double v : rs) ms += v;
  for (double v : rg) mg += v;
  ms /= n;
  mg /= n;
  double num = 0.0, ds2 = 0.0, dg2 = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    num += (rs[i] - ms) * (rg[i] - mg);
    ds2 += (rs[i] - ms) * (rs[i] - ms);
    dg2 += (rg[i] - mg) * (rg[i] - mg);
  }
  if (ds2 == 0.0 || dg2 == 0.0)
    throw DataError("constant ranking, Spearman undefined");
  res.spearman = num / std::sqrt(ds2 * dg2);
  return res;
}

AnalogyResult analogy_eval(const AnalogyDataset& ds, const VectorTable& vt) {
  const std::int32_t n = vt.size();
  const std::int32_t dim = vt.dim();

  // Unit-normalize once; zero vectors stay zero.
  std::vector<double> unit(std::size_t(n) * dim);
  for (std::int32_t i = 0; i < n; ++i) {
    const double* v = vt.vec(i);
    const double norm2 = kernels::dot(v, v, dim);
    double* u = &unit[std::size_t(i) * dim];
    if (norm2 > 0.0) {
      std::copy(v, v + dim, u);
      kernels::scale(u, dim, 1.0 / std::sqrt(norm2));
    }
  }

  AnalogyResult res;
  std::int64_t correct = 0;
  std::vector<double> target(dim);
  for (const auto& row : ds.rows) {
    const std::int32_t ia = vt.id(row.a), ib = vt.id(row.b);
    const std::int32_t ic = vt.id(row.c), id = vt.id(row.d);
    if (ia < 0 || ib < 0 || ic < 0 || id < 0) {
      ++res.skipped;
      continue;
    }
    ++res.covered;
    const double* ua = &unit[std::size_t(ia) * dim];
    const double* ub = &unit[std::size_t(ib) * dim];
    const double* uc = &unit[std::size_t(ic) * dim];
    for (std::int32_t k = 0; k < dim; ++k) target[k] = ub[k] - ua[k] + uc[k];

    // cosine argmax == dot argmax over unit candidates; ties to lowest id
    std::int32_t best = -1;
    double best_dot = 0.0;
    for (std::int32_t cand = 0; cand < n; ++cand) {
      if (cand == ia || cand == ib || cand == ic) continue;
      const double d =
          kernels::dot(&unit[std::size_t(cand) * dim], target.data(), dim);
      if (best < 0 || d > best_dot) {
        best = cand;
        best_dot = d;
      }
    }
    if (best == id) ++correct;
  }
  if (res.covered == 0) throw DataError("no analogy rows covered by the vectors");
  res.accuracy = double(correct) / double(res.covered);
  return res;
}

}  // namespace birm
