#include "birm/vectors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "birm/errors.hpp"
#include "birm/glove_trainer.hpp"
#include "birm/kernels.hpp"

namespace birm {

VectorTable::VectorTable(std::vector<std::string> tokens,
                         std::vector<double> data, std::int32_t dim)
    : tokens_(std::move(tokens)), data_(std::move(data)), dim_(dim) {
  if (dim_ < 1) throw UsageError("vector dim must be >= 1");
  if (data_.size() != tokens_.size() * std::size_t(dim_))
    throw UsageError("vector data size does not match token count");
  rebuild_index();
}

void VectorTable::rebuild_index() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], std::int32_t(i)).second)
      throw DataError("duplicate token in vector table: " + tokens_[i]);
  }
}

std::int32_t VectorTable::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

VectorTable VectorTable::load(std::istream& in) {
  std::vector<std::string> tokens;
  std::vector<double> data;
  std::int32_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0)
      throw DataError("bad vector line " + std::to_string(lineno));
    tokens.push_back(line.substr(0, sp));
    std::int32_t count = 0;
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw DataError("bad number on vector line " + std::to_string(lineno));
      data.push_back(v);
      p = next;
      ++count;
    }
    if (dim == 0) {
      dim = count;
      if (dim < 1) throw DataError("vector line with no values");
    } else if (count != dim) {
      throw DataError("inconsistent vector dim on line " + std::to_string(lineno));
    }
  }
  if (tokens.empty()) throw DataError("empty vector file");
  return VectorTable(std::move(tokens), std::move(data), dim);
}

VectorTable VectorTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load(in);
}

void VectorTable::save(std::ostream& out) const {
  std::string line;
  for (std::int32_t i = 0; i < size(); ++i) {
    line = tokens_[i];
    const double* v = vec(i);
    char buf[34];
    for (std::int32_t k = 0; k < dim_; ++k) {
      buf[0] = ' ';
      auto [end, ec] = std::to_chars(buf + 1, buf + sizeof(buf), v[k]);
      (void)ec;
      line.append(buf, end - buf);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw DataError("failed writing vectors");
}

void VectorTable::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  save(out);
}

VectorTable VectorTable::from_embeddings(const EmbeddingSet& emb,
                                         const Vocabulary& vocab, bool sum_mode) {
  if (vocab.size() != emb.size())
    throw UsageError("embedding size does not match vocabulary");
  std::vector<std::string> tokens(vocab.size());
  std::vector<double> data(std::size_t(vocab.size()) * emb.dim());
  for (std::int32_t i = 0; i < vocab.size(); ++i) {
    tokens[i] = vocab.token(i);
    const double* w = emb.main(i);
    const double* c = emb.context(i);
    for (std::int32_t k = 0; k < emb.dim(); ++k)
      data[std::size_t(i) * emb.dim() + k] = sum_mode ? w[k] + c[k] : w[k];
  }
  return VectorTable(std::move(tokens), std::move(data), emb.dim());
}

double cosine(const double* a, const double* b, std::int32_t dim) {
  const double ab = kernels::dot(a, b, dim);
  const double aa = kernels::dot(a, a, dim);
  const double bb = kernels::dot(b, b, dim);
  if (aa == 0.0 || bb == 0.0) throw NumericalError("cosine of zero vector");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace birm
