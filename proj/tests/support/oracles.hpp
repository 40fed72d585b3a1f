#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "birm/cooccurrence.hpp"
#include "birm/glove_trainer.hpp"
#include "birm/semantic_eval.hpp"
#include "birm/text_pipeline.hpp"
#include "birm/vectors.hpp"
#include "rational.hpp"

// Independent oracles the tests compare product output against. Everything
// here favors the obvious O(n^2) formulation over the optimized paths used by
// the library.
namespace testsup {

using PairKey = std::pair<std::int32_t, std::int32_t>;
using TripleKey = std::tuple<std::int32_t, std::int32_t, std::int32_t>;

// Naive counting: per (focal, context) pair the bucket sum is recomputed by
// looping over the score window, no prefix sums, no sharding.
std::map<TripleKey, double> brute_force_counts(const std::vector<birm::Sentence>& sentences,
                                               const birm::Vocabulary& vocab,
                                               const birm::ScoreTable& scores,
                                               const birm::CountOptions& opts);

std::map<TripleKey, double> triple_map(const birm::ScoredCooccurrence& sc);
std::map<PairKey, double> pair_map(const birm::CooccurrenceMatrix& m);

// Bucket-averaged correction evaluated in exact rational arithmetic over
// integer-valued counts. Returns every (a, b) with a nonzero corrected value.
std::map<PairKey, Rat> rational_correct(std::int32_t vocab_size, std::int32_t radius,
                                        const std::map<TripleKey, long long>& counts,
                                        const std::vector<bool>& neutralize,
                                        bool symmetrize);

// Objective recomputed with plain loops, and its central-difference gradient
// in the [main | context | main bias | context bias] layout.
double reference_loss(const birm::CooccurrenceMatrix& matrix,
                      const birm::EmbeddingSet& emb, const birm::TrainerConfig& cfg);
std::vector<double> fd_gradient(const birm::CooccurrenceMatrix& matrix,
                                const birm::EmbeddingSet& emb,
                                const birm::TrainerConfig& cfg, double h);

double naive_cosine(const double* a, const double* b, std::int32_t dim);
double naive_spearman(const std::vector<double>& xs, const std::vector<double>& ys);
birm::AnalogyResult naive_analogy(const birm::AnalogyDataset& ds,
                                  const birm::VectorTable& vt);

// Exact binomial coefficient, multiplicative form in 128-bit arithmetic.
std::uint64_t binomial_oracle(std::uint32_t n, std::uint32_t k);

// Pseudo-real filler text: function words, Zipf-distributed content words,
// and balanced gendered words that stay on one side per sentence.
std::vector<std::string> background_corpus_lines(std::size_t n_sentences,
                                                 std::uint64_t seed);

// The four-sentence toy family "he/she is a handsome/sentimental engineer"
// with the given multiplicities.
std::vector<birm::Sentence> appendix_a_corpus(long long he_handsome,
                                              long long she_handsome,
                                              long long he_sentimental,
                                              long long she_sentimental);

// A randomized small corpus plus matching vocabulary, scores, and counting
// options, for brute-force counting comparisons. Corpora stay under 200
// in-vocabulary tokens and include some out-of-vocabulary ones.
struct RandomCountingCase {
    std::vector<birm::Sentence> sentences;
    birm::Vocabulary vocab;
    birm::ScoreTable scores;
    birm::CountOptions opts;
};
RandomCountingCase random_counting_case(std::uint64_t seed);

}  // namespace testsup
