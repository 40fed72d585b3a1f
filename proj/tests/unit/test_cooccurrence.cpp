#include <cmath>
#include <map>
#include <vector>

#include "birm/cooccurrence.hpp"
#include "birm/errors.hpp"
#include "birm/text_pipeline.hpp"
#include "doctest.h"
#include "oracles.hpp"

using birm::CooccurrenceMatrix;
using birm::CountOptions;
using birm::ScoredCooccurrence;
using birm::ScoreTable;
using birm::Sentence;
using birm::Vocabulary;

namespace {

ScoreTable scores_for(const Vocabulary& vocab,
                      const std::map<std::string, std::int32_t>& named) {
    std::vector<std::int32_t> raw(vocab.size(), 0);
    for (const auto& [tok, sc] : named) {
        REQUIRE(vocab.id(tok) >= 0);
        raw[vocab.id(tok)] = sc;
    }
    return ScoreTable(std::move(raw), 1.3);
}

void check_triples_equal(const std::map<testsup::TripleKey, double>& got,
                         const std::map<testsup::TripleKey, double>& want,
                         bool exact) {
    REQUIRE(got.size() == want.size());
    auto it = got.begin();
    auto jt = want.begin();
    for (; it != got.end(); ++it, ++jt) {
        REQUIRE(it->first == jt->first);
        if (exact) {
            REQUIRE(it->second == jt->second);
        } else {
            REQUIRE(std::abs(it->second - jt->second) <=
                    1e-9 * std::max(1.0, std::abs(jt->second)));
        }
    }
}

}  // namespace

TEST_SUITE("cooccurrence") {

TEST_CASE("pair_bucket sign and clamp") {
    auto bucket = [](std::vector<std::int32_t> v, std::int32_t r) {
        return birm::pair_bucket(std::span<const std::int32_t>(v), r);
    };
    CHECK(bucket({-100}, 1) == -1);
    CHECK(bucket({}, 1) == 0);
    CHECK(bucket({0, 0, 0}, 1) == 0);
    CHECK(bucket({3, -1, -1}, 1) == 1);
    CHECK(bucket({5}, 2) == 2);
    CHECK(bucket({1, 1}, 3) == 2);
    CHECK(bucket({-7, 2}, 3) == -3);
}

TEST_CASE("one sentence, one gendered word, flat weighting") {
    std::vector<Sentence> sents = {{"he", "is", "strong"}};
    Vocabulary vocab = Vocabulary::from_sentences(sents, 1);
    ScoreTable scores = scores_for(vocab, {{"he", -100}});

    CountOptions opts;
    opts.weighting = CountOptions::Weighting::flat;
    ScoredCooccurrence sc = birm::count_scored_pairs(sents, vocab, scores, opts);

    const std::int32_t he = vocab.id("he"), is = vocab.id("is"),
                       strong = vocab.id("strong");
    std::map<testsup::TripleKey, double> want = {
        {{is, he, 0}, 1.0},     {{strong, he, 0}, 1.0},
        {{he, is, -1}, 1.0},    {{strong, is, -1}, 1.0},
        {{he, strong, -1}, 1.0}, {{is, strong, -1}, 1.0},
    };
    check_triples_equal(testsup::triple_map(sc), want, true);
}

TEST_CASE("zero scores put all mass in bucket zero") {
    std::vector<Sentence> sents = {{"a", "b", "c", "a", "b"}};
    Vocabulary vocab = Vocabulary::from_sentences(sents, 1);
    ScoreTable scores = ScoreTable::zeros(vocab.size());

    CountOptions opts;
    ScoredCooccurrence sc = birm::count_scored_pairs(sents, vocab, scores, opts);
    sc.for_each_pair([&](std::int32_t, std::int32_t, std::span<const double> row) {
        CHECK(row[0] == 0.0);
        CHECK(row[2] == 0.0);
    });

    // collapse equals a plain unscored count: (a at 0, b at 1), d=1 both ways, etc.
    CooccurrenceMatrix m = birm::collapse(sc);
    const std::int32_t a = vocab.id("a"), b = vocab.id("b");
    // a-b distances: |0-1|=1, |0-4|=4, |3-1|=2, |3-4|=1 -> 1 + 1/4 + 1/2 + 1
    CHECK(m.weight(a, b) == doctest::Approx(2.75).epsilon(1e-15));
    CHECK(m.weight(b, a) == doctest::Approx(2.75).epsilon(1e-15));
}

TEST_CASE("matches the brute-force enumerator on random corpora") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        CAPTURE(seed);
        testsup::RandomCountingCase cs = testsup::random_counting_case(seed);
        ScoredCooccurrence sc =
            birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);
        auto want = testsup::brute_force_counts(cs.sentences, cs.vocab, cs.scores,
                                                cs.opts);
        const bool exact = cs.opts.weighting == CountOptions::Weighting::flat;
        check_triples_equal(testsup::triple_map(sc), want, exact);
        CHECK(sc.bucket_radius() == cs.opts.bucket_radius);
    }
}

TEST_CASE("negating scores mirrors buckets exactly") {
    testsup::RandomCountingCase cs = testsup::random_counting_case(77);
    cs.opts.threads = 1;
    ScoredCooccurrence sc =
        birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);

    std::vector<std::int32_t> negated(cs.vocab.size());
    for (std::int32_t i = 0; i < cs.vocab.size(); ++i)
        negated[i] = -cs.scores.score(i);
    ScoreTable neg(std::move(negated), cs.scores.c());
    ScoredCooccurrence nsc =
        birm::count_scored_pairs(cs.sentences, cs.vocab, neg, cs.opts);

    auto base = testsup::triple_map(sc);
    auto flipped = testsup::triple_map(nsc);
    REQUIRE(base.size() == flipped.size());
    for (const auto& [key, w] : base) {
        auto [a, b, x] = key;
        auto it = flipped.find({a, b, -x});
        REQUIRE(it != flipped.end());
        CHECK(it->second == w);
    }
}

TEST_CASE("sharded counting equals single-pass") {
    testsup::RandomCountingCase cs = testsup::random_counting_case(101);
    cs.opts.threads = 1;
    ScoredCooccurrence one =
        birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);
    cs.opts.threads = 4;
    ScoredCooccurrence four =
        birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);
    const bool exact = cs.opts.weighting == CountOptions::Weighting::flat;
    check_triples_equal(testsup::triple_map(four), testsup::triple_map(one), exact);
}

TEST_CASE("out-of-vocabulary tokens are invisible to distances") {
    std::vector<Sentence> sents = {{"a", "zz", "b", "a", "b"}};
    // zz dropped by min_count filter via explicit vocab
    Vocabulary vocab = Vocabulary::from_counts({{"a", 2}, {"b", 2}}, 1);
    ScoreTable scores = ScoreTable::zeros(vocab.size());
    CountOptions opts;
    opts.window = 1;
    ScoredCooccurrence sc = birm::count_scored_pairs(sents, vocab, scores, opts);
    CooccurrenceMatrix m = birm::collapse(sc);
    // in-vocab positions: a b a b. window 1 pairs: (a,b) d=1 three times each way
    CHECK(m.weight(vocab.id("a"), vocab.id("b")) == 3.0);
    CHECK(m.weight(vocab.id("b"), vocab.id("a")) == 3.0);
}

TEST_CASE("scoring window can be narrower than the counting window") {
    std::vector<Sentence> sents = {{"he", "x", "y", "z", "q"}};
    Vocabulary vocab = Vocabulary::from_sentences(sents, 1);
    ScoreTable scores = scores_for(vocab, {{"he", -100}});
    CountOptions opts;
    opts.window = 4;
    opts.score_window = 1;
    ScoredCooccurrence sc = birm::count_scored_pairs(sents, vocab, scores, opts);
    auto got = testsup::triple_map(sc);
    // context y (position 2): he is outside the score window -> bucket 0
    CHECK(got.count({vocab.id("q"), vocab.id("y"), 0}) == 1);
    // context x (position 1): he adjacent -> bucket -1
    CHECK(got.count({vocab.id("y"), vocab.id("x"), -1}) == 1);
    check_triples_equal(
        got, testsup::brute_force_counts(sents, vocab, scores, opts), true);
}

TEST_CASE("exclude_focal drops the focal word from the bucket sum") {
    std::vector<Sentence> sents = {{"he", "x", "y", "z", "q"}};
    Vocabulary vocab = Vocabulary::from_sentences(sents, 1);
    ScoreTable scores = scores_for(vocab, {{"he", -100}});
    CountOptions opts;
    opts.window = 4;

    ScoredCooccurrence inc = birm::count_scored_pairs(sents, vocab, scores, opts);
    opts.exclude_focal = true;
    ScoredCooccurrence exc = birm::count_scored_pairs(sents, vocab, scores, opts);

    // pair (he, x): with the focal word "he" in x's window the bucket is -1;
    // excluding the focal leaves only zero scores -> bucket 0
    auto gi = testsup::triple_map(inc);
    auto ge = testsup::triple_map(exc);
    CHECK(gi.count({vocab.id("he"), vocab.id("x"), -1}) == 1);
    CHECK(ge.count({vocab.id("he"), vocab.id("x"), 0}) == 1);
    // for pairs not anchored at the focal word nothing changes
    CHECK(gi.at({vocab.id("y"), vocab.id("x"), -1}) ==
          ge.at({vocab.id("y"), vocab.id("x"), -1}));
    check_triples_equal(
        ge, testsup::brute_force_counts(sents, vocab, scores, opts), true);
}

TEST_CASE("flat collapsed counts are symmetric") {
    testsup::RandomCountingCase cs = testsup::random_counting_case(55);
    cs.opts.weighting = CountOptions::Weighting::flat;
    cs.opts.threads = 1;
    ScoredCooccurrence sc =
        birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);
    CooccurrenceMatrix m = birm::collapse(sc);
    m.for_each([&](std::int32_t a, std::int32_t b, double w) {
        CHECK(m.weight(b, a) == w);
    });
}

TEST_CASE("collapse preserves mass and marginalizes buckets") {
    testsup::RandomCountingCase cs = testsup::random_counting_case(23);
    ScoredCooccurrence sc =
        birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);
    CooccurrenceMatrix m = birm::collapse(sc);

    double sc_total = 0.0;
    sc.for_each_pair([&](std::int32_t, std::int32_t, std::span<const double> row) {
        for (double w : row) sc_total += w;
    });
    CHECK(m.total_mass() == doctest::Approx(sc_total).epsilon(1e-12));

    sc.for_each_pair([&](std::int32_t a, std::int32_t b, std::span<const double> row) {
        double sum = 0.0;
        for (double w : row) sum += w;
        CHECK(m.weight(a, b) == doctest::Approx(sum).epsilon(1e-12));
    });

    ScoredCooccurrence empty(3, 1);
    CHECK(birm::collapse(empty).size() == 0);
}

TEST_CASE("marginals are consistent sums") {
    testsup::RandomCountingCase cs = testsup::random_counting_case(31);
    ScoredCooccurrence sc =
        birm::count_scored_pairs(cs.sentences, cs.vocab, cs.scores, cs.opts);
    birm::Marginals m = birm::compute_marginals(sc);

    auto triples = testsup::triple_map(sc);
    const std::int32_t r = sc.bucket_radius();
    std::vector<double> mb(sc.vocab_size(), 0.0);
    std::vector<double> mx(2 * r + 1, 0.0);
    double total = 0.0;
    for (const auto& [key, w] : triples) {
        auto [a, b, x] = key;
        (void)a;
        mb[b] += w;
        mx[x + r] += w;
        total += w;
    }
    for (std::int32_t b = 0; b < sc.vocab_size(); ++b)
        CHECK(m.m_context(b) == doctest::Approx(mb[b]).epsilon(1e-12));
    for (std::int32_t x = -r; x <= r; ++x)
        CHECK(m.m_bucket(x) == doctest::Approx(mx[x + r]).epsilon(1e-12));
    CHECK(m.total == doctest::Approx(total).epsilon(1e-12));

    double sum_ctx = 0.0;
    for (std::int32_t b = 0; b < sc.vocab_size(); ++b) sum_ctx += m.m_context(b);
    CHECK(m.total == doctest::Approx(sum_ctx).epsilon(1e-12));
}

TEST_CASE("range errors") {
    ScoredCooccurrence sc(3, 1);
    CHECK_THROWS_AS(sc.add(3, 0, 0, 1.0), birm::UsageError);
    CHECK_THROWS_AS(sc.add(0, -1, 0, 1.0), birm::UsageError);
    CHECK_THROWS_AS(sc.add(0, 0, 2, 1.0), birm::UsageError);

    ScoredCooccurrence other(3, 2);
    CHECK_THROWS_AS(sc.merge(other), birm::UsageError);

    CooccurrenceMatrix m(2);
    CHECK_THROWS_AS(m.add(2, 0, 1.0), birm::UsageError);
}

}  // TEST_SUITE
