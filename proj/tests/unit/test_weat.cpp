#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "birm/errors.hpp"
#include "birm/rng.hpp"
#include "birm/vectors.hpp"
#include "birm/weat.hpp"
#include "doctest.h"
#include "oracles.hpp"

using birm::VectorTable;
using birm::WeatResult;
using birm::WeatTestSpec;

namespace {

VectorTable make_table(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    std::vector<std::string> tokens;
    std::vector<double> data;
    const std::int32_t dim = static_cast<std::int32_t>(rows.front().second.size());
    for (const auto& [tok, vec] : rows) {
        tokens.push_back(tok);
        data.insert(data.end(), vec.begin(), vec.end());
    }
    return VectorTable(std::move(tokens), std::move(data), dim);
}

// n X-words at (1,0), n Y-words at (0,1), single-word attributes on the axes
VectorTable separated_table(int n) {
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int i = 0; i < n; ++i) rows.push_back({"x" + std::to_string(i), {1.0, 0.0}});
    for (int i = 0; i < n; ++i) rows.push_back({"y" + std::to_string(i), {0.0, 1.0}});
    rows.push_back({"attr_a", {1.0, 0.0}});
    rows.push_back({"attr_b", {0.0, 1.0}});
    return make_table(rows);
}

WeatTestSpec separated_spec(int n) {
    WeatTestSpec spec;
    spec.name = "separated";
    for (int i = 0; i < n; ++i) spec.x.push_back("x" + std::to_string(i));
    for (int i = 0; i < n; ++i) spec.y.push_back("y" + std::to_string(i));
    spec.a = {"attr_a"};
    spec.b = {"attr_b"};
    return spec;
}

VectorTable random_table(int n_targets, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    auto rand_vec = [&] {
        std::vector<double> v(4);
        for (double& x : v) x = birm::rng::uniform01(gen) * 2.0 - 1.0;
        return v;
    };
    for (int i = 0; i < n_targets; ++i) rows.push_back({"x" + std::to_string(i), rand_vec()});
    for (int i = 0; i < n_targets; ++i) rows.push_back({"y" + std::to_string(i), rand_vec()});
    for (int i = 0; i < 3; ++i) rows.push_back({"a" + std::to_string(i), rand_vec()});
    for (int i = 0; i < 3; ++i) rows.push_back({"b" + std::to_string(i), rand_vec()});
    return make_table(rows);
}

WeatTestSpec random_spec(int n_targets) {
    WeatTestSpec spec;
    spec.name = "random";
    for (int i = 0; i < n_targets; ++i) spec.x.push_back("x" + std::to_string(i));
    for (int i = 0; i < n_targets; ++i) spec.y.push_back("y" + std::to_string(i));
    spec.a = {"a0", "a1", "a2"};
    spec.b = {"b0", "b1", "b2"};
    return spec;
}

}  // namespace

TEST_SUITE("weat") {

TEST_CASE("spec file parsing and validation") {
    std::istringstream in(
        "# example\n"
        "[X]\nmath\nalgebra\n"
        "[Y]\npoetry\nart\n"
        "[A]\nhe\n"
        "[B]\nshe\n");
    WeatTestSpec spec = WeatTestSpec::load(in, "toy");
    CHECK(spec.name == "toy");
    CHECK(spec.x == std::vector<std::string>{"math", "algebra"});
    CHECK(spec.b == std::vector<std::string>{"she"});
    spec.validate();

    WeatTestSpec uneven = spec;
    uneven.y.push_back("dance");
    CHECK_THROWS_AS(uneven.validate(), birm::DataError);

    WeatTestSpec overlap = spec;
    overlap.y[0] = "math";
    CHECK_THROWS_AS(overlap.validate(), birm::DataError);

    WeatTestSpec attr_overlap = spec;
    attr_overlap.b[0] = "he";
    CHECK_THROWS_AS(attr_overlap.validate(), birm::DataError);

    std::istringstream bad("[X]\nmath\n[Q]\nwho\n");
    CHECK_THROWS_AS(WeatTestSpec::load(bad, "bad"), birm::DataError);
}

TEST_CASE("association hand cases") {
    VectorTable vt = make_table({{"w", {1.0, 0.0}},
                                 {"a", {1.0, 0.0}},
                                 {"b", {0.0, 1.0}},
                                 {"ortho", {0.0, 1.0}}});
    const std::vector<std::int32_t> a_ids = {vt.id("a")};
    const std::vector<std::int32_t> b_ids = {vt.id("b")};

    CHECK(birm::association(vt, vt.id("w"), a_ids, b_ids) == 1.0);
    // both attribute sets identical -> exactly zero
    CHECK(birm::association(vt, vt.id("w"), a_ids, a_ids) == 0.0);
    // orthogonal to (1,0), parallel to (0,1): 0 - 1
    CHECK(birm::association(vt, vt.id("ortho"), a_ids, b_ids) == -1.0);
}

TEST_CASE("cosine rejects zero vectors") {
    VectorTable vt = make_table({{"w", {0.0, 0.0}}, {"a", {1.0, 0.0}}});
    CHECK_THROWS_AS(birm::cosine(vt.vec(0), vt.vec(1), 2), birm::NumericalError);
}

TEST_CASE("binomial coefficients") {
    CHECK(birm::binomial(16, 8) == 12870);
    CHECK(birm::binomial(20, 10) == 184756);
    CHECK(birm::binomial(12, 6) == 924);
    CHECK(birm::binomial(5, 0) == 1);
    CHECK(birm::binomial(5, 5) == 1);
    for (std::uint32_t n : {8u, 12u, 16u, 20u, 24u}) {
        for (std::uint32_t k = 0; k <= n; ++k) {
            CHECK(birm::binomial(n, k) == testsup::binomial_oracle(n, k));
        }
    }
}

TEST_CASE("fully separated eight plus eight hits the exact floor") {
    WeatResult r = birm::weat(separated_spec(8), separated_table(8));
    CHECK(r.mode == WeatResult::Mode::exact);
    CHECK(r.p_num == 1);
    CHECK(r.p_den == 12870);
    CHECK(r.p_value == 1.0 / 12870.0);
    CHECK(r.statistic == 16.0);
    CHECK_FALSE(r.effect_degenerate);
    CHECK(std::abs(r.effect_size - 2.0) <= 1e-12);
}

TEST_CASE("fully separated ten plus ten hits the exact floor") {
    WeatResult r = birm::weat(separated_spec(10), separated_table(10));
    CHECK(r.mode == WeatResult::Mode::exact);
    CHECK(r.p_num == 1);
    CHECK(r.p_den == 184756);
    CHECK(r.p_value == 1.0 / 184756.0);
    CHECK(std::abs(r.effect_size - 2.0) <= 1e-12);
}

TEST_CASE("identical association multisets give zero effect") {
    VectorTable vt = make_table({{"x0", {1.0, 0.0}},
                                 {"x1", {0.0, 1.0}},
                                 {"y0", {0.0, 1.0}},
                                 {"y1", {1.0, 0.0}},
                                 {"attr_a", {1.0, 0.0}},
                                 {"attr_b", {0.0, 1.0}}});
    WeatTestSpec spec;
    spec.name = "mirror";
    spec.x = {"x0", "x1"};
    spec.y = {"y0", "y1"};
    spec.a = {"attr_a"};
    spec.b = {"attr_b"};
    WeatResult r = birm::weat(spec, vt);
    CHECK(r.statistic == 0.0);
    CHECK(r.effect_size == 0.0);
    CHECK_FALSE(r.effect_degenerate);
}

TEST_CASE("constant associations are flagged degenerate") {
    VectorTable vt = make_table({{"x0", {1.0, 1.0}},
                                 {"x1", {1.0, 1.0}},
                                 {"y0", {1.0, 1.0}},
                                 {"y1", {1.0, 1.0}},
                                 {"attr_a", {1.0, 0.0}},
                                 {"attr_b", {0.0, 1.0}}});
    WeatTestSpec spec;
    spec.name = "flat";
    spec.x = {"x0", "x1"};
    spec.y = {"y0", "y1"};
    spec.a = {"attr_a"};
    spec.b = {"attr_b"};
    WeatResult r = birm::weat(spec, vt);
    CHECK(r.effect_degenerate);
    CHECK(r.effect_size == 0.0);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);  // every partition ties the observed zero
}

TEST_CASE("swapping targets negates statistic and effect exactly") {
    VectorTable vt = random_table(6, 81);
    WeatTestSpec spec = random_spec(6);
    WeatTestSpec swapped = spec;
    std::swap(swapped.x, swapped.y);

    WeatResult fwd = birm::weat(spec, vt);
    WeatResult rev = birm::weat(swapped, vt);
    // antisymmetric up to rounding only: the observed statistic shares the
    // 2s - total evaluation path with the partition statistics, and total
    // accumulates in pool order, which the swap reverses
    CHECK(fwd.statistic == doctest::Approx(-rev.statistic).epsilon(1e-12));
    CHECK(fwd.effect_size == doctest::Approx(-rev.effect_size).epsilon(1e-12));

    // no ties on random data: the two one-sided counts cover everything once
    CHECK(fwd.p_den == 924);
    CHECK(rev.p_den == 924);
    CHECK(fwd.p_num + rev.p_num == 924 + 1);
    CHECK(fwd.p_num >= 1);
    CHECK(rev.p_num >= 1);
}

TEST_CASE("swapping attributes negates statistic and effect exactly") {
    VectorTable vt = random_table(6, 82);
    WeatTestSpec spec = random_spec(6);
    WeatTestSpec swapped = spec;
    std::swap(swapped.a, swapped.b);

    WeatResult fwd = birm::weat(spec, vt);
    WeatResult rev = birm::weat(swapped, vt);
    CHECK(fwd.statistic == -rev.statistic);
    CHECK(fwd.effect_size == -rev.effect_size);
}

TEST_CASE("power-of-two rescaling leaves results bit-identical") {
    VectorTable vt = random_table(6, 83);
    WeatTestSpec spec = random_spec(6);
    WeatResult base = birm::weat(spec, vt);

    std::mt19937_64 gen(7);
    std::vector<std::string> tokens;
    std::vector<double> data;
    for (std::int32_t i = 0; i < vt.size(); ++i) {
        tokens.push_back(vt.token(i));
        const double scales[] = {0.25, 0.5, 2.0, 4.0, 8.0};
        const double s = scales[birm::rng::bounded(gen, 5)];
        for (std::int32_t k = 0; k < vt.dim(); ++k) data.push_back(vt.vec(i)[k] * s);
    }
    VectorTable scaled(std::move(tokens), std::move(data), vt.dim());
    WeatResult r = birm::weat(spec, scaled);
    CHECK(r.statistic == base.statistic);
    CHECK(r.effect_size == base.effect_size);
    CHECK(r.p_num == base.p_num);
    CHECK(r.p_den == base.p_den);
}

TEST_CASE("arbitrary positive rescaling preserves results to tolerance") {
    VectorTable vt = random_table(6, 84);
    WeatTestSpec spec = random_spec(6);
    WeatResult base = birm::weat(spec, vt);

    std::mt19937_64 gen(8);
    std::vector<std::string> tokens;
    std::vector<double> data;
    for (std::int32_t i = 0; i < vt.size(); ++i) {
        tokens.push_back(vt.token(i));
        const double s = 0.1 + 5.0 * birm::rng::uniform01(gen);
        for (std::int32_t k = 0; k < vt.dim(); ++k) data.push_back(vt.vec(i)[k] * s);
    }
    VectorTable scaled(std::move(tokens), std::move(data), vt.dim());
    WeatResult r = birm::weat(spec, scaled);
    CHECK(r.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
    CHECK(r.effect_size == doctest::Approx(base.effect_size).epsilon(1e-12));
    CHECK(r.p_num == base.p_num);
}

TEST_CASE("monte carlo approximates the exact p-value") {
    VectorTable vt = random_table(6, 85);
    WeatTestSpec spec = random_spec(6);

    WeatResult exact = birm::weat(spec, vt);
    REQUIRE(exact.mode == WeatResult::Mode::exact);

    WeatResult mc = birm::weat(spec, vt, /*max_exact=*/1, /*mc_samples=*/200000,
                               /*seed=*/3);
    CHECK(mc.mode == WeatResult::Mode::montecarlo);
    CHECK(mc.p_den == 200001);
    CHECK(std::abs(mc.p_value - exact.p_value) <= 0.01);
    // statistic and effect do not depend on the p-value mode
    CHECK(mc.statistic == exact.statistic);
    CHECK(mc.effect_size == exact.effect_size);
}

TEST_CASE("monte carlo is seed-reproducible") {
    VectorTable vt = random_table(8, 86);
    WeatTestSpec spec = random_spec(8);
    WeatResult a = birm::weat(spec, vt, 1, 20000, 11);
    WeatResult b = birm::weat(spec, vt, 1, 20000, 11);
    WeatResult c = birm::weat(spec, vt, 1, 20000, 12);
    CHECK(a.p_num == b.p_num);
    CHECK(a.p_value == b.p_value);
    // different seed virtually always lands on a different count here
    CHECK(a.p_num != c.p_num);
}

TEST_CASE("effect size is bounded by two") {
    for (std::uint64_t seed = 200; seed < 208; ++seed) {
        VectorTable vt = random_table(5, seed);
        WeatTestSpec spec = random_spec(5);
        WeatResult r = birm::weat(spec, vt);
        if (!r.effect_degenerate) CHECK(std::abs(r.effect_size) <= 2.0);
    }
}

TEST_CASE("out-of-vocabulary words abort with a report") {
    VectorTable vt = separated_table(3);
    WeatTestSpec spec = separated_spec(3);
    spec.x[1] = "ghost";
    CHECK_THROWS_WITH_AS(birm::weat(spec, vt),
                         doctest::Contains("ghost"), birm::DataError);
}

TEST_CASE("ripa hand cases") {
    const double f[] = {1.0, 0.0};
    const double m[] = {0.0, 1.0};
    const double w1[] = {2.0, 0.0};
    CHECK(birm::ripa(w1, f, m, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // unit projection onto the normalized difference
    const double inv = 1.0 / std::sqrt(2.0);
    const double w2[] = {inv, -inv};
    CHECK(birm::ripa(w2, f, m, 2) == doctest::Approx(1.0).epsilon(1e-15));

    const double w3[] = {1.0, 1.0};  // orthogonal to f - m
    CHECK(birm::ripa(w3, f, m, 2) == doctest::Approx(0.0));

    CHECK_THROWS_AS(birm::ripa(w1, f, f, 2), birm::NumericalError);
}

TEST_CASE("ripa report matches pairwise recomputation") {
    VectorTable vt = make_table({{"w1", {0.3, -0.4, 0.6}},
                                 {"w2", {-1.0, 0.2, 0.1}},
                                 {"f1", {1.0, 0.0, 0.0}},
                                 {"f2", {0.5, 0.5, 0.0}},
                                 {"m1", {0.0, 1.0, 0.0}},
                                 {"m2", {0.0, 0.0, 1.0}}});
    birm::RipaReport rep = birm::ripa_report({"w1", "ghost", "w2"}, {"f1", "f2"},
                                             {"m1", "m2"}, vt);
    CHECK(rep.skipped == std::vector<std::string>{"ghost"});
    REQUIRE(rep.rows.size() == 2);

    for (const auto& row : rep.rows) {
        REQUIRE(row.scores.size() == 4);
        const std::int32_t w = vt.id(row.word);
        std::vector<double> manual;
        for (const char* fw : {"f1", "f2"})
            for (const char* mw : {"m1", "m2"})
                manual.push_back(
                    birm::ripa(vt.vec(w), vt.vec(vt.id(fw)), vt.vec(vt.id(mw)), 3));
        CHECK(row.scores == manual);

        std::vector<double> sorted = manual;
        std::sort(sorted.begin(), sorted.end());
        CHECK(row.min == sorted.front());
        CHECK(row.max == sorted.back());
        CHECK(row.median == doctest::Approx(0.5 * (sorted[1] + sorted[2])));
        CHECK(row.min <= row.median);
        CHECK(row.median <= row.max);
    }

    // single pair: min = median = max
    birm::RipaReport single = birm::ripa_report({"w1"}, {"f1"}, {"m1"}, vt);
    REQUIRE(single.rows.size() == 1);
    CHECK(single.rows[0].min == single.rows[0].median);
    CHECK(single.rows[0].median == single.rows[0].max);

    // attribute words must all resolve
    CHECK_THROWS_AS(birm::ripa_report({"w1"}, {"f1", "ghost"}, {"m1"}, vt),
                    birm::DataError);
}

TEST_CASE("shipped spec files parse and validate") {
    std::size_t seen = 0;
    for (const auto& entry :
         std::filesystem::directory_iterator(BIRM_DATA_DIR "/weat")) {
        if (entry.path().extension() != ".txt") continue;  // skip .example
        ++seen;
        WeatTestSpec spec = WeatTestSpec::load(entry.path().string());
        CHECK(spec.name == entry.path().stem().string());
        CHECK(spec.x.size() == spec.y.size());
        CHECK(spec.x.size() >= 7);
    }
    CHECK(seen >= 4);
}

}  // TEST_SUITE
