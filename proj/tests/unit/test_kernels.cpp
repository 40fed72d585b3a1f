#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "birm/errors.hpp"
#include "birm/kernels.hpp"
#include "birm/rng.hpp"
#include "doctest.h"

namespace k = birm::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& gen, std::size_t n, double lo,
                               double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * birm::rng::uniform01(gen);
    return v;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 16, 31, 50, 67, 128};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scale matches scalar bit for bit") {
#ifdef BIRM_HAVE_AVX2_KERNELS
    if (!k::isa_supported(k::Isa::avx2)) return;
    std::mt19937_64 gen(11);
    for (std::size_t n : kSizes) {
        std::vector<double> base = random_vec(gen, n, -5.0, 5.0);
        const double s = birm::rng::uniform01(gen) * 3.0 - 1.5;
        std::vector<double> a = base, b = base;
        k::scalar::scale(a.data(), n, s);
        k::avx2::scale(b.data(), n, s);
        REQUIRE(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
    }
#endif
}

TEST_CASE("adagrad update matches scalar bit for bit") {
#ifdef BIRM_HAVE_AVX2_KERNELS
    if (!k::isa_supported(k::Isa::avx2)) return;
    std::mt19937_64 gen(12);
    for (std::size_t n : kSizes) {
        std::vector<double> w = random_vec(gen, n, -1.0, 1.0);
        std::vector<double> c = random_vec(gen, n, -1.0, 1.0);
        std::vector<double> gw = random_vec(gen, n, 1.0, 2.0);
        std::vector<double> gc = random_vec(gen, n, 1.0, 2.0);
        const double fdiff = birm::rng::uniform01(gen) * 4.0 - 2.0;

        std::vector<double> w2 = w, c2 = c, gw2 = gw, gc2 = gc;
        k::scalar::adagrad_pair_update(w.data(), c.data(), gw.data(), gc.data(), n,
                                       fdiff, 0.05);
        k::avx2::adagrad_pair_update(w2.data(), c2.data(), gw2.data(), gc2.data(), n,
                                     fdiff, 0.05);
        REQUIRE(std::memcmp(w.data(), w2.data(), n * sizeof(double)) == 0);
        REQUIRE(std::memcmp(c.data(), c2.data(), n * sizeof(double)) == 0);
        REQUIRE(std::memcmp(gw.data(), gw2.data(), n * sizeof(double)) == 0);
        REQUIRE(std::memcmp(gc.data(), gc2.data(), n * sizeof(double)) == 0);
    }
#endif
}

TEST_CASE("adagrad update applies the textbook step") {
    // gradients taken at the pre-update values, accumulators grow by g^2,
    // parameters step by lr * g / sqrt(accumulator)
    std::mt19937_64 gen(13);
    const std::size_t n = 6;
    std::vector<double> w = random_vec(gen, n, -1.0, 1.0);
    std::vector<double> c = random_vec(gen, n, -1.0, 1.0);
    std::vector<double> gw(n, 1.0), gc(n, 1.0);
    const double fdiff = 0.7, lr = 0.05;

    std::vector<double> ew = w, ec = c, egw = gw, egc = gc;
    for (std::size_t i = 0; i < n; ++i) {
        const double g_w = fdiff * ec[i];
        const double g_c = fdiff * ew[i];
        egw[i] += g_w * g_w;
        egc[i] += g_c * g_c;
        ew[i] -= lr * g_w / std::sqrt(egw[i]);
        ec[i] -= lr * g_c / std::sqrt(egc[i]);
    }

    k::scalar::adagrad_pair_update(w.data(), c.data(), gw.data(), gc.data(), n,
                                   fdiff, lr);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(w[i] == doctest::Approx(ew[i]).epsilon(1e-15));
        CHECK(c[i] == doctest::Approx(ec[i]).epsilon(1e-15));
        CHECK(gw[i] == doctest::Approx(egw[i]).epsilon(1e-15));
        CHECK(gc[i] == doctest::Approx(egc[i]).epsilon(1e-15));
    }
}

TEST_CASE("dot agrees across implementations within tolerance") {
#ifdef BIRM_HAVE_AVX2_KERNELS
    if (!k::isa_supported(k::Isa::avx2)) return;
    std::mt19937_64 gen(14);
    for (std::size_t n : kSizes) {
        std::vector<double> a = random_vec(gen, n, -2.0, 2.0);
        std::vector<double> b = random_vec(gen, n, -2.0, 2.0);
        const double ds = k::scalar::dot(a.data(), b.data(), n);
        const double dv = k::avx2::dot(a.data(), b.data(), n);
        const double scale = std::max(1.0, std::abs(ds));
        CHECK(std::abs(ds - dv) <= 1e-10 * scale);
    }
#endif
}

TEST_CASE("dot on exact inputs") {
    const double a[] = {1.0, 2.0, 4.0, 8.0, 16.0};
    const double b[] = {0.5, 0.5, 0.25, 0.125, 0.0625};
    // terms 0.5 1.0 1.0 1.0 1.0: exact in binary
    CHECK(k::scalar::dot(a, b, 5) == 4.5);
    CHECK(k::dot(a, b, 5) == 4.5);
    CHECK(k::scalar::dot(a, b, 0) == 0.0);
}

TEST_CASE("dispatch and forcing") {
    const k::Isa before = k::active_isa();
    CHECK(k::isa_supported(k::Isa::scalar));
    CHECK(k::isa_name(k::Isa::scalar) == "scalar");
    CHECK(k::isa_name(k::Isa::avx2) == "avx2");

    k::force_isa(k::Isa::scalar);
    CHECK(k::active_isa() == k::Isa::scalar);
    if (k::isa_supported(k::Isa::avx2)) {
        k::force_isa(k::Isa::avx2);
        CHECK(k::active_isa() == k::Isa::avx2);
    } else {
        CHECK_THROWS_AS(k::force_isa(k::Isa::avx2), birm::UsageError);
    }
    k::force_isa(before);
}

}  // TEST_SUITE
