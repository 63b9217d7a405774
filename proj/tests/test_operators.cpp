#include "medosc/error.hpp"
#include "medosc/generators.hpp"
#include "medosc/operators.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace medosc;

TEST_CASE("Haar functions are orthonormal and mean zero") {
    const Grid root1{1, 1};
    const auto h = haar_function(root1, root1.root());
    CHECK(h[0] == 1.0);
    CHECK(h[1] == -1.0);

    for (int L = 1; L <= 5; ++L) {
        const Grid g{1, L};
        const GridFunction one(g, std::vector<double>(g.cell_count(), 1.0));
        std::vector<GridFunction> hs;
        for (const auto& q : all_dyadic_cubes(g))
            if (q.level < L) hs.push_back(haar_function(g, q));
        for (std::size_t i = 0; i < hs.size(); ++i) {
            CHECK(oracle::inner(one, hs[i]) == doctest::Approx(0.0).epsilon(1e-14));
            for (std::size_t j = i; j < hs.size(); ++j)
                CHECK(oracle::inner(hs[i], hs[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
    const Grid g{1, 3};
    CHECK_THROWS_AS(haar_function(g, {1, 3, {0, 0}}), Error);
    CHECK_THROWS_AS(haar_function(Grid{2, 2}, Grid{2, 2}.root()), Error);
}

TEST_CASE("Haar analysis and synthesis reconstruct f minus its mean") {
    for (int L = 1; L <= 6; ++L) {
        const auto f = generate("random-uniform", 1, L, static_cast<std::uint64_t>(L));
        const auto c = haar_coefficients(f);
        const auto back = haar_synthesis(f.grid(), c);
        double mean = 0.0;
        for (double v : f.values()) mean += v;
        mean /= static_cast<double>(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i] - mean).epsilon(1e-12));
    }
}

TEST_CASE("Haar shifts") {
    const Grid g{1, 5};
    const auto f = generate("random-uniform", 1, 5, 77);

    SUBCASE("constant input maps to zero") {
        const auto c = generate("constant", 1, 5, 0, {.value = 3.0});
        const auto h = random_haar_shift(1, 1.0, 3, g);
        const auto out = apply_haar_shift(h, c);
        for (double v : out.values()) CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("martingale transform fixes a Haar atom") {
        const DyadicCube q{1, 2, {1, 0}};
        const auto atom = haar_function(g, q);
        const auto out = apply_haar_shift(martingale_transform(g, 1.0), atom);
        for (std::size_t i = 0; i < g.cell_count(); ++i) CHECK(out[i] == doctest::Approx(atom[i]).epsilon(1e-14));
    }
    SUBCASE("random shift matches term-by-term evaluation") {
        const auto h = random_haar_shift(1, 1.0, 19, g);
        CHECK(satisfies_size_bound(h));
        const auto fast = apply_haar_shift(h, f);
        const auto slow = oracle::haar_shift(h, f);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
    }
    SUBCASE("index 0 only pairs a cube with itself") {
        const auto h = random_haar_shift(0, 2.0, 5, g);
        for (const auto& e : h.entries) {
            CHECK(e.qp == e.q);
            CHECK(e.qpp == e.q);
        }
        CHECK(satisfies_size_bound(h));
    }
    SUBCASE("seeds change the coefficients") {
        const auto a = random_haar_shift(2, 1.0, 1, g), b = random_haar_shift(2, 1.0, 2, g);
        REQUIRE(a.entries.size() == b.entries.size());
        bool differ = false;
        for (std::size_t i = 0; i < a.entries.size(); ++i) differ = differ || a.entries[i].a != b.entries[i].a;
        CHECK(differ);
    }
    SUBCASE("linearity") {
        const auto h = random_haar_shift(2, 1.0, 8, g);
        const auto f2 = generate("random-heavy-tail", 1, 5, 78);
        std::vector<double> mix(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) mix[i] = 2.0 * f[i] - 0.5 * f2[i];
        const auto hm = apply_haar_shift(h, GridFunction(g, mix));
        const auto h1 = apply_haar_shift(h, f), h2 = apply_haar_shift(h, f2);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(hm[i] == doctest::Approx(2.0 * h1[i] - 0.5 * h2[i]).epsilon(1e-12));
    }
    SUBCASE("size bound violations are detected") {
        auto h = random_haar_shift(1, 1.0, 4, g);
        h.entries.front().a = 10.0;
        CHECK_FALSE(satisfies_size_bound(h));
    }
    SUBCASE("index too deep") {
        try {
            random_haar_shift(5, 1.0, 1, g);
            FAIL("expected IndexTooDeep");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::IndexTooDeep);
        }
    }
}

TEST_CASE("Hilbert transform") {
    SUBCASE("single source") {
        const Grid g{1, 4};
        std::vector<double> v(16, 0.0);
        v[5] = 1.0;
        const auto tf = hilbert_transform(GridFunction(g, v));
        const double w = g.cell_width();
        for (std::size_t i = 0; i < 16; ++i) {
            if (i == 5)
                CHECK(tf[i] == 0.0);
            else
                CHECK(tf[i] == doctest::Approx(w / (g.midpoint(i, 0) - g.midpoint(5, 0))).epsilon(1e-14));
        }
    }
    SUBCASE("even input gives odd output, reflection flips the sign") {
        const auto f = generate("random-uniform", 1, 6, 3);
        std::vector<double> even(f.size()), refl(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            even[i] = f[i] + f[f.size() - 1 - i];
            refl[i] = f[f.size() - 1 - i];
        }
        const auto te = hilbert_transform(GridFunction(f.grid(), even));
        const std::size_t mid = f.size() / 2;
        CHECK(te[mid - 1] == doctest::Approx(-te[mid]).epsilon(1e-12));
        const auto tf = hilbert_transform(f), tr = hilbert_transform(GridFunction(f.grid(), refl));
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(tr[i] == doctest::Approx(-tf[f.size() - 1 - i]).epsilon(1e-12));
    }
    SUBCASE("indicator of the left half against the closed form") {
        const auto f = generate("step", 1, 8, 0, {.amplitude = 1.0, .jump = 0.5});
        const auto tf = hilbert_transform(f);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double x = f.grid().midpoint(i, 0);
            if (std::abs(x - 0.5) < 0.05 || x < 0.05 || x > 0.95) continue;
            // int_0^{1/2} dy / (x - y)
            const double exact = std::log(std::abs(x / (x - 0.5)));
            CHECK(std::abs(tf[i] - exact) <= 0.02 * std::abs(exact));
        }
    }
}

TEST_CASE("kernel smoothness check") {
    const auto a = kernel_smoothness_check(hilbert_kernel(), 10000, 1);
    const auto b = kernel_smoothness_check(hilbert_kernel(), 10000, 2);
    CHECK(a.bounded);
    CHECK(std::isfinite(a.max_ratio));
    CHECK(a.max_ratio == doctest::Approx(b.max_ratio).epsilon(0.15));
    const auto r = kernel_smoothness_check(rough_kernel(), 10000, 1);
    CHECK_FALSE(r.bounded);
}
