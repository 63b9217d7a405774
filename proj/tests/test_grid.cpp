#include "medosc/error.hpp"
#include "medosc/generators.hpp"
#include "medosc/grid.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace medosc;

TEST_CASE("parent and ancestor") {
    CHECK(parent({1, 3, {5, 0}}) == DyadicCube{1, 2, {2, 0}});
    CHECK(parent({2, 1, {1, 0}}) == DyadicCube{2, 0, {0, 0}});
    CHECK_THROWS_AS(parent({1, 0, {0, 0}}), Error);
    try {
        parent({1, 0, {0, 0}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RootHasNoParent);
    }

    const DyadicCube c{1, 3, {5, 0}};
    CHECK(ancestor(c, 0) == c);
    CHECK(ancestor(c, 2) == DyadicCube{1, 1, {1, 0}});
    try {
        ancestor({1, 1, {1, 0}}, 2);
        FAIL("expected AncestorOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AncestorOutOfRange);
    }
}

TEST_CASE("cells_of enumerations") {
    const Grid g1{1, 3};
    CHECK(cells_of(g1, g1.root()).size() == 8);
    CHECK(cells_of(g1, DyadicCube{1, 3, {6, 0}}) == std::vector<std::size_t>{6});

    const Grid g2{2, 2};
    const auto cells = cells_of(g2, AlignedCube{2, {1, 1}, 2});
    std::set<std::pair<std::uint32_t, std::uint32_t>> got;
    for (auto c : cells) {
        const auto xy = g2.coords(c);
        got.insert({xy[0], xy[1]});
    }
    CHECK(got == std::set<std::pair<std::uint32_t, std::uint32_t>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
}

TEST_CASE("children partition every dyadic cube") {
    for (int dim : {1, 2}) {
        const Grid g{dim, dim == 1 ? 6 : 4};
        for (const auto& c : all_dyadic_cubes(g)) {
            const auto cells = cells_of(g, c);
            CHECK(cells.size() == (std::size_t{1} << (dim * (g.depth - c.level))));
            CHECK(g.measure(c) > 0.0);
            if (c.level == g.depth) continue;
            std::vector<std::size_t> joined;
            double measure = 0.0;
            for (const auto& ch : children(c)) {
                CHECK(parent(ch) == c);
                const auto part = cells_of(g, ch);
                joined.insert(joined.end(), part.begin(), part.end());
                measure += g.measure(ch);
            }
            std::sort(joined.begin(), joined.end());
            auto sorted = cells;
            std::sort(sorted.begin(), sorted.end());
            CHECK(joined == sorted);
            CHECK(measure == doctest::Approx(g.measure(c)).epsilon(1e-15));
            // Dyadic -> aligned keeps the cell set.
            auto aligned = cells_of(g, to_aligned(g, c));
            std::sort(aligned.begin(), aligned.end());
            CHECK(aligned == sorted);
        }
    }
}

TEST_CASE("dyadic slots are dense and unique") {
    const Grid g{2, 3};
    std::set<std::size_t> slots;
    for (const auto& c : all_dyadic_cubes(g)) slots.insert(dyadic_slot(c));
    CHECK(slots.size() == dyadic_slot_count(g));
    CHECK(*slots.rbegin() == dyadic_slot_count(g) - 1);
}

TEST_CASE("cube_containing and contains") {
    const Grid g{2, 3};
    for (std::size_t cell = 0; cell < g.cell_count(); ++cell)
        for (int k = 0; k <= g.depth; ++k) {
            const auto c = cube_containing(g, cell, k);
            CHECK(contains_cell(g, c, cell));
            CHECK(contains(g.root(), c));
        }
}

TEST_CASE("GridFunction validation") {
    const Grid g{1, 2};
    CHECK_THROWS_AS(GridFunction(g, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(GridFunction(g, {1.0, 2.0, std::nan(""), 0.0}), Error);
    CHECK_THROWS_AS(Weight(GridFunction(g, {1.0, 0.0, 1.0, 1.0})), Error);
    CHECK_THROWS_AS(validate(Grid{3, 2}), Error);
    CHECK(Grid{2, 3, {0, 0}, 2.0}.cell_measure() == 4.0 / 64.0);
}

TEST_CASE("generators") {
    const auto c = generate("constant", 1, 3, 0, {.value = 5.0});
    CHECK(std::all_of(c.values().begin(), c.values().end(), [](double v) { return v == 5.0; }));

    const auto s = generate("spike", 1, 4, 0, {.amplitude = 16.0, .cell = 3});
    for (std::size_t i = 0; i < 16; ++i) CHECK(s[i] == (i == 3 ? 16.0 : 0.0));

    const auto a = generate("random-uniform", 2, 3, 42);
    const auto b = generate("random-uniform", 2, 3, 42);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(generate("random-uniform", 2, 3, 43).fingerprint() != a.fingerprint());

    for (const auto& kind : generator_kinds()) {
        const auto f = generate(kind, 2, 3, 7);
        CHECK(f.size() == 64);
        for (double v : f.values()) CHECK(std::isfinite(v));
    }
    CHECK_THROWS_AS(generate("nope", 1, 3, 0), Error);

    // random-coarse does not change once the depth passes the coarse depth.
    const auto coarse = generate("random-coarse", 1, 6, 9);
    CHECK(refine(coarse).fingerprint() == generate("random-coarse", 1, 7, 9).fingerprint());

    for (const char* kind : {"unit", "power", "random"}) {
        const Weight w = generate_weight(kind, Grid{2, 3}, 5);
        for (double v : w.function().values()) CHECK(v > 0.0);
    }
}

TEST_CASE("refine duplicates values and dyadic sums scale exactly") {
    const auto f = generate("random-uniform", 2, 3, 11);
    const auto r = refine(f);
    CHECK(r.depth() == 4);
    const DyadicSums fs(f.grid(), f.values()), rs(r.grid(), r.values());
    for (const auto& c : all_dyadic_cubes(f.grid())) {
        CHECK(rs.sum(c) == 4.0 * fs.sum(c));
        CHECK(rs.average(c) == fs.average(c));
    }
    for (std::size_t cell = 0; cell < r.size(); ++cell) {
        const auto home = cube_containing(r.grid(), cell, f.depth());
        CHECK(r[cell] == f[cells_of(f.grid(), home)[0]]);
    }
}
