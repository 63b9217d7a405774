#include "medosc/decompose.hpp"
#include "medosc/error.hpp"
#include "medosc/generators.hpp"
#include "medosc/util.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace medosc;

namespace {

GridFunction line(std::vector<double> v) {
    int depth = 0;
    while ((std::size_t{1} << depth) < v.size()) ++depth;
    return GridFunction(Grid{1, depth}, std::move(v));
}

// Integer-valued functions keep the reference's residual arithmetic exact.
GridFunction integer_function(int dim, int depth, std::uint64_t seed) {
    const Grid g{dim, depth};
    Rng rng(seed);
    std::vector<double> v(g.cell_count());
    for (auto& x : v) x = static_cast<double>(static_cast<int>(rng.below(9)) - 4);
    if (seed % 3 == 0) v[rng.below(v.size())] = 40.0;
    return GridFunction(g, v);
}

const OscParams kQuarterHalf{0.25, 0.5, 1.0};

}  // namespace

TEST_CASE("constant input gives an empty tree") {
    const auto f = generate("constant", 1, 3, 0, {.value = 5.0});
    for (Variant v : {Variant::V1, Variant::V2}) {
        const auto tree = v == Variant::V1 ? decompose_v1(f, f.grid().root(), kQuarterHalf)
                                           : decompose_v2(f, f.grid().root(), kQuarterHalf);
        CHECK(tree.generations.empty());
        CHECK(tree.root_median == 5.0);
        CHECK(tree.cube_count() == 0);
        const auto pw = verify_pointwise(tree, f, CubeClass::Aligned);
        CHECK(pw.ok());
        for (double x : pw.lhs) CHECK(x == 0.0);
        CHECK(verify_sparsity(tree).ok(v));
        CHECK(sparse_sets(tree).empty());
    }
}

TEST_CASE("spike selects the two-cell cube") {
    const auto f = line({0, 0, 0, 7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    for (CubeClass cls : {CubeClass::Aligned, CubeClass::Dyadic}) {
        const auto tree = decompose_v1(f, f.grid().root(), kQuarterHalf, cls);
        REQUIRE(tree.generations.size() >= 1);
        REQUIRE(tree.generations[0].cubes.size() == 1);
        const auto& q = tree.generations[0].cubes[0];
        CHECK(q.cube == DyadicCube{1, 3, {1, 0}});
        CHECK(q.alpha == 7.0);
        CHECK(q.cube != f.grid().root());
        CHECK(verify_pointwise(tree, f, cls).ok());
        const auto sp = verify_sparsity(tree);
        CHECK(sp.ok(Variant::V1));
        CHECK(sp.max_per_cube_ratio <= 0.5);
        // A single generation leaves F = Q.
        const auto sets = sparse_sets(tree);
        CHECK(sets.front().cells == cells_of(f.grid(), q.cube));
    }
    const auto t2 = decompose_v2(f, f.grid().root(), kQuarterHalf);
    REQUIRE(!t2.generations.empty());
    CHECK(t2.root_threshold == 0.0);
    CHECK(t2.generations[0].cubes[0].cube == DyadicCube{1, 3, {1, 0}});
}

TEST_CASE("half step halts immediately") {
    const auto f = line({1, 1, 1, 1, 0, 0, 0, 0});
    const auto tree = decompose_v1(f, f.grid().root(), kQuarterHalf);
    CHECK(tree.root_median == 1.0);
    CHECK(tree.root_threshold == 1.0);
    CHECK(tree.generations.empty());
}

TEST_CASE("decompositions match the recursive reference") {
    for (std::uint64_t seed = 1; seed <= 18; ++seed) {
        const int dim = seed % 2 ? 1 : 2;
        const auto f = integer_function(dim, dim == 1 ? 4 : 2, seed);
        for (const OscParams& p : {kQuarterHalf, OscParams{0.2, 0.6, 1.0}, OscParams{0.3, 0.65, 1.0}}) {
            for (CubeClass cls : {CubeClass::Aligned, CubeClass::Dyadic}) {
                const auto tree = decompose_v1(f, f.grid().root(), p, cls);
                const auto ref = oracle::reference_tree(f, p, Variant::V1, cls);
                const auto got = oracle::flatten(tree);
                REQUIRE(got.size() == ref.size());
                for (std::size_t i = 0; i < got.size(); ++i) {
                    CHECK(got[i].generation == ref[i].generation);
                    CHECK(got[i].cube == ref[i].cube);
                    CHECK(got[i].alpha == ref[i].alpha);
                }
            }
            const auto t2 = decompose_v2(f, f.grid().root(), p);
            const auto ref2 = oracle::reference_tree(f, p, Variant::V2, CubeClass::Dyadic);
            const auto got2 = oracle::flatten(t2);
            REQUIRE(got2.size() == ref2.size());
            for (std::size_t i = 0; i < got2.size(); ++i) {
                CHECK(got2[i].cube == ref2[i].cube);
                CHECK(got2[i].alpha == ref2[i].alpha);
            }
        }
    }
}

TEST_CASE("tree invariants on random inputs") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const int dim = seed % 3 == 0 ? 2 : 1;
        const auto f = generate(seed % 2 ? "random-heavy-tail" : "random-uniform", dim, dim == 1 ? 6 : 3, seed);
        for (Variant v : {Variant::V1, Variant::V2}) {
            const auto tree = v == Variant::V1 ? decompose_v1(f, f.grid().root(), kQuarterHalf)
                                               : decompose_v2(f, f.grid().root(), kQuarterHalf);
            // Stopping rule soundness: each cube exceeds the threshold that
            // selected it, and its parent does not.
            auto active_of = [&](int g, std::size_t parent_index) {
                struct A {
                    DyadicCube cube;
                    double median, threshold;
                };
                if (g == 1) return A{tree.root, tree.root_median, tree.root_threshold};
                const auto& c = tree.at(g - 1, parent_index);
                return A{c.cube, c.median, c.threshold};
            };
            for (std::size_t g = 0; g < tree.generations.size(); ++g) {
                for (const auto& c : tree.generations[g].cubes) {
                    const auto a = active_of(static_cast<int>(g + 1), c.parent_index);
                    CHECK(contains(a.cube, c.cube));
                    CHECK(c.cube != a.cube);
                    CHECK(c.median == median(f, kQuarterHalf.t, c.cube));
                    CHECK(c.alpha == c.median - a.median);
                    CHECK(std::abs(c.alpha) > c.threshold_used);
                    CHECK(c.threshold_used == a.threshold);
                    const auto up = parent(c.cube);
                    if (up != a.cube) CHECK(std::abs(median(f, kQuarterHalf.t, up) - a.median) <= a.threshold);
                }
            }
            CHECK(verify_pointwise(tree, f, CubeClass::Aligned).ok());
            CHECK(verify_sparsity(tree).ok(v));
            // Omega is nested.
            for (std::size_t g = 1; g < tree.generations.size(); ++g) {
                const auto outer = tree.omega(static_cast<int>(g));
                const auto inner = tree.omega(static_cast<int>(g + 1));
                CHECK(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
            }
            // Deterministic.
            const auto again = v == Variant::V1 ? decompose_v1(f, f.grid().root(), kQuarterHalf)
                                                : decompose_v2(f, f.grid().root(), kQuarterHalf);
            CHECK(oracle::flatten(again).size() == oracle::flatten(tree).size());
            CHECK(again.fingerprint == tree.fingerprint);
        }
    }
}

TEST_CASE("second decomposition can exceed the packing factor") {
    // Theorem 4.1 does not claim packing; this input shows it can fail.
    const auto f = line({5, 0, 5, 0, 5, 0, 0, 0});
    const auto tree = decompose_v2(f, f.grid().root(), kQuarterHalf);
    const auto sp = verify_sparsity(tree);
    CHECK(tree.omega(1).size() == 6);
    CHECK_FALSE(sp.per_cube);
    CHECK(sp.ok(Variant::V2));
    CHECK(verify_pointwise(tree, f, CubeClass::Aligned).ok());
}

TEST_CASE("sparse sets are disjoint and large") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto f = generate("random-heavy-tail", 1, 6, seed);
        const auto tree = decompose_v1(f, f.grid().root(), kQuarterHalf);
        std::set<std::size_t> seen;
        for (const auto& s : sparse_sets(tree)) {
            CHECK(2 * s.cells.size() >= cell_count(f.grid(), s.cube));
            for (auto c : s.cells) {
                CHECK(contains_cell(f.grid(), s.cube, c));
                CHECK(seen.insert(c).second);
            }
        }
    }
}

TEST_CASE("errors") {
    const auto f = generate("random-uniform", 1, 4, 1);
    CHECK_THROWS_AS(decompose_v1(f, f.grid().root(), OscParams{0.6, 0.5, 1.0}), Error);
    const auto tree = decompose_v1(f, f.grid().root(), kQuarterHalf);
    const auto other = generate("random-uniform", 1, 4, 2);
    try {
        verify_pointwise(tree, other, CubeClass::Aligned);
        FAIL("expected TreeFunctionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TreeFunctionMismatch);
    }
    const auto heavy = generate("random-heavy-tail", 1, 8, 3);
    try {
        decompose_v1(heavy, heavy.grid().root(), kQuarterHalf, CubeClass::Dyadic, 1);
        // Fine if the tree happens to be shallow.
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MaxGenerationsExceeded);
    }
    CHECK(parse_variant("v2") == Variant::V2);
    CHECK_THROWS_AS(parse_variant("v3"), Error);
}
