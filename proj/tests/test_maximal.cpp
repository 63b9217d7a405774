#include "medosc/error.hpp"
#include "medosc/generators.hpp"
#include "medosc/maximal.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace medosc;

namespace {

// Values rounded to multiples of 1/64, so half-widths and midpoints are exact
// and the brute-force sweep can be compared with ==.
GridFunction quantized(const GridFunction& f) {
    std::vector<double> v(f.values().begin(), f.values().end());
    for (auto& x : v) x = std::round(x * 64.0) / 64.0;
    return GridFunction(f.grid(), v);
}

// Small grids where the brute-force enumeration stays cheap.
std::vector<GridFunction> samples() {
    std::vector<GridFunction> out;
    out.push_back(quantized(generate("random-uniform", 1, 4, 1)));
    out.push_back(quantized(generate("random-heavy-tail", 1, 5, 2)));
    out.push_back(generate("spike", 1, 4, 3));
    out.push_back(quantized(generate("random-uniform", 2, 2, 4)));
    out.push_back(generate("step", 2, 3, 5));
    return out;
}

}  // namespace

TEST_CASE("sharp maximal fields match direct enumeration") {
    for (const auto& f : samples()) {
        for (CubeClass cls : {CubeClass::Aligned, CubeClass::Dyadic}) {
            const SharpMaxTable table(f, 0.3, cls);
            for (const auto& d : all_dyadic_cubes(f.grid())) {
                if (d.level > 2) continue;
                const auto& field = table.field(d);
                const auto cells = cells_of(f.grid(), d);
                REQUIRE(field.size() == cells.size());
                double lo = INFINITY;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    CHECK(field[i] == oracle::sharp_max(f, cells[i], d, 0.3, cls));
                    CHECK(table.at(cells[i], d) == field[i]);
                    lo = std::min(lo, field[i]);
                }
                CHECK(table.inf_over(d) == lo);
            }
        }
    }
}

TEST_CASE("inf_over a subcube of the domain") {
    const auto f = quantized(generate("random-uniform", 1, 4, 8));
    const SharpMaxTable table(f, 0.25, CubeClass::Aligned);
    const DyadicCube dom{1, 1, {1, 0}}, where{1, 3, {6, 0}};
    double lo = INFINITY;
    for (auto c : cells_of(f.grid(), where)) lo = std::min(lo, oracle::sharp_max(f, c, dom, 0.25, CubeClass::Aligned));
    CHECK(table.inf_over(where, dom) == lo);
}

TEST_CASE("bulk maximal fields match single-point forms") {
    for (const auto& f : samples()) {
        for (CubeClass cls : {CubeClass::Aligned, CubeClass::Dyadic}) {
            const auto root = f.grid().root();
            const auto cells = cells_of(f.grid(), root);
            const auto hl = hl_max_field(f, cls, root);
            const auto ms = mean_sharp_field(f, cls, root);
            for (std::size_t i = 0; i < cells.size(); ++i) {
                CHECK(hl[i] == doctest::Approx(oracle::hl_max(f, cells[i], root, cls)).epsilon(1e-12));
                CHECK(ms[i] == doctest::Approx(oracle::mean_sharp(f, cells[i], root, cls)).epsilon(1e-12));
            }
        }
        const auto root = f.grid().root();
        const auto mm = median_max_field(f, 0.5, root);
        const auto cells = cells_of(f.grid(), root);
        for (std::size_t i = 0; i < cells.size(); ++i)
            CHECK(mm[i] == median_max_dyadic(f, cells[i], 0.5, root));
    }
}

TEST_CASE("sup_inf_field by enumeration") {
    const auto f = generate("random-uniform", 1, 4, 12);
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::abs(f[i]);
    for (CubeClass cls : {CubeClass::Aligned, CubeClass::Dyadic}) {
        const auto si = sup_inf_field(f.grid(), g, cls, f.grid().root());
        for (std::size_t cell = 0; cell < g.size(); ++cell) {
            double best = 0.0;
            for (const auto& c : oracle::cubes_in(f.grid(), f.grid().root(), cls)) {
                if (!contains_cell(f.grid(), c, cell)) continue;
                double lo = INFINITY;
                for (auto y : cells_of(f.grid(), c)) lo = std::min(lo, g[y]);
                best = std::max(best, lo);
            }
            CHECK(si[cell] == best);
        }
    }
}

TEST_CASE("local_index and to_grid_order") {
    const Grid g{2, 3};
    const DyadicCube d{2, 1, {1, 0}};
    const auto cells = cells_of(g, d);
    std::vector<double> local(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(local_index(g, d, cells[i]) == i);
        local[i] = static_cast<double>(i) + 1.0;
    }
    const auto full = to_grid_order(g, d, local, -1.0);
    for (std::size_t cell = 0; cell < g.cell_count(); ++cell)
        CHECK(full[cell] == (contains_cell(g, d, cell) ? local[local_index(g, d, cell)] : -1.0));
}
