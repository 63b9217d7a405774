#include "medosc/error.hpp"
#include "medosc/harness.hpp"

#include <doctest.h>

using namespace medosc;

namespace {

const OscParams kQuarterHalf{0.25, 0.5, 1.0};

}  // namespace

TEST_CASE("safe_ratio") {
    CHECK(safe_ratio(0.0, 0.0) == 0.0);
    CHECK(std::isinf(safe_ratio(1.0, 0.0)));
    CHECK(safe_ratio(1.0, 4.0) == 0.25);
}

TEST_CASE("corpora are deterministic and cover the requested shapes") {
    const auto spec = corpus_preset("thm1", 3);
    const auto a = build_corpus(spec), b = build_corpus(spec);
    REQUIRE(a.size() == 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].f.fingerprint() == b[i].f.fingerprint());
        CHECK(a[i].f.depth() <= (a[i].f.dim() == 1 ? spec.max_depth_1d : spec.max_depth_2d));
    }
    for (const auto& name : corpus_presets()) CHECK_NOTHROW(corpus_preset(name));
    CHECK_THROWS_AS(corpus_preset("nope"), Error);
}

TEST_CASE("decomposition check on the spike corpus") {
    CheckConfig cfg;
    cfg.corpus = corpus_preset("spike");
    const auto rep = run_check("thm1.1", cfg);
    CHECK(rep.passed());
    CHECK(rep.instances.size() == 20);
    CHECK(rep.constants["max_per_cube_packing"].get<double>() <= 0.5);
    CHECK(run_check("thm4.1", cfg).passed());
}

TEST_CASE("decomposition check with a shared table") {
    const auto f = generate("random-heavy-tail", 1, 5, 8);
    const SharpMaxTable table(f, 0.25, CubeClass::Aligned);
    for (Variant v : {Variant::V1, Variant::V2}) {
        const auto a = check_decomposition(f, f.grid().root(), kQuarterHalf, CubeClass::Aligned, v);
        const auto b = check_decomposition(table, f, f.grid().root(), kQuarterHalf, v);
        CHECK(a.to_json(true) == b.to_json(true));
    }
    CHECK_THROWS_AS(check_decomposition(table, f, f.grid().root(), {0.2, 0.6, 1.0}, Variant::V1), Error);
    const auto g = generate("random-uniform", 1, 5, 8);
    CHECK_THROWS_AS(check_decomposition(table, g, g.grid().root(), kQuarterHalf, Variant::V1), Error);
}

TEST_CASE("cell-aligned M# misses a 2D spike once s exceeds a quarter") {
    // A single cell is a quarter of its parent, so for s = 0.3 no cell-aligned
    // cube sees it while the median chain still selects it.
    std::vector<double> v(16, 0.0);
    v[5] = 3.0;
    const GridFunction f(Grid{2, 2}, v);
    const auto rep = check_decomposition(f, f.grid().root(), {0.3, 0.65, 1.0}, CubeClass::Aligned, Variant::V1);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0]["cell"] == 5);
    CHECK(rep.violations[0]["rhs"] == 0.0);
    // Half-cell offsets on the refined grid recover it.
    const auto fine = refine(f);
    CHECK(check_decomposition(fine, fine.grid().root(), {0.3, 0.65, 1.0}, CubeClass::Aligned, Variant::V1).passed());
    // At s = 1/4 the strict count already keeps the spike visible.
    CHECK(check_decomposition(f, f.grid().root(), kQuarterHalf, CubeClass::Aligned, Variant::V1).passed());
}

TEST_CASE("Theorem 2.1 check") {
    const auto c = generate("constant", 1, 4, 0, {.value = 2.0});
    const Weight unit = generate_weight("unit", c.grid(), 0);
    const auto rep = check_thm21(c, unit, kQuarterHalf, c.grid().root(), CubeClass::Aligned);
    CHECK(rep.instances.front().lhs == 0.0);
    CHECK(rep.instances.front().ratio == 0.0);
    CHECK(rep.passed());

    for (double delta : {0.5, 1.0}) {
        const auto f = generate("spike", 1, 5, 4);
        const Weight w = generate_weight("power", f.grid(), 4);
        const auto r = check_thm21(f, w, {0.25, 0.5, delta}, f.grid().root(), CubeClass::Aligned);
        CHECK(r.passed());
        CHECK(std::isfinite(r.max_ratio));
        CHECK(r.instances.front().detail["sparse_disjoint"].get<bool>());
    }
}

TEST_CASE("Theorem 3.1 checks") {
    const auto zero = generate("constant", 1, 5, 0);
    const auto rz = check_thm31_hilbert(zero, 0.5, zero.grid().root(), CubeClass::Aligned);
    CHECK(rz.max_ratio == 0.0);
    CHECK(rz.passed());

    const auto step = generate("step", 1, 7, 0, {.amplitude = 1.0, .jump = 0.5});
    const auto rs = check_thm31_hilbert(step, 0.5, step.grid().root(), CubeClass::Aligned);
    CHECK(rs.passed());
    CHECK(std::isfinite(rs.max_ratio));
    CHECK(rs.max_ratio > 0.0);

    const auto f = generate("random-uniform", 1, 7, 2);
    const auto rh = check_thm31_haar(martingale_transform(f.grid(), 1.0, 9), f, 0.5, f.grid().root());
    CHECK(rh.passed());
    CHECK(std::isfinite(rh.max_ratio));
}

TEST_CASE("Lemma 5.1 check") {
    const Grid g{1, 6};
    const auto c = generate("constant", 1, 6, 0, {.value = 1.0});
    const auto rc = check_lemma51(random_haar_shift(1, 1.0, 1, g), c, g.root(), 0.5);
    CHECK(rc.max_ratio == 0.0);

    // Martingale transform of a Haar atom returns the atom. At s = 1/2 the
    // best constant is the atom height on Q* and half of it on the parent,
    // matching the averages of |f| there, so the ratio is 1 up to the rounding
    // of the analysis/synthesis round trip.
    const DyadicCube star{1, 3, {2, 0}};
    const auto atom = haar_function(g, star);
    const auto ra = check_lemma51(martingale_transform(g, 1.0), atom, g.root(), 0.5);
    CHECK(ra.constants["C_5.1"].get<double>() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ra.passed());

    const auto f = generate("random-coarse", 1, 8, 3);
    const auto rr = check_lemma51(random_haar_shift(2, 1.0, 3, f.grid()), f, f.grid().root(), 0.25);
    CHECK(rr.passed());
    CHECK(rr.instances.front().detail["cubes_skipped"].get<int>() == 3);
}

TEST_CASE("Haar-shift substitution chain") {
    const Grid g{1, 6};
    const auto c = generate("constant", 1, 6, 0, {.value = 1.0});
    const auto rc = check_shift_chain(c, kQuarterHalf, random_haar_shift(1, 1.0, 2, g), g.root());
    CHECK(rc.max_ratio == 0.0);
    CHECK(rc.passed());

    const auto atom = haar_function(g, {1, 2, {1, 0}});
    CHECK(check_shift_chain(atom, kQuarterHalf, martingale_transform(g, 1.0), g.root()).passed());

    const auto f = generate("random-uniform", 1, 7, 5);
    CHECK(check_shift_chain(f, kQuarterHalf, random_haar_shift(1, 1.0, 5, f.grid()), g.root()).passed());
}

TEST_CASE("property suite") {
    auto spec = corpus_preset("mixed");
    spec.count = 40;
    const auto rep = property_suite(build_corpus(spec), kQuarterHalf, CubeClass::Aligned);
    CHECK(rep.passed());
    const auto& totals = rep.constants["totals"];
    for (const auto& name : property_names()) {
        CHECK(totals.contains(name));
        CHECK(totals[name]["checked"].get<std::size_t>() > 0);
    }
    const auto f = generate("random-uniform", 1, 4, 2);
    CHECK_THROWS_AS(run_properties(f, kQuarterHalf, CubeClass::Aligned, {"9.9"}), Error);
    const auto only = run_properties(f, kQuarterHalf, CubeClass::Aligned, {"4.4"});
    REQUIRE(only.size() == 1);
    CHECK(only[0].name == "4.4");
}

TEST_CASE("runners and sweeps") {
    CheckConfig cfg;
    cfg.corpus = corpus_preset("random");
    cfg.corpus.count = 6;
    try {
        run_check("thm9", cfg);
        FAIL("expected UnknownCheck");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownCheck);
    }
    const auto a = run_check("thm1.1", cfg).to_json(true).dump();
    const auto b = run_check("thm1.1", cfg).to_json(true).dump();
    CHECK(a == b);

    ParamGrid grid;
    grid.s = {0.2, 0.25};
    grid.t = {0.5, 0.78};  // (0.25, 0.78) is invalid and skipped
    const auto sweep = constant_sweep("thm1.1", grid, cfg);
    CHECK(sweep.rows.size() == 3 * 6);
    CHECK(sweep.report.notes.size() == 1);
    const auto csv = sweep_to_csv(sweep);
    CHECK(csv.rfind("check,s,t,delta,tau,depth,instance,lhs,rhs,ratio\n", 0) == 0);
}
