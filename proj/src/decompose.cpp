#include "medosc/decompose.hpp"

#include "medosc/error.hpp"
#include "medosc/util.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace medosc {

std::string_view to_string(Variant v) { return v == Variant::V1 ? "v1" : "v2"; }

Variant parse_variant(std::string_view name) {
    if (name == "v1") return Variant::V1;
    if (name == "v2") return Variant::V2;
    throw Error(ErrorCode::InvalidArgument, "variant must be 'v1' or 'v2', got '" + std::string(name) + "'");
}

std::size_t DecompositionTree::cube_count() const {
    std::size_t n = 0;
    for (const auto& g : generations) n += g.cubes.size();
    return n;
}

std::vector<std::size_t> DecompositionTree::omega(int v) const {
    if (v == 0) return cells_of(grid, root);
    if (v < 0 || v > static_cast<int>(generations.size())) return {};
    std::vector<std::size_t> out;
    for (const auto& c : generations[static_cast<std::size_t>(v - 1)].cubes) {
        const auto cells = cells_of(grid, c.cube);
        out.insert(out.end(), cells.begin(), cells.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<int, std::size_t>> DecompositionTree::chain(std::size_t cell) const {
    std::vector<std::pair<int, std::size_t>> out;
    for (std::size_t g = 0; g < generations.size(); ++g) {
        const auto& cubes = generations[g].cubes;
        for (std::size_t i = 0; i < cubes.size(); ++i) {
            if (contains_cell(grid, cubes[i].cube, cell)) {
                out.emplace_back(static_cast<int>(g + 1), i);
                break;
            }
        }
    }
    return out;
}

namespace {

struct Selection {
    DyadicCube cube;
    double alpha;
    double median;
};

struct ActiveResult {
    double threshold = 0.0;
    bool exceeds = false;  // |E| > 0
    std::vector<Selection> selected;
};

std::size_t first_cell(const Grid& grid, const DyadicCube& c) {
    const AlignedCube a = to_aligned(grid, c);
    return grid.flat(a.offset);
}

// One step of the stopping-time construction on the active cube `a` whose
// median is `m_a`: halts when no cell exceeds the threshold, otherwise picks
// the maximal dyadic subcubes where |m_f(t,Q) - m_a| exceeds it (strictly).
ActiveResult process_active(const GridFunction& f, const DyadicCube& a, double m_a, double threshold, double t) {
    ActiveResult r;
    r.threshold = threshold;
    const Grid& grid = f.grid();
    for (std::size_t cell : cells_of(grid, a)) {
        if (std::abs(f[cell] - m_a) > threshold) {
            r.exceeds = true;
            break;
        }
    }
    if (!r.exceeds) return r;

    std::vector<DyadicCube> stack;
    if (a.level < grid.depth) {
        auto ch = children(a);
        stack.assign(ch.rbegin(), ch.rend());
    }
    while (!stack.empty()) {
        const DyadicCube q = stack.back();
        stack.pop_back();
        const double mq = median(f, t, q);
        // Subtracting a constant is monotone under rounding, so this is the
        // median of f - m_a on q.
        const double alpha = mq - m_a;
        if (std::abs(alpha) > threshold) {
            r.selected.push_back({q, alpha, mq});
        } else if (q.level < grid.depth) {
            auto ch = children(q);
            stack.insert(stack.end(), ch.rbegin(), ch.rend());
        }
    }
    std::sort(r.selected.begin(), r.selected.end(), [&](const Selection& x, const Selection& y) {
        return first_cell(grid, x.cube) < first_cell(grid, y.cube);
    });
    return r;
}

using ThresholdFn = std::function<double(const DyadicCube&, double)>;

DecompositionTree run(const GridFunction& f, const DyadicCube& q0, const OscParams& p, int max_gen,
                      Variant variant, CubeClass cls, const ThresholdFn& threshold_of) {
    require_decomposition_params(p);
    if (max_gen < 1) throw Error(ErrorCode::InvalidArgument, "max_gen must be >= 1");
    const Grid& grid = f.grid();
    if (!grid.contains(q0)) throw Error(ErrorCode::InvalidArgument, "Q0 is not a cube of the grid");

    DecompositionTree tree;
    tree.variant = variant;
    tree.params = p;
    tree.cube_class = cls;
    tree.grid = grid;
    tree.root = q0;
    tree.fingerprint = f.fingerprint();
    tree.root_median = median(f, p.t, q0);

    const ActiveResult root = process_active(f, q0, tree.root_median, threshold_of(q0, tree.root_median), p.t);
    tree.root_threshold = root.threshold;

    std::vector<ActiveResult> pending{root};
    for (int v = 1;; ++v) {
        // Collect generation v from the results of generation v - 1.
        Generation gen;
        for (std::size_t j = 0; j < pending.size(); ++j) {
            const ActiveResult& r = pending[j];
            std::vector<std::size_t> kids;
            for (const auto& s : r.selected) {
                kids.push_back(gen.cubes.size());
                StoppedCube c;
                c.cube = s.cube;
                c.generation = v;
                c.parent_index = j;
                c.alpha = s.alpha;
                c.threshold_used = r.threshold;
                c.median = s.median;
                gen.omega_cells += cell_count(grid, s.cube);
                gen.cubes.push_back(std::move(c));
            }
            if (v == 1) {
                tree.root_continues = !kids.empty();
                tree.root_children = std::move(kids);
            } else {
                auto& parent = tree.generations[static_cast<std::size_t>(v - 2)].cubes[j];
                parent.continues = !kids.empty();
                parent.children = std::move(kids);
            }
        }
        if (gen.cubes.empty()) break;
        if (v > max_gen)
            throw Error(ErrorCode::MaxGenerationsExceeded,
                        "generation " + std::to_string(v) + " exceeds the cap of " + std::to_string(max_gen));

        std::vector<ActiveResult> next(gen.cubes.size());
        parallel_for(gen.cubes.size(), [&](std::size_t i) {
            const StoppedCube& c = gen.cubes[i];
            next[i] = process_active(f, c.cube, c.median, threshold_of(c.cube, c.median), p.t);
        });
        for (std::size_t i = 0; i < gen.cubes.size(); ++i) gen.cubes[i].threshold = next[i].threshold;
        tree.generations.push_back(std::move(gen));
        pending = std::move(next);
    }
    return tree;
}

}  // namespace

DecompositionTree decompose_v1(const GridFunction& f, const DyadicCube& q0, const OscParams& p, CubeClass cls,
                               int max_gen) {
    require_decomposition_params(p);
    const SharpMaxTable table(f, p.s, cls);
    return decompose_v1(table, f, q0, p, max_gen);
}

DecompositionTree decompose_v1(const SharpMaxTable& table, const GridFunction& f, const DyadicCube& q0,
                               const OscParams& p, int max_gen) {
    if (table.fingerprint() != f.fingerprint() || table.s() != p.s)
        throw Error(ErrorCode::TreeFunctionMismatch, "sharp maximal table was built for another function or s");
    return run(f, q0, p, max_gen, Variant::V1, table.cube_class(),
               [&](const DyadicCube& a, double) { return 2.0 * table.inf_over(a); });
}

DecompositionTree decompose_v2(const GridFunction& f, const DyadicCube& q0, const OscParams& p, int max_gen) {
    const double t = p.t;
    return run(f, q0, p, max_gen, Variant::V2, CubeClass::Dyadic, [&](const DyadicCube& a, double m_a) {
        return abs_median_of(gather(f, a), m_a, t);
    });
}

// ---------------------------------------------------------------------------
// Pointwise bound

namespace {

constexpr std::size_t kMaxReportedViolations = 16;

double ratio_of(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

PointwiseReport verify_pointwise(const DecompositionTree& tree, const GridFunction& f, CubeClass cls) {
    const SharpMaxTable table(f, tree.params.s, cls);
    return verify_pointwise(tree, f, table);
}

PointwiseReport verify_pointwise(const DecompositionTree& tree, const GridFunction& f, const SharpMaxTable& table) {
    if (tree.fingerprint != f.fingerprint() || !(tree.grid == f.grid()))
        throw Error(ErrorCode::TreeFunctionMismatch, "tree was built from a different function");
    if (table.fingerprint() != f.fingerprint() || table.s() != tree.params.s)
        throw Error(ErrorCode::TreeFunctionMismatch, "sharp maximal table does not match the tree");

    const Grid& grid = f.grid();
    const DyadicCube& q0 = tree.root;
    const double t = tree.params.t;
    const double n = static_cast<double>(grid.dim);
    const auto cells = cells_of(grid, q0);

    PointwiseReport rep;
    rep.lhs.resize(cells.size());
    rep.rhs.resize(cells.size());
    const auto& sharp = table.field(q0);
    const double lead = tree.variant == Variant::V1 ? 4.0 : 8.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        rep.lhs[i] = std::abs(f[cells[i]] - tree.root_median);
        rep.rhs[i] = lead * sharp[i];
    }

    for (const auto& gen : tree.generations) {
        std::vector<double> terms(gen.cubes.size());
        parallel_for(gen.cubes.size(), [&](std::size_t i) {
            const DyadicCube& q = gen.cubes[i].cube;
            const DyadicCube hat = parent(q);
            if (tree.variant == Variant::V1) {
                terms[i] = 10.0 * n * table.inf_over(q, hat) + 2.0 * table.inf_over(q);
            } else {
                terms[i] = median_oscillation(f, hat, t, parent_level(t, grid.dim)) + median_oscillation(f, q, t, t);
            }
        });
        for (std::size_t i = 0; i < gen.cubes.size(); ++i)
            for (std::size_t cell : cells_of(grid, gen.cubes[i].cube)) rep.rhs[local_index(grid, q0, cell)] += terms[i];
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double r = ratio_of(rep.lhs[i], rep.rhs[i]);
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.argmax_cell = cells[i];
        }
        if (rep.lhs[i] > rep.rhs[i] * (1.0 + kPointwiseRelTol)) {
            ++rep.violation_count;
            if (rep.violations.size() < kMaxReportedViolations) {
                PointwiseViolation v{cells[i], rep.lhs[i], rep.rhs[i], {}};
                for (auto [g, j] : tree.chain(cells[i])) v.chain.push_back(tree.at(g, j).cube);
                rep.violations.push_back(std::move(v));
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sparsity

namespace {

// Packing comparisons are made in cell counts against s/(1-t); the slack only
// absorbs the binary representation of decimal parameters such as 0.3.
constexpr double kPackingRelTol = 1e-12;

bool within(double count, double bound) { return count <= bound * (1.0 + kPackingRelTol); }

}  // namespace

SparsityReport verify_sparsity(const DecompositionTree& tree) {
    SparsityReport rep;
    const Grid& grid = tree.grid;
    const double factor = packing_factor(tree.params);
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    // owner[cell] = index of the generation-v cube holding the cell.
    std::vector<std::size_t> prev(grid.cell_count(), kNone);
    for (std::size_t cell : cells_of(grid, tree.root)) prev[cell] = 0;
    std::vector<double> prev_sizes{static_cast<double>(cell_count(grid, tree.root))};
    const double root_cells = prev_sizes[0];
    double geometric_bound = root_cells;

    for (std::size_t g = 0; g < tree.generations.size(); ++g) {
        const int v = static_cast<int>(g + 1);
        const auto& cubes = tree.generations[g].cubes;
        std::vector<std::size_t> cur(grid.cell_count(), kNone);
        std::vector<double> inside(prev_sizes.size(), 0.0);
        std::size_t omega = 0;
        for (std::size_t i = 0; i < cubes.size(); ++i) {
            for (std::size_t cell : cells_of(grid, cubes[i].cube)) {
                if (cur[cell] != kNone && rep.nonoverlap) {
                    rep.nonoverlap = false;
                    rep.failures.push_back("generation " + std::to_string(v) + ": cubes overlap at cell " +
                                           std::to_string(cell));
                }
                cur[cell] = i;
                ++omega;
                if (prev[cell] == kNone) {
                    if (rep.nested) {
                        rep.nested = false;
                        rep.failures.push_back("generation " + std::to_string(v) + ": cell " + std::to_string(cell) +
                                               " is outside Omega^" + std::to_string(v - 1));
                    }
                } else {
                    inside[prev[cell]] += 1.0;
                }
            }
        }
        for (std::size_t j = 0; j < inside.size(); ++j) {
            rep.max_per_cube_ratio = std::max(rep.max_per_cube_ratio, inside[j] / prev_sizes[j]);
            if (!within(inside[j], factor * prev_sizes[j])) {
                rep.per_cube = false;
                rep.failures.push_back("generation " + std::to_string(v - 1) + " cube " + std::to_string(j) + ": " +
                                       std::to_string(static_cast<std::size_t>(inside[j])) + " of " +
                                       std::to_string(static_cast<std::size_t>(prev_sizes[j])) +
                                       " cells lie in the next generation");
            }
        }
        if (v == 1 && !within(static_cast<double>(omega), factor * root_cells)) {
            rep.first_packing = false;
            rep.failures.push_back("sum of generation-1 cubes exceeds the packing bound");
        }
        geometric_bound *= factor;
        if (!within(static_cast<double>(omega), geometric_bound)) {
            rep.geometric_packing = false;
            rep.failures.push_back("|Omega^" + std::to_string(v) + "| exceeds the geometric packing bound");
        }
        prev = std::move(cur);
        prev_sizes.assign(cubes.size(), 0.0);
        for (std::size_t i = 0; i < cubes.size(); ++i)
            prev_sizes[i] = static_cast<double>(cell_count(grid, cubes[i].cube));
    }
    return rep;
}

std::vector<SparseSet> sparse_sets(const DecompositionTree& tree) {
    std::vector<SparseSet> out;
    const Grid& grid = tree.grid;
    for (std::size_t g = 0; g < tree.generations.size(); ++g) {
        const auto& cubes = tree.generations[g].cubes;
        std::vector<char> next_omega(grid.cell_count(), 0);
        if (g + 1 < tree.generations.size())
            for (const auto& c : tree.generations[g + 1].cubes)
                for (std::size_t cell : cells_of(grid, c.cube)) next_omega[cell] = 1;
        for (std::size_t i = 0; i < cubes.size(); ++i) {
            SparseSet s{static_cast<int>(g + 1), i, cubes[i].cube, {}};
            for (std::size_t cell : cells_of(grid, cubes[i].cube))
                if (!next_omega[cell]) s.cells.push_back(cell);
            std::sort(s.cells.begin(), s.cells.end());
            out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace medosc
