#include "medosc/grid.hpp"

#include "medosc/error.hpp"
#include "medosc/util.hpp"

#include <cmath>
#include <string>

namespace medosc {

namespace {

constexpr int kMaxCellBits = 20;

void require_same_dim(const DyadicCube& a, const DyadicCube& b) {
    if (a.dim != b.dim) throw Error(ErrorCode::InvalidArgument, "cube dimensions differ");
}

}  // namespace

double Grid::cell_width() const { return side / static_cast<double>(cells_per_axis()); }

double Grid::cell_measure() const {
    const double w = cell_width();
    return dim == 1 ? w : w * w;
}

Index2 Grid::coords(std::size_t cell) const {
    if (dim == 1) return {static_cast<std::uint32_t>(cell), 0};
    return {static_cast<std::uint32_t>(cell >> depth),
            static_cast<std::uint32_t>(cell & (cells_per_axis() - 1))};
}

std::size_t Grid::flat(Index2 c) const {
    if (dim == 1) return c[0];
    return (static_cast<std::size_t>(c[0]) << depth) | c[1];
}

double Grid::midpoint(std::size_t cell, int axis) const {
    const Index2 c = coords(cell);
    return origin[axis] + (static_cast<double>(c[axis]) + 0.5) * cell_width();
}

bool Grid::contains(const DyadicCube& c) const {
    if (c.dim != dim || c.level < 0 || c.level > depth) return false;
    const std::uint32_t n = std::uint32_t{1} << c.level;
    for (int a = 0; a < dim; ++a)
        if (c.index[a] >= n) return false;
    for (int a = dim; a < 2; ++a)
        if (c.index[a] != 0) return false;
    return true;
}

bool Grid::contains(const AlignedCube& c) const {
    if (c.dim != dim || c.side == 0) return false;
    for (int a = 0; a < dim; ++a)
        if (std::uint64_t{c.offset[a]} + c.side > cells_per_axis()) return false;
    return true;
}

double Grid::measure(const DyadicCube& c) const {
    return static_cast<double>(medosc::cell_count(*this, c)) * cell_measure();
}

void validate(const Grid& grid) {
    if (grid.dim != 1 && grid.dim != 2)
        throw Error(ErrorCode::InvalidArgument, "dimension must be 1 or 2");
    if (grid.depth < 1 || grid.dim * grid.depth > kMaxCellBits)
        throw Error(ErrorCode::InvalidArgument,
                    "depth must satisfy 1 <= depth and dim*depth <= " + std::to_string(kMaxCellBits));
    if (!(grid.side > 0.0) || !std::isfinite(grid.side))
        throw Error(ErrorCode::InvalidArgument, "side length must be positive and finite");
    for (double o : grid.origin)
        if (!std::isfinite(o)) throw Error(ErrorCode::InvalidArgument, "origin must be finite");
}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    validate(grid_);
    if (values_.size() != grid_.cell_count())
        throw Error(ErrorCode::InvalidArgument,
                    "expected " + std::to_string(grid_.cell_count()) + " values, got " +
                        std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "values must be finite");
}

GridFunction GridFunction::with_values(std::vector<double> values) const {
    return GridFunction(grid_, std::move(values));
}

std::uint64_t GridFunction::fingerprint() const {
    std::uint64_t h = fnv1a(std::as_bytes(std::span(values_)));
    const std::array<double, 3> geo{grid_.origin[0], grid_.origin[1], grid_.side};
    h = fnv1a(std::as_bytes(std::span(geo)), h);
    const std::array<int, 2> shape{grid_.dim, grid_.depth};
    return fnv1a(std::as_bytes(std::span(shape)), h);
}

Weight::Weight(GridFunction w) : w_(std::move(w)) {
    for (double v : w_.values())
        if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be strictly positive");
}

DyadicCube parent(const DyadicCube& c) {
    if (c.level <= 0) throw Error(ErrorCode::RootHasNoParent, "level-0 cube has no parent");
    return DyadicCube{c.dim, c.level - 1, {c.index[0] >> 1, c.index[1] >> 1}};
}

DyadicCube ancestor(const DyadicCube& c, int tau) {
    if (tau < 0) throw Error(ErrorCode::InvalidArgument, "ancestor generation must be >= 0");
    if (c.level < tau)
        throw Error(ErrorCode::AncestorOutOfRange,
                    "level " + std::to_string(c.level) + " cube has no generation-" +
                        std::to_string(tau) + " ancestor");
    return DyadicCube{c.dim, c.level - tau, {c.index[0] >> tau, c.index[1] >> tau}};
}

std::vector<DyadicCube> children(const DyadicCube& c) {
    std::vector<DyadicCube> out;
    const int k = c.level + 1;
    if (c.dim == 1) {
        out.push_back({1, k, {2 * c.index[0], 0}});
        out.push_back({1, k, {2 * c.index[0] + 1, 0}});
    } else {
        for (std::uint32_t a = 0; a < 2; ++a)
            for (std::uint32_t b = 0; b < 2; ++b)
                out.push_back({2, k, {2 * c.index[0] + a, 2 * c.index[1] + b}});
    }
    return out;
}

DyadicCube cube_containing(const Grid& grid, std::size_t cell, int level) {
    const Index2 c = grid.coords(cell);
    const int shift = grid.depth - level;
    return DyadicCube{grid.dim, level, {c[0] >> shift, grid.dim == 2 ? c[1] >> shift : 0}};
}

bool contains(const DyadicCube& outer, const DyadicCube& inner) {
    require_same_dim(outer, inner);
    if (inner.level < outer.level) return false;
    const int shift = inner.level - outer.level;
    return (inner.index[0] >> shift) == outer.index[0] && (inner.index[1] >> shift) == outer.index[1];
}

bool contains(const AlignedCube& outer, const AlignedCube& inner) {
    for (int a = 0; a < outer.dim; ++a) {
        if (inner.offset[a] < outer.offset[a]) return false;
        if (inner.offset[a] + inner.side > outer.offset[a] + outer.side) return false;
    }
    return true;
}

bool contains_cell(const Grid& grid, const AlignedCube& cube, std::size_t cell) {
    const Index2 c = grid.coords(cell);
    for (int a = 0; a < grid.dim; ++a)
        if (c[a] < cube.offset[a] || c[a] >= cube.offset[a] + cube.side) return false;
    return true;
}

bool contains_cell(const Grid& grid, const DyadicCube& cube, std::size_t cell) {
    return cube_containing(grid, cell, cube.level) == cube;
}

AlignedCube to_aligned(const Grid& grid, const DyadicCube& c) {
    const int shift = grid.depth - c.level;
    AlignedCube out;
    out.dim = c.dim;
    out.side = std::uint32_t{1} << shift;
    out.offset = {c.index[0] << shift, c.dim == 2 ? c.index[1] << shift : 0};
    return out;
}

std::size_t cell_count(const Grid& grid, const DyadicCube& c) {
    return std::size_t{1} << (grid.dim * (grid.depth - c.level));
}

std::size_t cell_count(const AlignedCube& c) {
    return c.dim == 1 ? c.side : std::size_t{c.side} * c.side;
}

std::vector<std::size_t> cells_of(const Grid& grid, const AlignedCube& c) {
    std::vector<std::size_t> out;
    out.reserve(cell_count(c));
    if (grid.dim == 1) {
        for (std::uint32_t i = 0; i < c.side; ++i) out.push_back(c.offset[0] + i);
    } else {
        for (std::uint32_t i = 0; i < c.side; ++i)
            for (std::uint32_t j = 0; j < c.side; ++j)
                out.push_back(grid.flat({c.offset[0] + i, c.offset[1] + j}));
    }
    return out;
}

std::vector<std::size_t> cells_of(const Grid& grid, const DyadicCube& c) {
    return cells_of(grid, to_aligned(grid, c));
}

std::vector<double> gather(const GridFunction& f, const AlignedCube& c) {
    const auto& g = f.grid();
    std::vector<double> out;
    out.reserve(cell_count(c));
    if (g.dim == 1) {
        const auto vals = f.values().subspan(c.offset[0], c.side);
        out.assign(vals.begin(), vals.end());
    } else {
        for (std::uint32_t i = 0; i < c.side; ++i) {
            const auto row = f.values().subspan(g.flat({c.offset[0] + i, c.offset[1]}), c.side);
            out.insert(out.end(), row.begin(), row.end());
        }
    }
    return out;
}

std::vector<double> gather(const GridFunction& f, const DyadicCube& c) {
    return gather(f, to_aligned(f.grid(), c));
}

std::size_t dyadic_slot(const DyadicCube& c) {
    // Levels 0..k-1 hold (2^{nk} - 1) / (2^n - 1) cubes.
    const std::size_t per = std::size_t{1} << c.dim;
    const std::size_t before = ((std::size_t{1} << (c.dim * c.level)) - 1) / (per - 1);
    const std::size_t within =
        c.dim == 1 ? c.index[0] : (static_cast<std::size_t>(c.index[0]) << c.level) | c.index[1];
    return before + within;
}

std::size_t dyadic_slot_count(const Grid& grid) {
    const std::size_t per = std::size_t{1} << grid.dim;
    return ((std::size_t{1} << (grid.dim * (grid.depth + 1))) - 1) / (per - 1);
}

std::vector<DyadicCube> dyadic_descendants(const Grid& grid, const DyadicCube& root) {
    std::vector<DyadicCube> out;
    for (int k = root.level; k <= grid.depth; ++k) {
        const int shift = k - root.level;
        const std::uint32_t n = std::uint32_t{1} << shift;
        const std::uint32_t n1 = grid.dim == 2 ? n : 1;
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < n1; ++j)
                out.push_back(DyadicCube{grid.dim, k,
                                         {(root.index[0] << shift) + i,
                                          grid.dim == 2 ? (root.index[1] << shift) + j : 0}});
    }
    return out;
}

std::vector<DyadicCube> all_dyadic_cubes(const Grid& grid) { return dyadic_descendants(grid, grid.root()); }

DyadicSums::DyadicSums(const Grid& grid, std::span<const double> cell_values)
    : grid_(grid), cell_measure_(grid.cell_measure()), sums_(dyadic_slot_count(grid)) {
    if (cell_values.size() != grid.cell_count())
        throw Error(ErrorCode::InvalidArgument, "cell value count does not match grid");
    const int L = grid.depth;
    for (std::size_t cell = 0; cell < cell_values.size(); ++cell)
        sums_[dyadic_slot(cube_containing(grid, cell, L))] = cell_values[cell];
    for (int k = L - 1; k >= 0; --k) {
        const std::uint32_t n = std::uint32_t{1} << k;
        const std::uint32_t n1 = grid.dim == 2 ? n : 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = 0; j < n1; ++j) {
                const DyadicCube c{grid.dim, k, {i, grid.dim == 2 ? j : 0}};
                const auto ch = children(c);
                double s;
                if (grid.dim == 1) {
                    s = sums_[dyadic_slot(ch[0])] + sums_[dyadic_slot(ch[1])];
                } else {
                    s = (sums_[dyadic_slot(ch[0])] + sums_[dyadic_slot(ch[1])]) +
                        (sums_[dyadic_slot(ch[2])] + sums_[dyadic_slot(ch[3])]);
                }
                sums_[dyadic_slot(c)] = s;
            }
        }
    }
}

double DyadicSums::average(const DyadicCube& c) const {
    return sum(c) / static_cast<double>(cell_count(grid_, c));
}

double integrate(const Grid& grid, std::span<const double> cell_values) {
    return DyadicSums(grid, cell_values).integral(grid.root());
}

GridFunction refine(const GridFunction& f) {
    Grid fine = f.grid();
    fine.depth += 1;
    validate(fine);
    std::vector<double> values(fine.cell_count());
    for (std::size_t cell = 0; cell < values.size(); ++cell) {
        const Index2 c = fine.coords(cell);
        values[cell] = f[f.grid().flat({c[0] >> 1, c[1] >> 1})];
    }
    return GridFunction(fine, std::move(values));
}

}  // namespace medosc
