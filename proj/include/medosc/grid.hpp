#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace medosc {

using Index2 = std::array<std::uint32_t, 2>;

/// A node of the dyadic tree D(Q0): level k and per-axis index in [0, 2^k).
/// Unused axes (dim = 1) keep index 0.
struct DyadicCube {
    int dim = 1;
    int level = 0;
    Index2 index{0, 0};

    friend bool operator==(const DyadicCube&, const DyadicCube&) = default;
    friend auto operator<=>(const DyadicCube&, const DyadicCube&) = default;
};

/// A cube made of whole cells: per-axis cell offset and a common side in cells.
struct AlignedCube {
    int dim = 1;
    Index2 offset{0, 0};
    std::uint32_t side = 1;

    friend bool operator==(const AlignedCube&, const AlignedCube&) = default;
};

/// Geometry of an L-level dyadic grid on the cube origin + [0, side)^n.
/// Cells are stored row-major, first axis slowest.
struct Grid {
    int dim = 1;
    int depth = 1;
    std::array<double, 2> origin{0.0, 0.0};
    double side = 1.0;

    std::uint32_t cells_per_axis() const { return std::uint32_t{1} << depth; }
    std::size_t cell_count() const { return std::size_t{1} << (dim * depth); }
    double cell_width() const;
    double cell_measure() const;

    Index2 coords(std::size_t cell) const;
    std::size_t flat(Index2 coords) const;
    double midpoint(std::size_t cell, int axis) const;

    DyadicCube root() const { return DyadicCube{dim, 0, {0, 0}}; }
    bool contains(const DyadicCube& c) const;
    bool contains(const AlignedCube& c) const;
    double measure(const DyadicCube& c) const;

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws InvalidArgument unless dim in {1,2}, depth >= 1, side > 0 and the
/// cell count stays addressable.
void validate(const Grid& grid);

/// Real-valued function constant on each cell of a Grid.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    int dim() const { return grid_.dim; }
    int depth() const { return grid_.depth; }
    std::size_t size() const { return values_.size(); }
    double cell_measure() const { return grid_.cell_measure(); }

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t cell) const { return values_[cell]; }

    // Same geometry, new values (validated).
    GridFunction with_values(std::vector<double> values) const;

    // Content hash over geometry and value bits.
    std::uint64_t fingerprint() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Positive grid function used as an integration density.
class Weight {
public:
    explicit Weight(GridFunction w);
    const GridFunction& function() const { return w_; }

private:
    GridFunction w_;
};

DyadicCube parent(const DyadicCube& c);
DyadicCube ancestor(const DyadicCube& c, int tau);
std::vector<DyadicCube> children(const DyadicCube& c);

/// The dyadic cube at `level` containing `cell`.
DyadicCube cube_containing(const Grid& grid, std::size_t cell, int level);

/// True when `inner` is `outer` or one of its descendants.
bool contains(const DyadicCube& outer, const DyadicCube& inner);
bool contains(const AlignedCube& outer, const AlignedCube& inner);
bool contains_cell(const Grid& grid, const AlignedCube& cube, std::size_t cell);
bool contains_cell(const Grid& grid, const DyadicCube& cube, std::size_t cell);

AlignedCube to_aligned(const Grid& grid, const DyadicCube& c);

/// Number of cells of the cube.
std::size_t cell_count(const Grid& grid, const DyadicCube& c);
std::size_t cell_count(const AlignedCube& c);

/// Flat cell indices of the cube, row-major within the cube.
std::vector<std::size_t> cells_of(const Grid& grid, const DyadicCube& c);
std::vector<std::size_t> cells_of(const Grid& grid, const AlignedCube& c);

/// Values of f on the cube, in cells_of order.
std::vector<double> gather(const GridFunction& f, const DyadicCube& c);
std::vector<double> gather(const GridFunction& f, const AlignedCube& c);

/// All dyadic cubes of the grid at levels [0, depth], coarse to fine, each
/// level in row-major index order.
std::vector<DyadicCube> all_dyadic_cubes(const Grid& grid);

/// Descendants of `root` (including root) in the same order.
std::vector<DyadicCube> dyadic_descendants(const Grid& grid, const DyadicCube& root);

/// Dense slot of a dyadic cube in level-major order: levels 0..k-1 first.
std::size_t dyadic_slot(const DyadicCube& c);
std::size_t dyadic_slot_count(const Grid& grid);

/// Exact-order sums over dyadic cubes. Children are combined pairwise in a
/// fixed order, so a function lifted to a finer grid by value duplication
/// yields sums that are exact powers-of-two multiples of the coarse ones.
class DyadicSums {
public:
    DyadicSums(const Grid& grid, std::span<const double> cell_values);

    double sum(const DyadicCube& c) const { return sums_[dyadic_slot(c)]; }
    double integral(const DyadicCube& c) const { return sum(c) * cell_measure_; }
    double average(const DyadicCube& c) const;

private:
    Grid grid_;
    double cell_measure_;
    std::vector<double> sums_;
};

/// Integral over the whole grid using the dyadic summation order.
double integrate(const Grid& grid, std::span<const double> cell_values);

/// Lifts f to depth + 1 by copying every value onto its 2^n children.
GridFunction refine(const GridFunction& f);

}  // namespace medosc
