#pragma once

#include "medosc/grid.hpp"
#include "medosc/oscillation.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace medosc {

/// One value per cube of a class over the whole grid, stored densely.
class CubeTable {
public:
    CubeTable(const Grid& grid, CubeClass cls);

    const Grid& grid() const { return grid_; }
    CubeClass cube_class() const { return cls_; }

    /// Evaluates value(Q) for every cube of the class, in parallel.
    void fill(const std::function<double(const AlignedCube&)>& value);

    double get(const AlignedCube& cube) const { return data_[slot(cube)]; }
    double get(const DyadicCube& cube) const { return get(to_aligned(grid_, cube)); }

    /// F(x) = sup { value(Q) : x in Q, Q subset of domain, Q in class } for the
    /// cells of `domain` in cells_of order. Values are assumed >= 0; cells
    /// covered by no cube get 0.
    std::vector<double> sup_field(const DyadicCube& domain) const;

private:
    std::size_t slot(const AlignedCube& cube) const;

    Grid grid_;
    CubeClass cls_;
    std::vector<std::size_t> side_start_;  // aligned: first slot of each side
    std::vector<double> data_;
};

/// Local sharp maximal function M#_{0,s,D} f for every dyadic domain D.
///
/// The best-constant oscillation of every cube of the class is computed once;
/// fields for individual domains are filled lazily and cached. The cache is
/// guarded by a mutex and filled idempotently, so concurrent readers see the
/// same values.
class SharpMaxTable {
public:
    SharpMaxTable(const GridFunction& f, double s, CubeClass cls);

    const Grid& grid() const { return table_.grid(); }
    CubeClass cube_class() const { return table_.cube_class(); }
    double s() const { return s_; }
    std::uint64_t fingerprint() const { return fingerprint_; }

    /// inf_c inf{alpha : |{|f - c| > alpha}| < s|Q|} for a cube of the class.
    double oscillation(const AlignedCube& cube) const { return table_.get(cube); }
    double oscillation(const DyadicCube& cube) const { return table_.get(cube); }

    /// M#_{0,s,domain} f on the cells of domain, in cells_of order.
    const std::vector<double>& field(const DyadicCube& domain) const;

    double at(std::size_t cell, const DyadicCube& domain) const;

    /// inf over y in domain of M#_{0,s,domain} f(y).
    double inf_over(const DyadicCube& domain) const { return inf_over(domain, domain); }

    /// inf over y in `where` of M#_{0,s,domain} f(y); `where` must lie in domain.
    double inf_over(const DyadicCube& where, const DyadicCube& domain) const;

private:
    CubeTable table_;
    double s_;
    std::uint64_t fingerprint_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::size_t, std::shared_ptr<const std::vector<double>>> fields_;
};

/// Position of a cell of the grid inside cells_of(domain).
std::size_t local_index(const Grid& grid, const DyadicCube& domain, std::size_t cell);

/// Scatter a field given in cells_of(domain) order into a full grid array
/// (cells outside the domain are set to `fill`).
std::vector<double> to_grid_order(const Grid& grid, const DyadicCube& domain,
                                  std::span<const double> local, double fill = 0.0);

// Bulk maximal fields over `domain`, returned in cells_of(domain) order.

/// sup of |m_f(t,Q)| over the dyadic chain of each cell.
std::vector<double> median_max_field(const GridFunction& f, double t, const DyadicCube& domain);

/// Hardy-Littlewood maximal function: sup of the average of |g| over cubes of the class.
std::vector<double> hl_max_field(const GridFunction& g, CubeClass cls, const DyadicCube& domain);

/// Mean sharp maximal function: sup of (1/|Q|) int_Q |f - f_Q|.
std::vector<double> mean_sharp_field(const GridFunction& f, CubeClass cls, const DyadicCube& domain);

/// sup over cubes Q containing x of inf_{y in Q} g(y), for g >= 0 given on the grid.
std::vector<double> sup_inf_field(const Grid& grid, std::span<const double> g, CubeClass cls,
                                  const DyadicCube& domain);

}  // namespace medosc
