#include "medosc/oscillation.hpp"

#include "medosc/error.hpp"
#include "medosc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace medosc {

std::string_view to_string(CubeClass cls) { return cls == CubeClass::Dyadic ? "dyadic" : "aligned"; }

CubeClass parse_cube_class(std::string_view name) {
    if (name == "dyadic") return CubeClass::Dyadic;
    if (name == "aligned") return CubeClass::Aligned;
    throw Error(ErrorCode::InvalidArgument, "cube class must be 'dyadic' or 'aligned', got '" +
                                                std::string(name) + "'");
}

void require_decomposition_params(const OscParams& p) {
    if (!(p.s > 0.0 && p.s < 0.5))
        throw Error(ErrorCode::InvalidArgument, "s must satisfy 0 < s < 1/2");
    if (!(p.t >= 0.5 && p.t < 1.0 - p.s))
        throw Error(ErrorCode::InvalidArgument, "t must satisfy 1/2 <= t < 1 - s");
}

void require_sharp_s(double s) {
    if (!(s > 0.0 && s <= 0.5)) throw Error(ErrorCode::InvalidArgument, "s must satisfy 0 < s <= 1/2");
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "delta must satisfy 0 < delta <= 1");
}

double parent_level(double t, int dim) { return 1.0 - (1.0 - t) / static_cast<double>(1 << dim); }

double packing_factor(const OscParams& p) { return p.s / (1.0 - p.t); }

std::size_t median_rank(double t, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "median of an empty sample");
    const auto r = static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
    return std::min(r, n - 1);
}

std::size_t outlier_rank(double s, std::size_t n) {
    return static_cast<std::size_t>(std::ceil(s * static_cast<double>(n)));
}

double median_sorted(std::span<const double> sorted, double t) { return sorted[median_rank(t, sorted.size())]; }

double median_of(std::span<const double> values, double t) {
    std::vector<double> v(values.begin(), values.end());
    const std::size_t r = median_rank(t, v.size());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(r), v.end());
    return v[r];
}

double osc_quantile_of(std::span<const double> values, double s, double center) {
    const std::size_t n = values.size();
    const std::size_t k = outlier_rank(s, n);
    if (k == 0 || k > n) return 0.0;
    std::vector<double> d(n);
    std::transform(values.begin(), values.end(), d.begin(), [&](double v) { return std::abs(v - center); });
    // K-th largest is the (n - k)-th smallest, 0-based.
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n - k), d.end());
    return d[n - k];
}

double abs_median_of(std::span<const double> values, double center, double q) {
    std::vector<double> d(values.size());
    std::transform(values.begin(), values.end(), d.begin(), [&](double v) { return std::abs(v - center); });
    return median_of(d, q);
}

BestConstant narrowest_window(std::span<const double> sorted, std::size_t window) {
    if (sorted.empty() || window == 0) return {sorted.empty() ? 0.0 : sorted.front(), 0.0};
    window = std::min(window, sorted.size());
    std::size_t best = 0;
    double best_width = sorted[window - 1] - sorted[0];
    for (std::size_t i = 1; i + window <= sorted.size(); ++i) {
        const double w = sorted[i + window - 1] - sorted[i];
        if (w < best_width) {
            best_width = w;
            best = i;
        }
    }
    return {std::midpoint(sorted[best], sorted[best + window - 1]), best_width / 2.0};
}

BestConstant best_constant_osc_of(std::span<const double> values, double s) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const std::size_t k = outlier_rank(s, n);
    // At least n - k + 1 values must sit within alpha of the center.
    const std::size_t window = k > n ? 0 : n - k + 1;
    return narrowest_window(v, window);
}

BestConstant best_constant_median_of(std::span<const double> values, double q) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return narrowest_window(v, median_rank(q, v.size()) + 1);
}

double median(const GridFunction& f, double t, const DyadicCube& cube) { return median_of(gather(f, cube), t); }
double median(const GridFunction& f, double t, const AlignedCube& cube) { return median_of(gather(f, cube), t); }

double osc_quantile(const GridFunction& f, const AlignedCube& cube, double s, double center) {
    return osc_quantile_of(gather(f, cube), s, center);
}
double osc_quantile(const GridFunction& f, const DyadicCube& cube, double s, double center) {
    return osc_quantile_of(gather(f, cube), s, center);
}

BestConstant best_constant_osc(const GridFunction& f, const AlignedCube& cube, double s) {
    return best_constant_osc_of(gather(f, cube), s);
}
BestConstant best_constant_osc(const GridFunction& f, const DyadicCube& cube, double s) {
    return best_constant_osc_of(gather(f, cube), s);
}

double median_oscillation(const GridFunction& f, const DyadicCube& cube, double t, double q) {
    const auto vals = gather(f, cube);
    return abs_median_of(vals, median_of(vals, t), q);
}

double mean_oscillation(const GridFunction& f, const AlignedCube& cube) {
    auto vals = gather(f, cube);
    const double n = static_cast<double>(vals.size());
    const double mean = block_sum(vals, cube.dim, cube.side) / n;
    for (auto& v : vals) v = std::abs(v - mean);
    return block_sum(vals, cube.dim, cube.side) / n;
}

double abs_average(const GridFunction& f, const AlignedCube& cube) {
    auto vals = gather(f, cube);
    for (auto& v : vals) v = std::abs(v);
    return block_sum(vals, cube.dim, cube.side) / static_cast<double>(vals.size());
}

void for_each_cube(const Grid& grid, const DyadicCube& domain, CubeClass cls,
                   const std::function<void(const AlignedCube&)>& fn) {
    if (!grid.contains(domain)) throw Error(ErrorCode::InvalidArgument, "domain cube outside the grid");
    if (cls == CubeClass::Dyadic) {
        for (const auto& c : dyadic_descendants(grid, domain)) fn(to_aligned(grid, c));
        return;
    }
    const AlignedCube d = to_aligned(grid, domain);
    for (std::uint32_t k = 1; k <= d.side; ++k) {
        const std::uint32_t span = d.side - k + 1;
        const std::uint32_t span1 = grid.dim == 2 ? span : 1;
        for (std::uint32_t i = 0; i < span; ++i)
            for (std::uint32_t j = 0; j < span1; ++j)
                fn(AlignedCube{grid.dim, {d.offset[0] + i, grid.dim == 2 ? d.offset[1] + j : 0}, k});
    }
}

namespace {

void require_cell_in(const Grid& grid, std::size_t cell, const DyadicCube& q0) {
    if (cell >= grid.cell_count() || !contains_cell(grid, q0, cell))
        throw Error(ErrorCode::InvalidArgument, "cell " + std::to_string(cell) + " is not in Q0");
}

double sup_over_cubes(const GridFunction& f, std::size_t cell, const DyadicCube& q0, CubeClass cls,
                      const std::function<double(const AlignedCube&)>& value) {
    require_cell_in(f.grid(), cell, q0);
    double best = 0.0;
    for_each_cube(f.grid(), q0, cls, [&](const AlignedCube& c) {
        if (contains_cell(f.grid(), c, cell)) best = std::max(best, value(c));
    });
    return best;
}

}  // namespace

double local_sharp_max(const GridFunction& f, std::size_t cell, const DyadicCube& q0, double s, CubeClass cls) {
    require_sharp_s(s);
    return sup_over_cubes(f, cell, q0, cls,
                          [&](const AlignedCube& c) { return best_constant_osc(f, c, s).alpha; });
}

double median_max_dyadic(const GridFunction& f, std::size_t cell, double t, const DyadicCube& q0) {
    require_cell_in(f.grid(), cell, q0);
    double best = 0.0;
    for (int k = q0.level; k <= f.depth(); ++k)
        best = std::max(best, std::abs(median(f, t, cube_containing(f.grid(), cell, k))));
    return best;
}

double hl_max(const GridFunction& f, std::size_t cell, CubeClass cls, const DyadicCube& q0) {
    return sup_over_cubes(f, cell, q0, cls, [&](const AlignedCube& c) { return abs_average(f, c); });
}

double mean_sharp_max(const GridFunction& f, std::size_t cell, const DyadicCube& q0, CubeClass cls) {
    return sup_over_cubes(f, cell, q0, cls, [&](const AlignedCube& c) { return mean_oscillation(f, c); });
}

}  // namespace medosc
