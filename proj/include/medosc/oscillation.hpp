#pragma once

#include "medosc/grid.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medosc {

/// Which cubes a supremum ranges over: the dyadic tree of the domain, or every
/// cell-aligned cube inside it.
enum class CubeClass { Dyadic, Aligned };

std::string_view to_string(CubeClass cls);
CubeClass parse_cube_class(std::string_view name);

struct OscParams {
    double s = 0.25;
    double t = 0.5;
    double delta = 1.0;

    friend bool operator==(const OscParams&, const OscParams&) = default;
};

/// 0 < s < 1/2 and 1/2 <= t < 1 - s.
void require_decomposition_params(const OscParams& p);
/// 0 < s <= 1/2.
void require_sharp_s(double s);
/// 0 < delta <= 1.
void require_delta(double delta);

/// Parent quantile level 1 - (1 - t)/2^n.
double parent_level(double t, int dim);

/// Packing factor s / (1 - t).
double packing_factor(const OscParams& p);

// ---------------------------------------------------------------------------
// Order statistics on samples. A grid function restricted to a cube is a
// piecewise constant function on equal-measure cells, so the continuum
// definitions reduce to exact rank rules.

/// 0-based rank of the maximal median m(t): floor(t N).
std::size_t median_rank(double t, std::size_t n);

/// Smallest outlier count K with "fewer than s N exceed": ceil(s N).
std::size_t outlier_rank(double s, std::size_t n);

/// m(t) of a sorted sample: v[floor(tN)].
double median_sorted(std::span<const double> sorted, double t);

/// m(t) of an unsorted sample.
double median_of(std::span<const double> values, double t);

/// Smallest alpha >= 0 with fewer than s N of |v - center| exceeding alpha.
double osc_quantile_of(std::span<const double> values, double s, double center);

/// m_{|v - center|}(q).
double abs_median_of(std::span<const double> values, double center, double q);

struct BestConstant {
    double center = 0.0;
    double alpha = 0.0;
};

/// Narrowest run of `window` consecutive sorted values: alpha is half its
/// width, center its midpoint. window == 0 yields alpha 0 and center 0;
/// window > size is clamped to the whole sample.
BestConstant narrowest_window(std::span<const double> sorted, std::size_t window);

/// inf over c of osc_quantile_of(values, s, c).
BestConstant best_constant_osc_of(std::span<const double> values, double s);

/// inf over c of m_{|v - c|}(q).
BestConstant best_constant_median_of(std::span<const double> values, double q);

// ---------------------------------------------------------------------------
// Grid forms.

double median(const GridFunction& f, double t, const DyadicCube& cube);
double median(const GridFunction& f, double t, const AlignedCube& cube);

double osc_quantile(const GridFunction& f, const AlignedCube& cube, double s, double center);
double osc_quantile(const GridFunction& f, const DyadicCube& cube, double s, double center);

BestConstant best_constant_osc(const GridFunction& f, const AlignedCube& cube, double s);
BestConstant best_constant_osc(const GridFunction& f, const DyadicCube& cube, double s);

/// m_{|f - m_f(t,Q)|}(q, Q).
double median_oscillation(const GridFunction& f, const DyadicCube& cube, double t, double q);

/// Mean absolute deviation from the mean: (1/|Q|) int_Q |f - f_Q|.
double mean_oscillation(const GridFunction& f, const AlignedCube& cube);

/// Average of |f| over the cube.
double abs_average(const GridFunction& f, const AlignedCube& cube);

/// Invokes fn(cube) for every cube of the class inside `domain`.
void for_each_cube(const Grid& grid, const DyadicCube& domain, CubeClass cls,
                   const std::function<void(const AlignedCube&)>& fn);

/// Single-point maximal functions, evaluated by direct enumeration of the
/// cubes of the class that lie in Q0 and contain the cell.
double local_sharp_max(const GridFunction& f, std::size_t cell, const DyadicCube& q0, double s,
                       CubeClass cls);
double median_max_dyadic(const GridFunction& f, std::size_t cell, double t, const DyadicCube& q0);
double hl_max(const GridFunction& f, std::size_t cell, CubeClass cls, const DyadicCube& q0);
double mean_sharp_max(const GridFunction& f, std::size_t cell, const DyadicCube& q0, CubeClass cls);

}  // namespace medosc
