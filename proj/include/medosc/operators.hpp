#pragma once

#include "medosc/grid.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace medosc {

/// h_Q = |Q|^{-1/2} (1_{left child} - 1_{right child}). 1D only.
GridFunction haar_function(const Grid& grid, const DyadicCube& q);

/// <f, h_Q> for every dyadic cube above the leaf level, indexed by dyadic_slot.
std::vector<double> haar_coefficients(const GridFunction& f);

/// sum_Q b_Q h_Q for coefficients indexed by dyadic_slot.
GridFunction haar_synthesis(const Grid& grid, std::span<const double> coeffs);

struct HaarEntry {
    DyadicCube q;    // common ancestor Q
    DyadicCube qp;   // Q'
    DyadicCube qpp;  // Q''
    double a = 0.0;  // a_{Q',Q''}
};

/// H f = sum over entries of a <f, h_{Q'}> h_{Q''}.
struct HaarShift {
    int tau = 0;
    double C = 1.0;
    // Deepest level allowed for Q' and Q''. Pairs that would need children
    // below the leaf level are dropped, so this is depth - 1 of the grid the
    // shift was built for.
    int max_level = 0;
    std::vector<HaarEntry> entries;
};

/// Coefficients u C (|Q'||Q''|/|Q|^2)^{1/2} with u uniform in [-1, 1] keyed by
/// (seed, Q, Q', Q''), for every Q in D(q0) and Q', Q'' within tau levels.
HaarShift random_haar_shift(int tau, double C, std::uint64_t seed, const Grid& grid, const DyadicCube& q0);
inline HaarShift random_haar_shift(int tau, double C, std::uint64_t seed, const Grid& grid) {
    return random_haar_shift(tau, C, seed, grid, grid.root());
}

/// tau = 0 shift with a_{Q,Q} = C, or +-C with signs keyed by `sign_seed`.
HaarShift martingale_transform(const Grid& grid, double C, std::optional<std::uint64_t> sign_seed = std::nullopt);

/// True when every coefficient obeys |a| <= C (|Q'||Q''|/|Q|^2)^{1/2} and the
/// tau-level window.
bool satisfies_size_bound(const HaarShift& h);

GridFunction apply_haar_shift(const HaarShift& h, const GridFunction& f);

/// Principal-value Hilbert transform with f extended by zero:
/// Tf(i) = sum_{j != i} f_j |cell| / (x_i - x_j). 1D only.
GridFunction hilbert_transform(const GridFunction& f);

struct Kernel {
    std::string name;
    std::function<double(double, double)> k;  // k(x, y), x != y
    double delta = 1.0;                       // smoothness exponent
};

Kernel hilbert_kernel();
/// sign(x - y) |x - y|^{-1/2}: fails the smoothness condition.
Kernel rough_kernel();

struct KernelReport {
    std::vector<double> box_sizes;
    std::vector<double> max_ratio_per_box;
    double max_ratio = 0.0;
    bool bounded = true;
    std::size_t samples = 0;  // per box
};

// The verdict compares the largest and smallest box; a ratio that keeps
// growing with the box is reported as unbounded.
inline constexpr double kKernelGrowthTol = 2.0;

/// Samples (Q, x, x' in Q, y outside 2Q) with |y - center| up to each box
/// size and records max |k(x,y) - k(x',y)| |x-y|^{1+delta} / |x-x'|^delta.
KernelReport kernel_smoothness_check(const Kernel& k, std::size_t samples, std::uint64_t seed);

}  // namespace medosc
