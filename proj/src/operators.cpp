#include "medosc/operators.hpp"

#include "medosc/error.hpp"
#include "medosc/util.hpp"

#include <cmath>
#include <string>

namespace medosc {

namespace {

void require_1d(const Grid& grid, const char* what) {
    if (grid.dim != 1)
        throw Error(ErrorCode::UnsupportedDimension, std::string(what) + " is only defined in dimension 1");
}

void require_haar_cube(const Grid& grid, const DyadicCube& q) {
    if (q.dim != grid.dim || q.level < 0 || q.level > grid.depth || !grid.contains(q))
        throw Error(ErrorCode::InvalidArgument, "cube is not part of the grid");
    if (q.level == grid.depth)
        throw Error(ErrorCode::LeafCube, "a single cell has no Haar function");
}

std::uint64_t key_hash(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix64(seed);
    for (std::uint64_t p : parts) h = mix64(h ^ p);
    return h;
}

std::uint64_t cube_key(const DyadicCube& c) {
    return (static_cast<std::uint64_t>(c.level) << 48) ^ (static_cast<std::uint64_t>(c.index[0]) << 24) ^
           c.index[1];
}

// (|Q'| |Q''| / |Q|^2)^{1/2} for cubes a and b levels below Q.
double size_factor(int dim, int a, int b) { return std::sqrt(std::ldexp(1.0, -dim * (a + b))); }

}  // namespace

GridFunction haar_function(const Grid& grid, const DyadicCube& q) {
    require_1d(grid, "the Haar function");
    require_haar_cube(grid, q);
    std::vector<double> values(grid.cell_count(), 0.0);
    const double amp = 1.0 / std::sqrt(grid.measure(q));
    const AlignedCube a = to_aligned(grid, q);
    const std::uint32_t half = a.side / 2;
    for (std::uint32_t i = 0; i < a.side; ++i) values[a.offset[0] + i] = i < half ? amp : -amp;
    return GridFunction(grid, std::move(values));
}

std::vector<double> haar_coefficients(const GridFunction& f) {
    const Grid& grid = f.grid();
    require_1d(grid, "the Haar transform");
    const DyadicSums sums(grid, f.values());
    const double cm = grid.cell_measure();
    std::vector<double> c(dyadic_slot_count(grid), 0.0);
    for (int k = 0; k < grid.depth; ++k) {
        const std::uint32_t count = std::uint32_t{1} << k;
        for (std::uint32_t i = 0; i < count; ++i) {
            const DyadicCube q{1, k, {i, 0}};
            const auto ch = children(q);
            c[dyadic_slot(q)] = (sums.sum(ch[0]) - sums.sum(ch[1])) * cm / std::sqrt(grid.measure(q));
        }
    }
    return c;
}

GridFunction haar_synthesis(const Grid& grid, std::span<const double> coeffs) {
    require_1d(grid, "the Haar transform");
    if (coeffs.size() != dyadic_slot_count(grid))
        throw Error(ErrorCode::InvalidArgument, "coefficient count does not match the grid");
    std::vector<double> amp(static_cast<std::size_t>(grid.depth));
    for (int k = 0; k < grid.depth; ++k) amp[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(grid.measure({1, k, {0, 0}}));
    std::vector<double> out(grid.cell_count(), 0.0);
    const int L = grid.depth;
    for (std::size_t cell = 0; cell < out.size(); ++cell) {
        double acc = 0.0;
        for (int k = 0; k < L; ++k) {
            const auto idx = static_cast<std::uint32_t>(cell >> (L - k));
            const bool left = ((cell >> (L - k - 1)) & 1U) == 0;
            const double b = coeffs[dyadic_slot({1, k, {idx, 0}})];
            if (b != 0.0) acc += left ? b * amp[static_cast<std::size_t>(k)] : -b * amp[static_cast<std::size_t>(k)];
        }
        out[cell] = acc;
    }
    return GridFunction(grid, std::move(out));
}

HaarShift random_haar_shift(int tau, double C, std::uint64_t seed, const Grid& grid, const DyadicCube& q0) {
    require_1d(grid, "a Haar shift");
    if (tau < 0) throw Error(ErrorCode::InvalidArgument, "tau must be non-negative");
    if (tau > grid.depth - 1)
        throw Error(ErrorCode::IndexTooDeep,
                    "tau = " + std::to_string(tau) + " exceeds depth - 1 = " + std::to_string(grid.depth - 1));
    if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
    if (!grid.contains(q0)) throw Error(ErrorCode::InvalidArgument, "Q0 is not a cube of the grid");

    HaarShift h;
    h.tau = tau;
    h.C = C;
    h.max_level = grid.depth - 1;
    for (const auto& q : dyadic_descendants(grid, q0)) {
        if (q.level > h.max_level) break;
        const int reach = std::min(tau, h.max_level - q.level);
        for (int a = 0; a <= reach; ++a) {
            for (std::uint32_t i = 0; i < (1U << a); ++i) {
                const DyadicCube qp{1, q.level + a, {(q.index[0] << a) + i, 0}};
                for (int b = 0; b <= reach; ++b) {
                    for (std::uint32_t j = 0; j < (1U << b); ++j) {
                        const DyadicCube qpp{1, q.level + b, {(q.index[0] << b) + j, 0}};
                        const double u =
                            2.0 * unit_from_bits(key_hash(seed, {cube_key(q), cube_key(qp), cube_key(qpp)})) - 1.0;
                        h.entries.push_back({q, qp, qpp, u * C * size_factor(1, a, b)});
                    }
                }
            }
        }
    }
    return h;
}

HaarShift martingale_transform(const Grid& grid, double C, std::optional<std::uint64_t> sign_seed) {
    require_1d(grid, "a Haar shift");
    if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
    HaarShift h;
    h.tau = 0;
    h.C = C;
    h.max_level = grid.depth - 1;
    for (const auto& q : all_dyadic_cubes(grid)) {
        if (q.level > h.max_level) break;
        double a = C;
        if (sign_seed && (key_hash(*sign_seed, {cube_key(q)}) & 1U)) a = -C;
        h.entries.push_back({q, q, q, a});
    }
    return h;
}

bool satisfies_size_bound(const HaarShift& h) {
    for (const auto& e : h.entries) {
        const int a = e.qp.level - e.q.level;
        const int b = e.qpp.level - e.q.level;
        if (a < 0 || b < 0 || a > h.tau || b > h.tau) return false;
        if (!contains(e.q, e.qp) || !contains(e.q, e.qpp)) return false;
        if (!(std::abs(e.a) <= h.C * size_factor(e.q.dim, a, b))) return false;
    }
    return true;
}

GridFunction apply_haar_shift(const HaarShift& h, const GridFunction& f) {
    const Grid& grid = f.grid();
    require_1d(grid, "a Haar shift");
    const auto c = haar_coefficients(f);
    std::vector<double> b(c.size(), 0.0);
    for (const auto& e : h.entries) {
        require_haar_cube(grid, e.qp);
        require_haar_cube(grid, e.qpp);
        b[dyadic_slot(e.qpp)] += e.a * c[dyadic_slot(e.qp)];
    }
    return haar_synthesis(grid, b);
}

GridFunction hilbert_transform(const GridFunction& f) {
    const Grid& grid = f.grid();
    require_1d(grid, "the Hilbert transform");
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    // With midpoints x_i = (i + 1/2) w the cell measure w cancels against
    // x_i - x_j = (i - j) w.
    parallel_for(n, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            acc += f[j] / (static_cast<double>(i) - static_cast<double>(j));
        }
        out[i] = acc;
    });
    return GridFunction(grid, std::move(out));
}

Kernel hilbert_kernel() {
    return {"hilbert", [](double x, double y) { return 1.0 / (x - y); }, 1.0};
}

Kernel rough_kernel() {
    return {"rough",
            [](double x, double y) {
                const double d = x - y;
                return (d > 0 ? 1.0 : -1.0) / std::sqrt(std::abs(d));
            },
            1.0};
}

KernelReport kernel_smoothness_check(const Kernel& k, std::size_t samples, std::uint64_t seed) {
    KernelReport rep;
    rep.samples = samples;
    rep.box_sizes = {4.0, 64.0, 1024.0, 16384.0};
    const double log_rmin = std::log(1e-3);
    for (std::size_t b = 0; b < rep.box_sizes.size(); ++b) {
        const double box = rep.box_sizes[b];
        Rng rng(key_hash(seed, {b}));
        double best = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const double r = std::exp(rng.uniform(log_rmin, 0.0));  // half-side of Q
            const double c = rng.uniform(-1.0, 1.0);
            const double x = c + r * rng.uniform(-1.0, 1.0);
            const double xp = c + r * rng.uniform(-1.0, 1.0);
            const double d = std::exp(rng.uniform(std::log(2.0 * r), std::log(box)));
            const double y = rng.uniform() < 0.5 ? c - d : c + d;
            if (!(std::abs(y - c) > 2.0 * r) || x == xp) continue;
            const double diff = std::abs(k.k(x, y) - k.k(xp, y));
            const double ratio = diff * std::pow(std::abs(x - y), 1.0 + k.delta) / std::pow(std::abs(x - xp), k.delta);
            if (std::isfinite(ratio)) best = std::max(best, ratio);
        }
        rep.max_ratio_per_box.push_back(best);
        rep.max_ratio = std::max(rep.max_ratio, best);
    }
    const double first = rep.max_ratio_per_box.front();
    const double last = rep.max_ratio_per_box.back();
    rep.bounded = std::isfinite(rep.max_ratio) && last <= kKernelGrowthTol * std::max(first, 1e-300);
    return rep;
}

}  // namespace medosc
