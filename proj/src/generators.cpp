#include "medosc/generators.hpp"

#include "medosc/error.hpp"
#include "medosc/util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace medosc {

namespace {

double distance_to(const Grid& grid, std::size_t cell, const std::vector<double>& center) {
    double d2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
        const double d = grid.midpoint(cell, a) - center[a];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

std::vector<double> seeded_point(const Grid& grid, Rng& rng) {
    std::vector<double> p(grid.dim);
    for (int a = 0; a < grid.dim; ++a) p[a] = grid.origin[a] + grid.side * rng.uniform();
    return p;
}

}  // namespace

const std::vector<std::string>& generator_kinds() {
    static const std::vector<std::string> kinds{"constant",          "step",        "spike",
                                                "random-uniform",    "random-heavy-tail",
                                                "smooth-sine",       "singular-power",
                                                "random-coarse"};
    return kinds;
}

GridFunction generate(const std::string& kind, const Grid& grid, std::uint64_t seed,
                      const GeneratorParams& p) {
    validate(grid);
    const std::size_t N = grid.cell_count();
    std::vector<double> v(N, 0.0);
    Rng rng(seed);

    if (kind == "constant") {
        std::fill(v.begin(), v.end(), p.value.value_or(0.0));
    } else if (kind == "step") {
        const double amp = p.amplitude.value_or(1.0);
        const double jump = grid.origin[0] + p.jump.value_or(0.5) * grid.side;
        for (std::size_t c = 0; c < N; ++c) v[c] = grid.midpoint(c, 0) < jump ? amp : 0.0;
    } else if (kind == "spike") {
        const double amp = p.amplitude ? *p.amplitude : 1.0 + 15.0 * rng.uniform();
        const std::size_t cell = p.cell ? *p.cell : static_cast<std::size_t>(rng.below(N));
        if (cell >= N) throw Error(ErrorCode::InvalidArgument, "spike cell outside the grid");
        v[cell] = amp;
    } else if (kind == "random-uniform") {
        const double amp = p.amplitude.value_or(1.0);
        for (auto& x : v) x = rng.uniform(-amp, amp);
    } else if (kind == "random-heavy-tail") {
        const double amp = p.amplitude.value_or(1.0);
        for (auto& x : v) {
            const double u = 1.0 - rng.uniform();  // (0, 1]
            const double mag = std::pow(u, -1.0 / 1.5) - 1.0;
            x = (rng.next() & 1 ? amp : -amp) * mag;
        }
    } else if (kind == "smooth-sine") {
        const double amp = p.amplitude.value_or(1.0);
        const double freq = p.frequency.value_or(1.0 + static_cast<double>(rng.below(3)));
        std::array<double, 2> phase{};
        for (int a = 0; a < grid.dim; ++a) phase[a] = 2.0 * std::numbers::pi * rng.uniform();
        for (std::size_t c = 0; c < N; ++c) {
            double prod = amp;
            for (int a = 0; a < grid.dim; ++a) {
                const double x = (grid.midpoint(c, a) - grid.origin[a]) / grid.side;
                prod *= std::sin(2.0 * std::numbers::pi * freq * x + phase[a]);
            }
            v[c] = prod;
        }
    } else if (kind == "singular-power") {
        const double a = p.exponent.value_or(0.5 * grid.dim);
        if (!(a < grid.dim) || a < 0.0)
            throw Error(ErrorCode::InvalidArgument, "singular-power exponent must lie in [0, dim)");
        std::vector<double> center = p.center ? *p.center : seeded_point(grid, rng);
        if (static_cast<int>(center.size()) != grid.dim)
            throw Error(ErrorCode::InvalidArgument, "singular-power center has wrong dimension");
        for (std::size_t c = 0; c < N; ++c) {
            const double d = distance_to(grid, c, center);
            if (d == 0.0)
                throw Error(ErrorCode::InvalidArgument, "singular-power pole sits on a cell midpoint");
            v[c] = std::pow(d, -a);
        }
    } else if (kind == "random-coarse") {
        const double amp = p.amplitude.value_or(1.0);
        const int coarse = std::min(grid.depth, p.coarse_depth.value_or(4));
        if (coarse < 0) throw Error(ErrorCode::InvalidArgument, "coarse_depth must be >= 0");
        const std::size_t per_axis = std::size_t{1} << coarse;
        std::vector<double> base(grid.dim == 2 ? per_axis * per_axis : per_axis);
        for (auto& x : base) x = rng.uniform(-amp, amp);
        const int shift = grid.depth - coarse;
        for (std::size_t c = 0; c < N; ++c) {
            const Index2 ij = grid.coords(c);
            v[c] = grid.dim == 2 ? base[(ij[0] >> shift) * per_axis + (ij[1] >> shift)] : base[ij[0] >> shift];
        }
    } else {
        throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + kind + "'");
    }
    return GridFunction(grid, std::move(v));
}

GridFunction generate(const std::string& kind, int dim, int depth, std::uint64_t seed,
                      const GeneratorParams& params) {
    Grid g;
    g.dim = dim;
    g.depth = depth;
    return generate(kind, g, seed, params);
}

Weight generate_weight(const std::string& kind, const Grid& grid, std::uint64_t seed) {
    validate(grid);
    std::vector<double> w(grid.cell_count(), 1.0);
    Rng rng(seed);
    if (kind == "unit") {
        // all ones
    } else if (kind == "power") {
        const double beta = (rng.uniform() - 0.5) * grid.dim;
        const auto center = seeded_point(grid, rng);
        for (std::size_t c = 0; c < w.size(); ++c) {
            const double d = std::max(distance_to(grid, c, center), 1e-12);
            w[c] = std::pow(d, beta);
        }
    } else if (kind == "random") {
        for (auto& x : w) x = std::exp(rng.uniform(-1.0, 1.0));
    } else {
        throw Error(ErrorCode::UnknownGenerator, "unknown weight kind '" + kind + "'");
    }
    return Weight(GridFunction(grid, std::move(w)));
}

}  // namespace medosc
