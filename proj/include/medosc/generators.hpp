#pragma once

#include "medosc/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace medosc {

/// Knobs shared by the function generators. Unset fields fall back to
/// defaults or to seed-derived draws, so (kind, params, seed) fixes the output.
struct GeneratorParams {
    std::optional<double> value;      // constant
    std::optional<double> amplitude;  // step, spike, random-*, smooth-sine
    std::optional<std::size_t> cell;  // spike location (flat index)
    std::optional<double> jump;       // step location along axis 0, in [0,1]
    std::optional<double> exponent;   // singular-power, must be < dim
    std::optional<std::vector<double>> center;  // singular-power pole, absolute coordinates
    std::optional<double> frequency;  // smooth-sine
    std::optional<int> coarse_depth;  // random-coarse, default 4
};

/// Generator names accepted by generate().
const std::vector<std::string>& generator_kinds();

/// Builds a grid function of the given kind:
///   constant          value (default 0)
///   step              amplitude (default 1) where x_0 < origin + jump*side, 0 elsewhere
///   spike             amplitude (default: seeded in [1, 16]) at one cell, 0 elsewhere
///   random-uniform    i.i.d. uniform on [-amplitude, amplitude)
///   random-heavy-tail i.i.d. symmetric Pareto(1.5) scaled by amplitude
///   smooth-sine       amplitude * prod_j sin(2 pi frequency (x_j - o_j)/side + phase_j)
///   singular-power    |x - center|^{-exponent} at cell midpoints
///   random-coarse     random-uniform at depth min(depth, coarse_depth), copied
///                     onto the finer cells, so the result does not change
///                     with the depth once it exceeds coarse_depth
/// Throws UnknownGenerator for any other kind.
GridFunction generate(const std::string& kind, const Grid& grid, std::uint64_t seed,
                      const GeneratorParams& params = {});

GridFunction generate(const std::string& kind, int dim, int depth, std::uint64_t seed,
                      const GeneratorParams& params = {});

/// Positive weights: "unit" (w = 1), "power" (|x - c|^beta with beta in (-n/2, n/2)
/// and a seeded pole), "random" (exp of a seeded uniform in [-1, 1]).
Weight generate_weight(const std::string& kind, const Grid& grid, std::uint64_t seed);

}  // namespace medosc
