#pragma once

#include <cstdint>
#include <span>

namespace medosc {

/// Sum of a row-major block of side `side`. Power-of-two blocks are reduced in
/// the same quadtree order as DyadicSums; other sides fall back to a plain
/// left-to-right sum.
double block_sum(std::span<const double> block, int dim, std::uint32_t side);

}  // namespace medosc
