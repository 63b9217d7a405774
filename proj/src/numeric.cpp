#include "medosc/numeric.hpp"

#include <numeric>

namespace medosc {

namespace {

double tree_sum_1d(std::span<const double> v) {
    if (v.size() == 1) return v[0];
    const std::size_t h = v.size() / 2;
    return tree_sum_1d(v.first(h)) + tree_sum_1d(v.subspan(h));
}

double tree_sum_2d(std::span<const double> v, std::uint32_t stride, std::uint32_t r0, std::uint32_t c0,
                   std::uint32_t side) {
    if (side == 1) return v[std::size_t{r0} * stride + c0];
    const std::uint32_t h = side / 2;
    return (tree_sum_2d(v, stride, r0, c0, h) + tree_sum_2d(v, stride, r0, c0 + h, h)) +
           (tree_sum_2d(v, stride, r0 + h, c0, h) + tree_sum_2d(v, stride, r0 + h, c0 + h, h));
}

}  // namespace

double block_sum(std::span<const double> block, int dim, std::uint32_t side) {
    if (block.empty()) return 0.0;
    const bool pow2 = (side & (side - 1)) == 0;
    if (!pow2) return std::accumulate(block.begin(), block.end(), 0.0);
    if (dim == 1) return tree_sum_1d(block);
    return tree_sum_2d(block, side, 0, 0, side);
}

}  // namespace medosc
