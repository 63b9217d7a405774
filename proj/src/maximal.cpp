#include "medosc/maximal.hpp"

#include "medosc/error.hpp"
#include "medosc/util.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>

namespace medosc {

namespace {

// out[x * ostride] = max of w[p * wstride] over p in [x - k + 1, x] clipped to
// [0, len). Monotone deque, O(m).
void sliding_max(const double* w, std::size_t wstride, std::size_t len, std::size_t k, std::size_t m,
                 double* out, std::size_t ostride) {
    std::deque<std::size_t> dq;
    for (std::size_t x = 0; x < m; ++x) {
        if (x < len) {
            while (!dq.empty() && w[dq.back() * wstride] <= w[x * wstride]) dq.pop_back();
            dq.push_back(x);
        }
        while (!dq.empty() && dq.front() + k <= x) dq.pop_front();
        out[x * ostride] = dq.empty() ? 0.0 : w[dq.front() * wstride];
    }
}

// Generic sup-painting over the cubes of a class inside `domain`.
std::vector<double> paint_sup(const Grid& grid, const DyadicCube& domain, CubeClass cls,
                              const std::function<double(const AlignedCube&)>& value) {
    if (!grid.contains(domain)) throw Error(ErrorCode::InvalidArgument, "domain cube outside the grid");
    const AlignedCube d = to_aligned(grid, domain);
    const std::size_t m = d.side;
    const std::size_t total = cell_count(d);
    std::vector<double> out(total, 0.0);

    if (cls == CubeClass::Dyadic) {
        const auto cubes = dyadic_descendants(grid, domain);
        std::vector<double> vals(cubes.size());
        parallel_for(cubes.size(), [&](std::size_t i) { vals[i] = value(to_aligned(grid, cubes[i])); });
        // Descendants are listed level by level; walk each level and push the
        // running max down to the cells it covers.
        std::size_t pos = 0;
        for (int k = domain.level; k <= grid.depth; ++k) {
            const std::size_t per_axis = std::size_t{1} << (k - domain.level);
            const std::size_t count = grid.dim == 2 ? per_axis * per_axis : per_axis;
            const std::size_t cube_side = m / per_axis;
            for (std::size_t q = 0; q < count; ++q) {
                const double v = vals[pos + q];
                if (grid.dim == 1) {
                    for (std::size_t x = q * cube_side; x < (q + 1) * cube_side; ++x) out[x] = std::max(out[x], v);
                } else {
                    const std::size_t qi = q / per_axis, qj = q % per_axis;
                    for (std::size_t a = qi * cube_side; a < (qi + 1) * cube_side; ++a)
                        for (std::size_t b = qj * cube_side; b < (qj + 1) * cube_side; ++b)
                            out[a * m + b] = std::max(out[a * m + b], v);
                }
            }
            pos += count;
        }
        return out;
    }

    for (std::size_t k = 1; k <= m; ++k) {
        const std::size_t len = m - k + 1;
        if (grid.dim == 1) {
            std::vector<double> w(len), slide(m);
            parallel_for(len, [&](std::size_t p) {
                w[p] = value(AlignedCube{1, {static_cast<std::uint32_t>(d.offset[0] + p), 0},
                                         static_cast<std::uint32_t>(k)});
            });
            sliding_max(w.data(), 1, len, k, m, slide.data(), 1);
            for (std::size_t x = 0; x < m; ++x) out[x] = std::max(out[x], slide[x]);
        } else {
            std::vector<double> w(len * len), rows(len * m), slide(m * m);
            parallel_for(len, [&](std::size_t p0) {
                for (std::size_t p1 = 0; p1 < len; ++p1)
                    w[p0 * len + p1] =
                        value(AlignedCube{2,
                                          {static_cast<std::uint32_t>(d.offset[0] + p0),
                                           static_cast<std::uint32_t>(d.offset[1] + p1)},
                                          static_cast<std::uint32_t>(k)});
            });
            for (std::size_t p0 = 0; p0 < len; ++p0)
                sliding_max(&w[p0 * len], 1, len, k, m, &rows[p0 * m], 1);
            for (std::size_t x1 = 0; x1 < m; ++x1) sliding_max(&rows[x1], m, len, k, m, &slide[x1], m);
            for (std::size_t i = 0; i < m * m; ++i) out[i] = std::max(out[i], slide[i]);
        }
    }
    return out;
}

}  // namespace

CubeTable::CubeTable(const Grid& grid, CubeClass cls) : grid_(grid), cls_(cls) {
    validate(grid_);
    if (cls_ == CubeClass::Dyadic) {
        data_.assign(dyadic_slot_count(grid_), 0.0);
        return;
    }
    const std::size_t M = grid_.cells_per_axis();
    std::size_t pos = 0;
    for (std::size_t k = 1; k <= M; ++k) {
        side_start_.push_back(pos);
        const std::size_t span = M - k + 1;
        pos += grid_.dim == 2 ? span * span : span;
    }
    data_.assign(pos, 0.0);
}

std::size_t CubeTable::slot(const AlignedCube& c) const {
    if (cls_ == CubeClass::Dyadic) {
        if (!std::has_single_bit(c.side) || c.offset[0] % c.side != 0 || c.offset[1] % c.side != 0)
            throw Error(ErrorCode::InvalidArgument, "cube is not dyadic");
        const int shift = std::countr_zero(c.side);
        return dyadic_slot(DyadicCube{grid_.dim, grid_.depth - shift,
                                      {c.offset[0] >> shift, c.offset[1] >> shift}});
    }
    const std::size_t M = grid_.cells_per_axis();
    const std::size_t span = M - c.side + 1;
    const std::size_t base = side_start_[c.side - 1];
    return grid_.dim == 2 ? base + c.offset[0] * span + c.offset[1] : base + c.offset[0];
}

void CubeTable::fill(const std::function<double(const AlignedCube&)>& value) {
    if (cls_ == CubeClass::Dyadic) {
        const auto cubes = all_dyadic_cubes(grid_);
        parallel_for(cubes.size(), [&](std::size_t i) {
            data_[dyadic_slot(cubes[i])] = value(to_aligned(grid_, cubes[i]));
        });
        return;
    }
    const std::uint32_t M = grid_.cells_per_axis();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> rows;  // (side, first offset)
    for (std::uint32_t k = 1; k <= M; ++k)
        for (std::uint32_t i = 0; i + k <= M; ++i) rows.emplace_back(k, i);
    parallel_for(rows.size(), [&](std::size_t r) {
        const auto [k, i] = rows[r];
        if (grid_.dim == 1) {
            const AlignedCube c{1, {i, 0}, k};
            data_[slot(c)] = value(c);
        } else {
            for (std::uint32_t j = 0; j + k <= M; ++j) {
                const AlignedCube c{2, {i, j}, k};
                data_[slot(c)] = value(c);
            }
        }
    });
}

std::vector<double> CubeTable::sup_field(const DyadicCube& domain) const {
    return paint_sup(grid_, domain, cls_, [this](const AlignedCube& c) { return get(c); });
}

SharpMaxTable::SharpMaxTable(const GridFunction& f, double s, CubeClass cls)
    : table_(f.grid(), cls), s_(s), fingerprint_(f.fingerprint()) {
    require_sharp_s(s);
    table_.fill([&](const AlignedCube& c) { return best_constant_osc(f, c, s).alpha; });
}

const std::vector<double>& SharpMaxTable::field(const DyadicCube& domain) const {
    const std::size_t key = dyadic_slot(domain);
    {
        std::lock_guard lock(mutex_);
        if (auto it = fields_.find(key); it != fields_.end()) return *it->second;
    }
    auto computed = std::make_shared<const std::vector<double>>(table_.sup_field(domain));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = fields_.emplace(key, std::move(computed));
    return *it->second;
}

double SharpMaxTable::at(std::size_t cell, const DyadicCube& domain) const {
    return field(domain)[local_index(grid(), domain, cell)];
}

double SharpMaxTable::inf_over(const DyadicCube& where, const DyadicCube& domain) const {
    if (!contains(domain, where)) throw Error(ErrorCode::InvalidArgument, "cube is not inside the domain");
    const auto& fld = field(domain);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t cell : cells_of(grid(), where)) best = std::min(best, fld[local_index(grid(), domain, cell)]);
    return best;
}

std::size_t local_index(const Grid& grid, const DyadicCube& domain, std::size_t cell) {
    const AlignedCube d = to_aligned(grid, domain);
    const Index2 c = grid.coords(cell);
    if (grid.dim == 1) return c[0] - d.offset[0];
    return std::size_t{c[0] - d.offset[0]} * d.side + (c[1] - d.offset[1]);
}

std::vector<double> to_grid_order(const Grid& grid, const DyadicCube& domain, std::span<const double> local,
                                  double fill) {
    std::vector<double> out(grid.cell_count(), fill);
    const auto cells = cells_of(grid, domain);
    for (std::size_t i = 0; i < cells.size(); ++i) out[cells[i]] = local[i];
    return out;
}

std::vector<double> median_max_field(const GridFunction& f, double t, const DyadicCube& domain) {
    return paint_sup(f.grid(), domain, CubeClass::Dyadic,
                     [&](const AlignedCube& c) { return std::abs(median(f, t, c)); });
}

std::vector<double> hl_max_field(const GridFunction& g, CubeClass cls, const DyadicCube& domain) {
    const Grid& grid = g.grid();
    std::vector<double> absval(g.size());
    std::transform(g.values().begin(), g.values().end(), absval.begin(), [](double v) { return std::abs(v); });
    if (cls == CubeClass::Dyadic) {
        const DyadicSums sums(grid, absval);
        const int L = grid.depth;
        return paint_sup(grid, domain, cls, [&](const AlignedCube& c) {
            const int shift = std::countr_zero(c.side);
            return sums.average(DyadicCube{grid.dim, L - shift, {c.offset[0] >> shift, c.offset[1] >> shift}});
        });
    }
    // Summed-area table with a zero border.
    const std::size_t M = grid.cells_per_axis();
    const std::size_t W = M + 1;
    std::vector<double> sat(grid.dim == 2 ? W * W : W, 0.0);
    if (grid.dim == 1) {
        for (std::size_t i = 0; i < M; ++i) sat[i + 1] = sat[i] + absval[i];
    } else {
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j)
                sat[(i + 1) * W + j + 1] = absval[i * M + j] + sat[i * W + j + 1] + sat[(i + 1) * W + j] - sat[i * W + j];
    }
    return paint_sup(grid, domain, cls, [&](const AlignedCube& c) {
        const std::size_t a = c.offset[0], b = c.offset[1], k = c.side;
        double s;
        if (grid.dim == 1) {
            s = sat[a + k] - sat[a];
        } else {
            s = sat[(a + k) * W + b + k] - sat[a * W + b + k] - sat[(a + k) * W + b] + sat[a * W + b];
        }
        return std::max(0.0, s) / static_cast<double>(cell_count(c));
    });
}

std::vector<double> mean_sharp_field(const GridFunction& f, CubeClass cls, const DyadicCube& domain) {
    return paint_sup(f.grid(), domain, cls, [&](const AlignedCube& c) { return mean_oscillation(f, c); });
}

std::vector<double> sup_inf_field(const Grid& grid, std::span<const double> g, CubeClass cls,
                                  const DyadicCube& domain) {
    if (g.size() != grid.cell_count()) throw Error(ErrorCode::InvalidArgument, "field size does not match grid");
    return paint_sup(grid, domain, cls, [&](const AlignedCube& c) {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t cell : cells_of(grid, c)) lo = std::min(lo, g[cell]);
        return lo;
    });
}

}  // namespace medosc
