#pragma once

#include "medosc/grid.hpp"
#include "medosc/maximal.hpp"
#include "medosc/oscillation.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace medosc {

enum class Variant { V1, V2 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

inline constexpr int kDefaultMaxGenerations = 64;

/// A cube Q^v_j selected by the stopping rule.
struct StoppedCube {
    DyadicCube cube;
    int generation = 1;
    // Index into the previous generation; generation 0 is the root alone.
    std::size_t parent_index = 0;
    // m_{f^{v-1}_j}(t, Q) = m_f(t, Q) - m_f(t, parent cube).
    double alpha = 0.0;
    // Threshold of the active parent cube that selected this one.
    double threshold_used = 0.0;
    // m_f(t, Q).
    double median = 0.0;
    // Threshold used when this cube was itself active. It is also the
    // envelope bound for the s/g function living on it.
    double threshold = 0.0;
    // True when the decomposition continues into this cube (index family I_2).
    bool continues = false;
    // Indices into the next generation, in spatial order.
    std::vector<std::size_t> children;
};

struct Generation {
    std::vector<StoppedCube> cubes;
    std::size_t omega_cells = 0;  // |Omega^v| in cells
};

struct DecompositionTree {
    Variant variant = Variant::V1;
    OscParams params;
    CubeClass cube_class = CubeClass::Aligned;  // threshold class (V1 only)
    Grid grid;
    DyadicCube root;
    double root_median = 0.0;
    double root_threshold = 0.0;
    bool root_continues = false;
    std::vector<std::size_t> root_children;
    std::vector<Generation> generations;  // generations[v - 1] holds generation v
    std::uint64_t fingerprint = 0;        // of the decomposed function

    std::size_t cube_count() const;

    /// Cells of Omega^v for v >= 1, sorted. Omega^0 is the root.
    std::vector<std::size_t> omega(int v) const;

    /// Stopped cubes (generation, index) whose cube contains `cell`, outermost first.
    std::vector<std::pair<int, std::size_t>> chain(std::size_t cell) const;

    const StoppedCube& at(int generation, std::size_t index) const {
        return generations[static_cast<std::size_t>(generation - 1)].cubes[index];
    }
};

/// First decomposition. Thresholds are 2 inf_{A} M#_{0,s,A} f over the active
/// cube A, computed with the given cube class.
DecompositionTree decompose_v1(const GridFunction& f, const DyadicCube& q0, const OscParams& p,
                               CubeClass cls = CubeClass::Aligned, int max_gen = kDefaultMaxGenerations);

/// Same, reusing a precomputed table (its s must equal p.s).
DecompositionTree decompose_v1(const SharpMaxTable& table, const GridFunction& f, const DyadicCube& q0,
                               const OscParams& p, int max_gen = kDefaultMaxGenerations);

/// Second decomposition. Thresholds are m_{|f - m_f(t,A)|}(t, A).
DecompositionTree decompose_v2(const GridFunction& f, const DyadicCube& q0, const OscParams& p,
                               int max_gen = kDefaultMaxGenerations);

struct PointwiseViolation {
    std::size_t cell = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    std::vector<DyadicCube> chain;  // stopped cubes containing the cell, outermost first
};

struct PointwiseReport {
    std::vector<double> lhs;  // |f(x) - m_f(t,Q0)| per cell of Q0, cells_of order
    std::vector<double> rhs;
    double max_ratio = 0.0;
    std::size_t argmax_cell = 0;
    std::size_t violation_count = 0;
    std::vector<PointwiseViolation> violations;  // first few, for diagnostics

    bool ok() const { return violation_count == 0; }
};

// Relative slack on the pointwise comparison; covers rounding in the
// right-hand-side sums only.
inline constexpr double kPointwiseRelTol = 1e-12;

/// Assembles the right side of the pointwise bound for every cell and compares.
PointwiseReport verify_pointwise(const DecompositionTree& tree, const GridFunction& f, CubeClass cls);
PointwiseReport verify_pointwise(const DecompositionTree& tree, const GridFunction& f, const SharpMaxTable& table);

struct SparsityReport {
    bool nonoverlap = true;          // (ii)
    bool nested = true;              // (iii)
    bool per_cube = true;            // (iv), including the root
    bool first_packing = true;       // sum |Q^1_j| <= (s/(1-t))|Q0|
    bool geometric_packing = true;   // |Omega^k| <= (s/(1-t))^k |Q0|
    double max_per_cube_ratio = 0.0; // max |Omega^{v+1} cap Q^v_j| / |Q^v_j|
    std::vector<std::string> failures;

    // (ii) and (iii) are structural and hold for both variants. The packing
    // bounds gate only the first decomposition.
    bool ok(Variant v) const {
        const bool structural = nonoverlap && nested;
        return v == Variant::V1 ? structural && per_cube && first_packing && geometric_packing : structural;
    }
};

SparsityReport verify_sparsity(const DecompositionTree& tree);

struct SparseSet {
    int generation = 1;
    std::size_t index = 0;
    DyadicCube cube;
    std::vector<std::size_t> cells;  // Q^v_j minus Omega^{v+1}, sorted
};

/// F^v_j = Q^v_j \ Omega^{v+1} for every stopped cube.
std::vector<SparseSet> sparse_sets(const DecompositionTree& tree);

}  // namespace medosc
