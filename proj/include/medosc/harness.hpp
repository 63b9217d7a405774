#pragma once

#include "medosc/decompose.hpp"
#include "medosc/generators.hpp"
#include "medosc/io.hpp"
#include "medosc/operators.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace medosc {

// ---------------------------------------------------------------------------
// Reports

struct InstanceResult {
    std::string id;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    json detail = json::object();
};

struct CheckReport {
    std::string check;
    json params = json::object();
    json corpus = json::object();
    std::vector<InstanceResult> instances;
    double max_ratio = 0.0;
    json violations = json::array();
    json constants = json::object();  // recorded empirical constants
    json notes = json::array();
    double runtime_seconds = 0.0;

    bool passed() const { return violations.empty(); }

    void add(InstanceResult r);
    void violation(json v) { violations.push_back(std::move(v)); }
    // Keeps the larger of the stored and the new value.
    void record_constant(const std::string& name, double value);
    // Appends instances, violations and notes; constants are maxed.
    void absorb(const CheckReport& other);

    /// Runtime is omitted when `deterministic` is set.
    json to_json(bool deterministic) const;
};

/// lhs / rhs with 0/0 -> 0 and positive/0 -> +inf.
double safe_ratio(double lhs, double rhs);

// ---------------------------------------------------------------------------
// Corpora

struct CorpusSpec {
    std::string name = "custom";
    std::vector<std::string> kinds;
    std::vector<int> dims{1};
    int min_depth = 2;
    int max_depth_1d = 6;
    int max_depth_2d = 4;
    std::size_t count = 0;
    std::uint64_t seed = 1;
};

struct CorpusItem {
    std::string id;
    std::string kind;
    std::uint64_t seed = 0;
    GridFunction f;
};

/// Instance i uses kind i mod |kinds|, cycles the dimensions and depths, and
/// draws its seed from mix64(mix64(seed) + i), so nearby corpus seeds do not
/// share instances.
std::vector<CorpusItem> build_corpus(const CorpusSpec& spec);

/// Named corpora: thm1, spike, mixed, random, constant, lemma51, hilbert.
CorpusSpec corpus_preset(std::string_view name, std::uint64_t seed = 1);
const std::vector<std::string>& corpus_presets();
json corpus_to_json(const CorpusSpec& spec);

// ---------------------------------------------------------------------------
// Single-function checks

/// Theorem 1.1 (V1) or Theorem 4.1 (V2): decomposition, pointwise bound and
/// sparsity. Pointwise violations and the gating sparsity conclusions are
/// violations; V2 packing results are recorded only.
CheckReport check_decomposition(const GridFunction& f, const DyadicCube& q0, const OscParams& p, CubeClass cls,
                                Variant variant, const std::string& id = "f");

/// Same, reusing a table built for f and p.s (also shared by the V2 pointwise bound).
CheckReport check_decomposition(const SharpMaxTable& table, const GridFunction& f, const DyadicCube& q0,
                                const OscParams& p, Variant variant, const std::string& id = "f");

/// Theorem 2.1: int |f - m_f(t,Q0)| w against int (M#)^delta M((M#)^{1-delta} w),
/// M over aligned cubes inside Q0, plus the sparse-set chain of the proof.
CheckReport check_thm21(const GridFunction& f, const Weight& w, const OscParams& p, const DyadicCube& q0,
                        CubeClass cls, const std::string& id = "f");

/// Theorem 3.1 for the Hilbert transform: M#_{0,s,Q0}(Tf) against Mf (global
/// form) and against sup_{Q} inf_Q Mf (local form).
CheckReport check_thm31_hilbert(const GridFunction& f, double s, const DyadicCube& q0, CubeClass cls,
                                const std::string& id = "f");

/// The T(1)=0 variant for a Haar shift, with the mean sharp maximal function
/// of f on the right side.
CheckReport check_thm31_haar(const HaarShift& h, const GridFunction& f, double s, const DyadicCube& q0,
                             CubeClass cls = CubeClass::Dyadic, const std::string& id = "f");

/// Lemma 5.1: (5.1) on every dyadic cube with a tau-th ancestor and (5.2) cellwise.
CheckReport check_lemma51(const HaarShift& h, const GridFunction& f, const DyadicCube& q0, double s,
                          const std::string& id = "f");

/// The substitution chain closing the Haar-shift application: V2 decomposition
/// of H f with dyadic M#, then (5.1)/(5.2)/(5.3) replaced by empirical constants.
CheckReport check_shift_chain(const GridFunction& f, const OscParams& p, const HaarShift& h,
                              const DyadicCube& q0, const std::string& id = "f");

// ---------------------------------------------------------------------------
// Property suite

struct PropertyTally {
    std::string name;
    bool exact = true;  // zero-tolerance property (else a recorded constant)
    std::size_t checked = 0;
    std::size_t violations = 0;
    double max_ratio = 0.0;
    json examples = json::array();  // first few violations
};

/// Property names: 1.2, 1.4, 1.7, 3.4, 3.5, 4.1, 4.4, 5.3, E-in-Omega.
const std::vector<std::string>& property_names();

/// Runs the selected properties (all when `which` is empty) over every dyadic
/// cube of f.
std::vector<PropertyTally> run_properties(const GridFunction& f, const OscParams& p, CubeClass cls,
                                          const std::vector<std::string>& which = {});

CheckReport property_suite(const std::vector<CorpusItem>& corpus, const OscParams& p, CubeClass cls);

// ---------------------------------------------------------------------------
// Corpus runners and sweeps

struct CheckConfig {
    OscParams p;
    CubeClass cls = CubeClass::Aligned;
    int tau = 1;
    std::uint64_t seed = 1;
    CorpusSpec corpus;
};

/// Check names: thm1.1, thm4.1, thm2.1, thm3.1, thm3.1-haar, lemma5.1, shift-chain, props.
const std::vector<std::string>& check_names();

/// Runs a named check over the given items. Throws UnknownCheck.
CheckReport run_check(std::string_view name, const CheckConfig& cfg, const std::vector<CorpusItem>& items);
CheckReport run_check(std::string_view name, const CheckConfig& cfg);

struct ParamGrid {
    std::vector<double> s;
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<int> tau;
    std::vector<int> depth;  // overrides the corpus depth range when set
};

struct SweepRow {
    double s, t, delta;
    int tau, depth;
    std::string instance;
    double lhs, rhs, ratio;
};

struct SweepResult {
    CheckReport report;  // merged over all grid points
    std::vector<SweepRow> rows;
};

SweepResult constant_sweep(std::string_view check, const ParamGrid& grid, const CheckConfig& base);
std::string sweep_to_csv(const SweepResult& r);

}  // namespace medosc
