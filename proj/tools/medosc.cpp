// medosc command-line front end.
//
// Exit status: 0 success, 1 a verification found violations, 2 bad
// configuration or unreadable input.

#include "medosc/harness.hpp"
#include "medosc/error.hpp"
#include "medosc/util.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace medosc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;

struct RunConfig {
    OscParams p;
    std::string variant = "v1";
    std::string cls = "aligned";
    int dim = 1;
    int depth = 4;
    std::uint64_t seed = 1;
    int tau = 1;
    std::string check;
    std::string in, out, tree;
    std::string format;
    bool deterministic = false;
    std::string kind = "random-uniform";
    std::optional<double> value, amplitude;
    std::optional<int> coarse_depth;
    std::string corpus;
    std::optional<std::size_t> count;
    int max_generations = kDefaultMaxGenerations;
    std::vector<std::string> which;
    ParamGrid sweep;
};

void add_params(CLI::App* cmd, RunConfig& rc, bool with_delta) {
    cmd->add_option("--s", rc.p.s, "outlier fraction s")->capture_default_str();
    cmd->add_option("--t", rc.p.t, "median level t, 1/2 <= t < 1 - s")->capture_default_str();
    if (with_delta) cmd->add_option("--delta", rc.p.delta, "exponent delta in (0, 1]")->capture_default_str();
    cmd->add_option("--class", rc.cls, "cube class for M#: dyadic | aligned")
        ->check(CLI::IsMember({"dyadic", "aligned"}))
        ->capture_default_str();
}

void add_output(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--out", rc.out, "output path (stdout when omitted)");
    cmd->add_option("--format", rc.format, "json | csv (default: from the --out extension)")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_flag("--deterministic", rc.deterministic, "omit timestamps and timings so reruns are byte-identical");
}

void add_corpus(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--corpus", rc.corpus, "named corpus: thm1 spike mixed random constant lemma51 hilbert");
    cmd->add_option("--count", rc.count, "override the corpus size");
    cmd->add_option("--seed", rc.seed, "seed for corpora and random operators")->capture_default_str();
    cmd->add_option("--tau", rc.tau, "Haar shift index for lemma5.1 / shift-chain")->capture_default_str();
}

void emit(const RunConfig& rc, const std::string& text) {
    if (rc.out.empty() || rc.out == "-")
        std::cout << text;
    else
        write_text(rc.out, text);
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

void emit_report(const RunConfig& rc, const CheckReport& rep) {
    json j = rep.to_json(rc.deterministic);
    if (!rc.deterministic) j["generated_at"] = timestamp();
    emit(rc, j.dump(2) + "\n");
}

std::string default_corpus(const std::string& check) {
    if (check == "thm3.1" || check == "thm3.1-haar") return "hilbert";
    if (check == "lemma5.1" || check == "shift-chain") return "lemma51";
    if (check == "props") return "mixed";
    return "thm1";
}

CheckConfig check_config(const RunConfig& rc) {
    CheckConfig cfg;
    cfg.p = rc.p;
    cfg.cls = parse_cube_class(rc.cls);
    cfg.tau = rc.tau;
    cfg.seed = rc.seed;
    cfg.corpus = corpus_preset(rc.corpus.empty() ? default_corpus(rc.check) : rc.corpus, rc.seed);
    if (rc.count) cfg.corpus.count = *rc.count;
    return cfg;
}

std::vector<CorpusItem> input_items(const RunConfig& rc) {
    return {CorpusItem{rc.in, "file", 0, read_function(rc.in)}};
}

// ---------------------------------------------------------------------------

int cmd_gen(const RunConfig& rc) {
    GeneratorParams gp;
    gp.value = rc.value;
    gp.amplitude = rc.amplitude;
    gp.coarse_depth = rc.coarse_depth;
    const GridFunction f = generate(rc.kind, rc.dim, rc.depth, rc.seed, gp);
    const FileFormat fmt = !rc.format.empty() ? parse_format(rc.format)
                           : rc.out.empty()   ? FileFormat::Json
                                              : format_for_path(rc.out);
    if (rc.out.empty() || rc.out == "-")
        std::cout << (fmt == FileFormat::Csv ? function_to_csv(f) : function_to_json(f).dump(2) + "\n");
    else
        write_function(f, rc.out, fmt);
    return kExitOk;
}

int cmd_decompose(const RunConfig& rc) {
    const GridFunction f = read_function(rc.in);
    const DyadicCube q0 = f.grid().root();
    const Variant v = parse_variant(rc.variant);
    const DecompositionTree tree = v == Variant::V1
                                       ? decompose_v1(f, q0, rc.p, parse_cube_class(rc.cls), rc.max_generations)
                                       : decompose_v2(f, q0, rc.p, rc.max_generations);
    emit(rc, tree_to_json(tree).dump(2) + "\n");
    return kExitOk;
}

int cmd_verify(const RunConfig& rc) {
    if (!rc.check.empty()) {
        const CheckConfig cfg = check_config(rc);
        CheckReport rep = rc.in.empty() ? run_check(rc.check, cfg) : run_check(rc.check, cfg, input_items(rc));
        if (!rc.in.empty()) rep.corpus = {{"file", rc.in}};
        emit_report(rc, rep);
        return rep.passed() ? kExitOk : kExitViolation;
    }
    if (rc.in.empty()) throw Error(ErrorCode::InvalidArgument, "verify needs --in or --check");
    const GridFunction f = read_function(rc.in);
    const CubeClass cls = parse_cube_class(rc.cls);
    CheckReport rep;
    if (rc.tree.empty()) {
        rep = check_decomposition(f, f.grid().root(), rc.p, cls, parse_variant(rc.variant), rc.in);
    } else {
        // A stored tree: check it against the function as given.
        const DecompositionTree tree = tree_from_json(json::parse(read_text(rc.tree)));
        const PointwiseReport pw = verify_pointwise(tree, f, cls);
        const SparsityReport sp = verify_sparsity(tree);
        rep.check = tree.variant == Variant::V1 ? "thm1.1" : "thm4.1";
        rep.params = {{"s", tree.params.s}, {"t", tree.params.t}, {"class", std::string(to_string(cls))}};
        rep.add({rc.tree, 0.0, 0.0, pw.max_ratio,
                 {{"pointwise", pointwise_to_json(pw)}, {"sparsity", sparsity_to_json(sp, tree.variant)}}});
        for (const auto& v : pw.violations) {
            json chain = json::array();
            for (const auto& c : v.chain) chain.push_back(cube_to_json(c));
            rep.violation({{"kind", "pointwise"}, {"cell", v.cell}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"chain", chain}});
        }
        if (!sp.ok(tree.variant)) rep.violation({{"kind", "sparsity"}, {"failures", sp.failures}});
    }
    rep.corpus = {{"file", rc.in}};
    emit_report(rc, rep);
    return rep.passed() ? kExitOk : kExitViolation;
}

int cmd_sweep(const RunConfig& rc) {
    const CheckConfig cfg = check_config(rc);
    const SweepResult res = constant_sweep(rc.check, rc.sweep, cfg);
    const FileFormat fmt = !rc.format.empty() ? parse_format(rc.format)
                           : rc.out.empty()   ? FileFormat::Json
                                              : format_for_path(rc.out);
    if (fmt == FileFormat::Csv) {
        emit(rc, sweep_to_csv(res));
    } else {
        emit_report(rc, res.report);
    }
    return res.report.passed() ? kExitOk : kExitViolation;
}

int cmd_props(const RunConfig& rc) {
    require_decomposition_params(rc.p);
    const CubeClass cls = parse_cube_class(rc.cls);
    RunConfig local = rc;
    local.check = "props";
    const CheckConfig cfg = check_config(local);
    std::vector<CorpusItem> items = rc.in.empty() ? build_corpus(cfg.corpus) : input_items(rc);

    CheckReport rep;
    if (rc.which.empty()) {
        rep = property_suite(items, rc.p, cls);
    } else {
        rep.check = "props";
        rep.params = {{"s", rc.p.s}, {"t", rc.p.t}, {"class", rc.cls}, {"which", rc.which}};
        for (const auto& item : items) {
            json detail = json::object();
            for (const auto& tl : run_properties(item.f, rc.p, cls, rc.which)) {
                detail[tl.name] = {{"checked", tl.checked}, {"violations", tl.violations},
                                   {"max_ratio", number_or_inf(tl.max_ratio)}};
                rep.record_constant(tl.name, tl.max_ratio);
                for (const auto& ex : tl.examples) {
                    json v = ex;
                    v["id"] = item.id;
                    v["property"] = tl.name;
                    rep.violation(std::move(v));
                }
            }
            rep.add({item.id, 0.0, 0.0, 0.0, detail});
        }
    }
    rep.params["seed"] = rc.seed;
    rep.corpus = rc.in.empty() ? corpus_to_json(cfg.corpus) : json{{"file", rc.in}};
    emit_report(rc, rep);
    return rep.passed() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Median-oscillation decompositions and inequality checks on dyadic grids.\n"
                 "Environment: OSC_THREADS caps the number of worker threads."};
    app.require_subcommand(1);
    RunConfig rc;

    auto* gen = app.add_subcommand("gen", "write a grid function");
    gen->add_option("--kind", rc.kind, "generator kind")->capture_default_str();
    gen->add_option("--dim", rc.dim, "dimension, 1 or 2")->capture_default_str();
    gen->add_option("--depth", rc.depth, "dyadic depth L (2^L cells per side)")->capture_default_str();
    gen->add_option("--seed", rc.seed, "generator seed")->capture_default_str();
    gen->add_option("--value", rc.value, "value for --kind constant");
    gen->add_option("--amplitude", rc.amplitude, "amplitude for step, spike, random-*, smooth-sine");
    gen->add_option("--coarse-depth", rc.coarse_depth, "depth of the random draw for random-coarse");
    add_output(gen, rc);

    auto* dec = app.add_subcommand("decompose", "decompose a function file and write the tree as JSON");
    dec->add_option("--in", rc.in, "function file (JSON or CSV)")->required();
    dec->add_option("--variant", rc.variant, "v1 (sharp-maximal thresholds) | v2 (oscillation thresholds)")
        ->check(CLI::IsMember({"v1", "v2"}))
        ->capture_default_str();
    dec->add_option("--max-generations", rc.max_generations, "abort beyond this many generations")
        ->capture_default_str();
    add_params(dec, rc, false);
    add_output(dec, rc);

    auto* ver = app.add_subcommand("verify", "check a decomposition or run a named check; exit 1 on violations");
    ver->add_option("--in", rc.in, "function file; replaces the corpus");
    ver->add_option("--tree", rc.tree, "stored tree JSON to verify against --in");
    ver->add_option("--check", rc.check, "thm1.1 thm4.1 thm2.1 thm3.1 thm3.1-haar lemma5.1 shift-chain props");
    ver->add_option("--variant", rc.variant, "variant when no --check is given")
        ->check(CLI::IsMember({"v1", "v2"}))
        ->capture_default_str();
    add_params(ver, rc, true);
    add_corpus(ver, rc);
    add_output(ver, rc);

    auto* swp = app.add_subcommand("sweep", "run a check over a parameter grid");
    swp->add_option("--check", rc.check, "check name")->required();
    swp->add_option("--s", rc.sweep.s, "comma-separated s values")->delimiter(',');
    swp->add_option("--t", rc.sweep.t, "comma-separated t values")->delimiter(',');
    swp->add_option("--delta", rc.sweep.delta, "comma-separated delta values")->delimiter(',');
    swp->add_option("--tau", rc.sweep.tau, "comma-separated tau values")->delimiter(',');
    swp->add_option("--depth", rc.sweep.depth, "comma-separated depths (overrides the corpus range)")->delimiter(',');
    swp->add_option("--class", rc.cls, "dyadic | aligned")->check(CLI::IsMember({"dyadic", "aligned"}));
    swp->add_option("--corpus", rc.corpus, "named corpus");
    swp->add_option("--count", rc.count, "override the corpus size");
    swp->add_option("--seed", rc.seed, "seed")->capture_default_str();
    add_output(swp, rc);

    auto* props = app.add_subcommand("props", "run the helper-inequality suite; exit 1 on exact violations");
    props->add_option("--in", rc.in, "function file; replaces the corpus");
    props->add_option("--which", rc.which, "comma-separated property names (default: all)")->delimiter(',');
    add_params(props, rc, false);
    props->add_option("--corpus", rc.corpus, "named corpus (default mixed)");
    props->add_option("--count", rc.count, "override the corpus size");
    props->add_option("--seed", rc.seed, "seed")->capture_default_str();
    add_output(props, rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*dec || *props) require_decomposition_params(rc.p);
        if (*ver && !rc.check.empty()) {
            if (rc.check == "thm3.1" || rc.check == "thm3.1-haar" || rc.check == "lemma5.1")
                require_sharp_s(rc.p.s);
            else
                require_decomposition_params(rc.p);
            if (rc.check == "thm2.1") require_delta(rc.p.delta);
        } else if (*ver) {
            require_decomposition_params(rc.p);
        }
        if (*gen) return cmd_gen(rc);
        if (*dec) return cmd_decompose(rc);
        if (*ver) return cmd_verify(rc);
        if (*swp) return cmd_sweep(rc);
        return cmd_props(rc);
    } catch (const Error& e) {
        std::cerr << "medosc: " << e.what() << "\n";
        return kExitConfig;
    } catch (const json::exception& e) {
        std::cerr << "medosc: ParseError: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "medosc: " << e.what() << "\n";
        return kExitConfig;
    }
}
