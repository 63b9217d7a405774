#include "medosc/io.hpp"

#include "medosc/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace medosc {

namespace {

std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(s) + "'");
    return v;
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad fingerprint");
    return v;
}

template <class T>
T get_field(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
    }
}

DyadicCube cube_from_json(const json& j, int dim) {
    DyadicCube c;
    c.dim = dim;
    c.level = get_field<int>(j, "level");
    const json& idx = j.at("index");
    if (idx.is_array()) {
        c.index[0] = idx.at(0).get<std::uint32_t>();
        c.index[1] = idx.size() > 1 ? idx.at(1).get<std::uint32_t>() : 0;
    } else {
        c.index[0] = idx.get<std::uint32_t>();
    }
    return c;
}

// [level, index] pairs used by the shift format (1D).
json pair_json(const DyadicCube& c) { return json::array({c.level, c.index[0]}); }

DyadicCube pair_cube(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ParseError, "cube must be [level, index]");
    return DyadicCube{1, j.at(0).get<int>(), {j.at(1).get<std::uint32_t>(), 0}};
}

}  // namespace

FileFormat parse_format(std::string_view name) {
    if (name == "json") return FileFormat::Json;
    if (name == "csv") return FileFormat::Csv;
    throw Error(ErrorCode::InvalidArgument, "format must be 'json' or 'csv'");
}

FileFormat format_for_path(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? FileFormat::Csv : FileFormat::Json;
}

json number_or_inf(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

json cube_to_json(const DyadicCube& c) {
    json j;
    j["level"] = c.level;
    if (c.dim == 1)
        j["index"] = c.index[0];
    else
        j["index"] = json::array({c.index[0], c.index[1]});
    return j;
}

json function_to_json(const GridFunction& f) {
    const Grid& g = f.grid();
    json j;
    j["dim"] = g.dim;
    j["depth"] = g.depth;
    j["origin"] = g.dim == 1 ? json::array({g.origin[0]}) : json::array({g.origin[0], g.origin[1]});
    j["side"] = g.side;
    j["values"] = std::vector<double>(f.values().begin(), f.values().end());
    return j;
}

GridFunction function_from_json(const json& j) {
    Grid g;
    g.dim = get_field<int>(j, "dim");
    g.depth = get_field<int>(j, "depth");
    if (j.contains("origin")) {
        const auto o = j.at("origin").get<std::vector<double>>();
        for (std::size_t a = 0; a < o.size() && a < 2; ++a) g.origin[a] = o[a];
    }
    if (j.contains("side")) g.side = j.at("side").get<double>();
    validate(g);
    return GridFunction(g, get_field<std::vector<double>>(j, "values"));
}

std::string function_to_csv(const GridFunction& f) {
    const Grid& g = f.grid();
    std::string out = "# dim=" + std::to_string(g.dim) + " depth=" + std::to_string(g.depth) +
                      " origin=" + format_double(g.origin[0]) + "," + format_double(g.origin[1]) +
                      " side=" + format_double(g.side) + "\n";
    for (double v : f.values()) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

GridFunction function_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("#", 0) != 0)
        throw Error(ErrorCode::ParseError, "CSV function file must start with a '# dim=... depth=...' header");
    Grid g;
    bool have_dim = false, have_depth = false;
    std::istringstream header(line.substr(1));
    std::string tok;
    while (header >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "dim") {
            g.dim = static_cast<int>(parse_double(val));
            have_dim = true;
        } else if (key == "depth") {
            g.depth = static_cast<int>(parse_double(val));
            have_depth = true;
        } else if (key == "side") {
            g.side = parse_double(val);
        } else if (key == "origin") {
            const auto comma = val.find(',');
            g.origin[0] = parse_double(val.substr(0, comma));
            if (comma != std::string::npos) g.origin[1] = parse_double(val.substr(comma + 1));
        }
    }
    if (!have_dim || !have_depth) throw Error(ErrorCode::ParseError, "CSV header lacks dim or depth");
    validate(g);
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        values.push_back(parse_double(line));
    }
    return GridFunction(g, std::move(values));
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << text;
}

void write_function(const GridFunction& f, const std::string& path, FileFormat fmt) {
    write_text(path, fmt == FileFormat::Csv ? function_to_csv(f) : function_to_json(f).dump(2) + "\n");
}

GridFunction read_function(const std::string& path) {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '#') return function_from_csv(text);
    try {
        return function_from_json(json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "'" + path + "': " + e.what());
    }
}

json tree_to_json(const DecompositionTree& t) {
    json j;
    j["variant"] = std::string(to_string(t.variant));
    j["params"] = {{"s", t.params.s}, {"t", t.params.t}, {"delta", t.params.delta}};
    if (t.variant == Variant::V1) j["class"] = std::string(to_string(t.cube_class));
    j["grid"] = {{"dim", t.grid.dim}, {"depth", t.grid.depth}};
    j["root"] = cube_to_json(t.root);
    j["root_median"] = t.root_median;
    j["root_threshold"] = t.root_threshold;
    j["fingerprint"] = hex64(t.fingerprint);
    json gens = json::array();
    for (const auto& g : t.generations) {
        json cubes = json::array();
        for (const auto& c : g.cubes) {
            json cj = cube_to_json(c.cube);
            cj["alpha"] = c.alpha;
            cj["threshold"] = c.threshold_used;
            cj["parent_j"] = c.parent_index;
            cj["median"] = c.median;
            cj["own_threshold"] = c.threshold;
            cj["continues"] = c.continues;
            cubes.push_back(std::move(cj));
        }
        gens.push_back({{"cubes", std::move(cubes)}, {"omega_cells", g.omega_cells}});
    }
    j["generations"] = std::move(gens);
    return j;
}

DecompositionTree tree_from_json(const json& j) {
    try {
        DecompositionTree t;
        t.variant = parse_variant(get_field<std::string>(j, "variant"));
        const json& p = j.at("params");
        t.params.s = p.at("s").get<double>();
        t.params.t = p.at("t").get<double>();
        t.params.delta = p.value("delta", 1.0);
        t.cube_class = j.contains("class") ? parse_cube_class(j.at("class").get<std::string>()) : CubeClass::Dyadic;
        t.grid.dim = j.at("grid").at("dim").get<int>();
        t.grid.depth = j.at("grid").at("depth").get<int>();
        validate(t.grid);
        t.root = cube_from_json(j.at("root"), t.grid.dim);
        t.root_median = get_field<double>(j, "root_median");
        t.root_threshold = get_field<double>(j, "root_threshold");
        t.fingerprint = parse_hex64(get_field<std::string>(j, "fingerprint"));
        for (const auto& gj : j.at("generations")) {
            Generation g;
            g.omega_cells = gj.at("omega_cells").get<std::size_t>();
            for (const auto& cj : gj.at("cubes")) {
                StoppedCube c;
                c.cube = cube_from_json(cj, t.grid.dim);
                c.generation = static_cast<int>(t.generations.size()) + 1;
                c.alpha = cj.at("alpha").get<double>();
                c.threshold_used = cj.at("threshold").get<double>();
                c.parent_index = cj.at("parent_j").get<std::size_t>();
                c.median = cj.at("median").get<double>();
                c.threshold = cj.at("own_threshold").get<double>();
                c.continues = cj.at("continues").get<bool>();
                g.cubes.push_back(c);
            }
            t.generations.push_back(std::move(g));
        }
        // Rebuild the child links from parent indices.
        for (std::size_t v = 0; v < t.generations.size(); ++v) {
            for (std::size_t i = 0; i < t.generations[v].cubes.size(); ++i) {
                const std::size_t pj = t.generations[v].cubes[i].parent_index;
                if (v == 0) {
                    t.root_children.push_back(i);
                } else {
                    auto& parents = t.generations[v - 1].cubes;
                    if (pj >= parents.size()) throw Error(ErrorCode::ParseError, "parent_j out of range");
                    parents[pj].children.push_back(i);
                }
            }
        }
        t.root_continues = !t.root_children.empty();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("tree JSON: ") + e.what());
    }
}

json pointwise_to_json(const PointwiseReport& r, bool include_fields) {
    json j;
    j["ok"] = r.ok();
    j["max_ratio"] = number_or_inf(r.max_ratio);
    j["argmax_cell"] = r.argmax_cell;
    j["violation_count"] = r.violation_count;
    json vs = json::array();
    for (const auto& v : r.violations) {
        json chain = json::array();
        for (const auto& c : v.chain) chain.push_back(cube_to_json(c));
        vs.push_back({{"cell", v.cell}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"chain", std::move(chain)}});
    }
    j["violations"] = std::move(vs);
    if (include_fields) {
        j["lhs"] = r.lhs;
        j["rhs"] = r.rhs;
    }
    return j;
}

json sparsity_to_json(const SparsityReport& r, Variant v) {
    return {{"ok", r.ok(v)},
            {"nonoverlap", r.nonoverlap},
            {"nested", r.nested},
            {"per_cube", r.per_cube},
            {"first_packing", r.first_packing},
            {"geometric_packing", r.geometric_packing},
            {"packing_gating", v == Variant::V1},
            {"max_per_cube_ratio", r.max_per_cube_ratio},
            {"failures", r.failures}};
}

json shift_to_json(const HaarShift& h) {
    json j;
    j["tau"] = h.tau;
    j["C"] = h.C;
    j["max_level"] = h.max_level;
    json entries = json::array();
    for (const auto& e : h.entries)
        entries.push_back({{"Q", pair_json(e.q)}, {"Qp", pair_json(e.qp)}, {"Qpp", pair_json(e.qpp)}, {"a", e.a}});
    j["entries"] = std::move(entries);
    return j;
}

HaarShift shift_from_json(const json& j) {
    try {
        HaarShift h;
        h.tau = get_field<int>(j, "tau");
        h.C = get_field<double>(j, "C");
        h.max_level = j.value("max_level", 0);
        for (const auto& e : j.at("entries"))
            h.entries.push_back({pair_cube(e.at("Q")), pair_cube(e.at("Qp")), pair_cube(e.at("Qpp")),
                                 e.at("a").get<double>()});
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("shift JSON: ") + e.what());
    }
}

}  // namespace medosc
