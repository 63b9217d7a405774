// Python bindings. Grid functions cross the boundary as numpy arrays: a
// length-2^L vector is a 1D function, a 2^L x 2^L array a 2D one. Reports and
// trees come back as the same dicts the CLI writes.

#include "medosc/error.hpp"
#include "medosc/harness.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>

namespace py = pybind11;
using namespace medosc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GridFunction to_function(const Array& a) {
    const auto buf = a.request();
    if (buf.ndim != 1 && buf.ndim != 2) throw Error(ErrorCode::UnsupportedDimension, "expected a 1D or 2D array");
    const auto side = static_cast<std::size_t>(buf.shape[0]);
    if (buf.ndim == 2 && static_cast<std::size_t>(buf.shape[1]) != side)
        throw Error(ErrorCode::InvalidArgument, "2D input must be square");
    if (side < 2 || !std::has_single_bit(side))
        throw Error(ErrorCode::InvalidArgument, "side length must be a power of two, at least 2");
    const Grid g{static_cast<int>(buf.ndim), std::countr_zero(side)};
    const auto* p = static_cast<const double*>(buf.ptr);
    return GridFunction(g, std::vector<double>(p, p + g.cell_count()));
}

Array to_array(const Grid& g, std::span<const double> v) {
    const auto side = static_cast<py::ssize_t>(g.cells_per_axis());
    Array out = g.dim == 1 ? Array({side}) : Array({side, side});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

OscParams params(double s, double t, double delta) { return OscParams{s, t, delta}; }

}  // namespace

PYBIND11_MODULE(_medosc, m) {
    m.doc() = "Median oscillation decompositions on dyadic grids";
    py::register_exception<Error>(m, "MedoscError", PyExc_ValueError);

    m.def("generator_kinds", &generator_kinds);

    m.def(
        "generate",
        [](const std::string& kind, int dim, int depth, std::uint64_t seed, std::optional<double> value,
           std::optional<double> amplitude) {
            GeneratorParams gp;
            gp.value = value;
            gp.amplitude = amplitude;
            const auto f = generate(kind, dim, depth, seed, gp);
            return to_array(f.grid(), f.values());
        },
        py::arg("kind"), py::arg("dim") = 1, py::arg("depth") = 6, py::arg("seed") = 1, py::arg("value") = py::none(),
        py::arg("amplitude") = py::none());

    m.def(
        "median", [](std::vector<double> v, double t) { return median_of(v, t); }, py::arg("values"), py::arg("t"),
        "Median at level t of a finite sample.");

    m.def(
        "best_constant_osc",
        [](std::vector<double> v, double s) {
            const auto b = best_constant_osc_of(v, s);
            return py::make_tuple(b.alpha, b.center);
        },
        py::arg("values"), py::arg("s"), "(alpha, center) minimising the s-oscillation over constants.");

    m.def(
        "sharp_max_field",
        [](const Array& a, double s, const std::string& cls) {
            const auto f = to_function(a);
            const SharpMaxTable table(f, s, parse_cube_class(cls));
            return to_array(f.grid(), table.field(f.grid().root()));
        },
        py::arg("f"), py::arg("s") = 0.25, py::arg("cls") = "aligned");

    m.def(
        "decompose",
        [](const Array& a, double s, double t, const std::string& variant, const std::string& cls) {
            const auto f = to_function(a);
            const OscParams p = params(s, t, 1.0);
            const auto tree = parse_variant(variant) == Variant::V1
                                  ? decompose_v1(f, f.grid().root(), p, parse_cube_class(cls))
                                  : decompose_v2(f, f.grid().root(), p);
            return to_py(tree_to_json(tree));
        },
        py::arg("f"), py::arg("s") = 0.25, py::arg("t") = 0.5, py::arg("variant") = "v1",
        py::arg("cls") = "aligned");

    m.def(
        "verify",
        [](const Array& a, double s, double t, const std::string& variant, const std::string& cls) {
            const auto f = to_function(a);
            const auto rep = check_decomposition(f, f.grid().root(), params(s, t, 1.0), parse_cube_class(cls),
                                                 parse_variant(variant));
            return to_py(rep.to_json(true));
        },
        py::arg("f"), py::arg("s") = 0.25, py::arg("t") = 0.5, py::arg("variant") = "v1",
        py::arg("cls") = "aligned", "Decomposition plus pointwise and sparsity checks.");

    m.def(
        "run_check",
        [](const std::string& name, double s, double t, double delta, const std::string& cls, int tau,
           std::uint64_t seed, const std::string& corpus, std::optional<std::size_t> count) {
            CheckConfig cfg;
            cfg.p = params(s, t, delta);
            cfg.cls = parse_cube_class(cls);
            cfg.tau = tau;
            cfg.seed = seed;
            cfg.corpus = corpus_preset(corpus, seed);
            if (count) cfg.corpus.count = *count;
            return to_py(run_check(name, cfg).to_json(true));
        },
        py::arg("name"), py::arg("s") = 0.25, py::arg("t") = 0.5, py::arg("delta") = 1.0, py::arg("cls") = "aligned",
        py::arg("tau") = 1, py::arg("seed") = 1, py::arg("corpus") = "thm1", py::arg("count") = py::none());

    m.def(
        "hilbert_transform",
        [](const Array& a) {
            const auto f = to_function(a);
            const auto h = hilbert_transform(f);
            return to_array(h.grid(), h.values());
        },
        py::arg("f"));

    m.def(
        "haar_coefficients", [](const Array& a) { return haar_coefficients(to_function(a)); }, py::arg("f"));
}
