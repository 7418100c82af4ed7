#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zgkh/chain.hpp"
#include "zgkh/cli.hpp"
#include "zgkh/pieces.hpp"
#include "zgkh/tqft.hpp"
#include "zgkh/zigzag.hpp"

namespace py = pybind11;
using namespace zgkh;

namespace {

FreeComplex complex_of(const std::string& kind, const std::string& source, int basepoint) {
    if (kind == "complex") return complex_from_json(nlohmann::json::parse(source));
    if (kind == "rational") return closure(graph_to_complex(zz(parse_rational(source))));
    PDCode pd = kind == "braid" ? parse_braid(parse_braid_word(source)) : parse_pd(source);
    return build_reduced_complex(pd, make_basepoint(pd, basepoint));
}

// JSON crosses the boundary as text; the Python side decodes it
std::string run_job(const std::string& command, const std::string& kind, const std::string& source,
                    const std::vector<std::string>& args, const std::string& emit, int basepoint) {
    cli::JobSpec job;
    job.command = command;
    job.args = args;
    job.emit = emit;
    job.basepoint = basepoint;
    job.json = true;
    if (kind == "pd") job.input = cli::JobSpec::Input::Pd;
    else if (kind == "braid") job.input = cli::JobSpec::Input::Braid;
    else if (kind == "rational") job.input = cli::JobSpec::Input::Rational;
    else if (kind == "complex") job.input = cli::JobSpec::Input::JsonComplex;
    job.source = source;
    cli::Outcome o = cli::run(job);
    return nlohmann::json{{"exit_code", o.exit_code}, {"report", o.report}}.dump();
}

}  // namespace

PYBIND11_MODULE(_zgkh, m) {
    m.doc() = "Z[G] Khovanov complexes, pieces and rational tangles";

    py::register_exception<Error>(m, "ZgkhError");

    m.def("run_job", &run_job, py::arg("command"), py::arg("kind") = "", py::arg("source") = "",
          py::arg("args") = std::vector<std::string>{}, py::arg("emit") = "graph", py::arg("basepoint") = -1);
    m.def(
        "complex_json",
        [](const std::string& kind, const std::string& source, int basepoint) {
            return to_json(complex_of(kind, source, basepoint)).dump();
        },
        py::arg("kind"), py::arg("source"), py::arg("basepoint") = -1);
    m.def(
        "u_G", [](const std::string& kind, const std::string& source) { return u_G(complex_of(kind, source, -1)); },
        py::arg("kind"), py::arg("source"));
    m.def(
        "lambda_bounds",
        [](const std::string& kind, const std::string& source) {
            LambdaBounds b = lambda_bounds(complex_of(kind, source, -1));
            return py::make_tuple(b.lower, b.upper ? py::object(py::int_(*b.upper)) : py::object(py::none()));
        },
        py::arg("kind"), py::arg("source"));
    m.def(
        "s_invariant",
        [](const std::string& kind, const std::string& source, int p) {
            return s_invariant(complex_of(kind, source, -1), p);
        },
        py::arg("kind"), py::arg("source"), py::arg("p") = 0);
    m.def("zigzag", [](const std::string& x) { return zz(parse_rational(x)).render(); }, py::arg("rational"));
    m.def("staircase_json", [](int n) { return to_json(staircase(n)).dump(); }, py::arg("n"));
    m.def("sha256_hex", &cli::sha256_hex);
}
