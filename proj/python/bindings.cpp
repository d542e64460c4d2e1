#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "canm/certificate.hpp"
#include "canm/cli.hpp"
#include "canm/doa.hpp"
#include "canm/error.hpp"
#include "canm/geometry.hpp"
#include "canm/io.hpp"
#include "canm/sdp_solver.hpp"
#include "canm/source_recovery.hpp"

namespace py = pybind11;
using namespace canm;

namespace {

py::object as_python(const io::Json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

IndexSet index_set(const std::vector<IndexSet::value_type>& indices, std::size_t n)
{
    return IndexSet::from_unsorted(indices, n);
}

SourceModel model(std::vector<double> taus, std::vector<double> powers, std::size_t n)
{
    SourceModel m;
    m.taus = std::move(taus);
    m.powers = std::move(powers);
    m.aperture = n;
    return m;
}

} // namespace

PYBIND11_MODULE(_canm, m)
{
    m.doc() = "Compressed positive atomic norm minimization";

    py::register_exception<Error>(m, "Error");
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

    m.def("atom", &atom, py::arg("tau"), py::arg("n"));
    m.def("toeplitz", &toeplitz, py::arg("x"));
    m.def("toeplitz_adjoint", &toeplitz_adjoint, py::arg("h"));
    m.def("psd_project", &psd_project, py::arg("h"));

    m.def("cantor_array", [](unsigned order) {
        const IndexSet c = cantor_array(order);
        return py::make_tuple(c.indices(), c.ambient());
    }, py::arg("order"), "Returns (indices, aperture).");
    m.def("difference_set", [](const std::vector<IndexSet::value_type>& indices, std::size_t n) {
        return difference_set(index_set(indices, n)).indices();
    }, py::arg("indices"), py::arg("n"));
    m.def("is_complete", [](const std::vector<IndexSet::value_type>& indices, std::size_t n) {
        return is_complete(index_set(indices, n));
    }, py::arg("indices"), py::arg("n"));

    m.def("certify", [](const std::vector<double>& taus, const std::vector<double>& amplitudes,
                        const std::vector<IndexSet::value_type>& compression,
                        const std::vector<IndexSet::value_type>& omega, std::size_t n) {
        return as_python(io::to_json(certify(taus, amplitudes, index_set(compression, n), index_set(omega, n), n)));
    }, py::arg("taus"), py::arg("amplitudes"), py::arg("compression"), py::arg("omega"), py::arg("n"));

    m.def("solve", [](std::size_t n, const std::vector<IndexSet::value_type>& omega, const ComplexVector& observed,
                      std::optional<std::vector<IndexSet::value_type>> compression, std::optional<double> lam,
                      std::optional<double> tol) {
        ProblemSpec spec;
        spec.n = n;
        spec.omega = index_set(omega, n);
        spec.observed = observed;
        if (compression) spec.compression = index_set(*compression, n);
        if (lam) {
            spec.mode = ProgramMode::Denoise;
            spec.lambda = *lam;
        }
        SolverConfig cfg;
        if (tol) cfg.eps_abs = cfg.eps_rel = *tol;
        SdpSolution sol;
        {
            py::gil_scoped_release release;
            sol = solve(spec, cfg);
        }
        py::dict out;
        out["status"] = to_string(sol.status);
        out["objective"] = sol.objective;
        out["dual_objective"] = sol.dual_objective;
        out["iterations"] = sol.iterations;
        out["x"] = sol.x_hat;
        out["q"] = sol.q_hat;
        out["s"] = sol.s_hat;
        return out;
    }, py::arg("n"), py::arg("omega"), py::arg("observed"), py::arg("compression") = py::none(),
       py::arg("lam") = py::none(), py::arg("tol") = py::none());

    m.def("vandermonde_decompose", [](const ComplexVector& x) {
        const SourceEstimate e = vandermonde_decompose(x);
        return py::make_tuple(e.taus, e.amplitudes);
    }, py::arg("x"), "Returns (taus, amplitudes).");

    m.def("run_doa", [](const std::vector<double>& taus, const std::vector<double>& powers, unsigned cantor_order,
                        std::size_t snapshots, double snr_db, std::uint64_t seed, std::optional<std::size_t> peak_count) {
        const IndexSet j = cantor_array(cantor_order);
        DoaConfig cfg;
        cfg.snapshots = snapshots;
        cfg.snr_db = snr_db;
        cfg.seed = seed;
        cfg.peak_count = peak_count;
        DoaResult r;
        {
            py::gil_scoped_release release;
            r = run_doa(model(taus, powers, j.ambient()), j, cfg);
        }
        py::dict out = as_python(io::to_json(r));
        out["dual_grid"] = r.dual_grid;
        out["dual_values"] = r.dual_values;
        return out;
    }, py::arg("taus"), py::arg("powers"), py::arg("cantor_order") = 4, py::arg("snapshots") = 100,
       py::arg("snr_db") = -5.0, py::arg("seed") = 1, py::arg("peak_count") = py::none());

    m.def("run_cli", [](const std::vector<std::string>& args) { return cli::run_cli(args); }, py::arg("args"),
          "Runs the command-line tool in-process and returns its exit code.");
    m.attr("__version__") = cli::version();
}
