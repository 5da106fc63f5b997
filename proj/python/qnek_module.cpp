// Python bindings for the core operations: q-special functions, partitions
// and Nekrasov factors, block evaluation, tau functions, and the suite runner.

#include "qnek/blocks.hpp"
#include "qnek/lax.hpp"
#include "qnek/report.hpp"
#include "qnek/suite.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qnek;

PYBIND11_MODULE(_qnek, m) {
    m.doc() = "q-deformed conformal blocks, tau functions, and identity checks";

    py::register_exception<ResonanceError>(m, "ResonanceError");

    py::class_<QBase>(m, "QBase")
        .def(py::init<cplx>(), py::arg("q"))
        .def_readonly("q", &QBase::q)
        .def_readonly("log_q", &QBase::log_q)
        .def("pow", &QBase::pow, py::arg("u"));

    m.def("q_pochhammer", &q_pochhammer, py::arg("a"), py::arg("n"), py::arg("base"));
    m.def("q_pochhammer_inf",
          [](cplx a, const QBase& b) { return q_pochhammer_inf(a, b); },
          py::arg("a"), py::arg("base"));
    m.def("q_number", &q_number, py::arg("u"), py::arg("base"));
    m.def("q_gamma", [](cplx u, const QBase& b) { return q_gamma(u, b); },
          py::arg("u"), py::arg("base"));
    m.def("q_barnes", [](cplx u, const QBase& b) { return q_barnes(u, b); },
          py::arg("u"), py::arg("base"));
    m.def("theta_q", [](cplx x, const QBase& b) { return theta_q(x, b); },
          py::arg("x"), py::arg("base"));
    m.def("theta", [](cplx u, const QBase& b) { return theta(u, b); },
          py::arg("u"), py::arg("base"));

    py::class_<Partition>(m, "Partition")
        .def(py::init<>())
        .def(py::init<std::vector<int>>(), py::arg("parts"))
        .def_readonly("parts", &Partition::parts)
        .def("size", &Partition::size)
        .def("length", &Partition::length)
        .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; });

    m.def("conjugate", &conjugate, py::arg("la"));
    m.def("nekrasov_factor", &nekrasov_factor,
          py::arg("la"), py::arg("mu"), py::arg("u"), py::arg("base"));
    m.def("nekrasov_factor_qexp", &nekrasov_factor_qexp,
          py::arg("la"), py::arg("mu"), py::arg("w"), py::arg("base"));
    m.def("enumerate_tuples", &enumerate_tuples, py::arg("N"), py::arg("max_total"));

    py::class_<Cutoffs>(m, "Cutoffs")
        .def(py::init<>())
        .def_readwrite("max_instanton", &Cutoffs::max_instanton)
        .def_readwrite("series_order", &Cutoffs::series_order)
        .def_readwrite("hypergeom_kmax", &Cutoffs::hypergeom_kmax);

    py::class_<BlockParams>(m, "BlockParams")
        .def(py::init<>())
        .def_readwrite("N", &BlockParams::N)
        .def_readwrite("thetas", &BlockParams::thetas)
        .def_readwrite("sigmas", &BlockParams::sigmas)
        .def_readwrite("point_logs", &BlockParams::point_logs)
        .def("check", &BlockParams::check);

    m.def("conformal_block", &conformal_block,
          py::arg("params"), py::arg("cutoffs"), py::arg("base"));
    m.def("connection_matrix", &connection_matrix, py::arg("N"), py::arg("theta1"),
          py::arg("sigma2"), py::arg("sigma0"), py::arg("u"), py::arg("base"),
          "row-major N x N list; entry (j,i) relates the i-th ascending to the "
          "j-th descending expansion");

    py::class_<LatticeWindow>(m, "LatticeWindow")
        .def(py::init<>())
        .def_readwrite("radius", &LatticeWindow::radius);

    py::class_<LaxParams>(m, "LaxParams")
        .def(py::init<>())
        .def_readwrite("N", &LaxParams::N)
        .def_readwrite("m", &LaxParams::m)
        .def_readwrite("theta_inf", &LaxParams::theta_inf)
        .def_readwrite("theta_0", &LaxParams::theta_0)
        .def_readwrite("thetas", &LaxParams::thetas)
        .def_readwrite("sigmas", &LaxParams::sigmas)
        .def_readwrite("s", &LaxParams::s)
        .def_readwrite("t", &LaxParams::t);

    m.def("validate", &validate, py::arg("params"), py::arg("base"));
    m.def("tau", &tau, py::arg("params"), py::arg("window"), py::arg("cutoffs"),
          py::arg("base"));
    m.def("fundamental_solution", &fundamental_solution, py::arg("chart"),
          py::arg("log_x"), py::arg("params"), py::arg("window"), py::arg("cutoffs"),
          py::arg("base"), "row-major N x N matrix of one chart at one point");

    py::class_<VerificationReport>(m, "VerificationReport")
        .def_readonly("id", &VerificationReport::id)
        .def_readonly("settings", &VerificationReport::settings)
        .def_readonly("max_residual", &VerificationReport::max_residual)
        .def_readonly("tolerance", &VerificationReport::tolerance)
        .def_readonly("pass_", &VerificationReport::pass)
        .def_readonly("skipped", &VerificationReport::skipped)
        .def_readonly("wall_time", &VerificationReport::wall_time)
        .def("outcome", &VerificationReport::outcome);

    py::class_<SuiteConfig>(m, "SuiteConfig")
        .def(py::init<>())
        .def_readwrite("seed", &SuiteConfig::seed)
        .def_readwrite("cutoff", &SuiteConfig::cutoff)
        .def_readwrite("lax_cutoff", &SuiteConfig::lax_cutoff)
        .def_readwrite("radius", &SuiteConfig::radius)
        .def_readwrite("tol_scale", &SuiteConfig::tol_scale);

    m.def("default_suite_config", &default_suite_config);
    m.def("run_suite", &run_suite, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("reports_to_json", &reports_to_json, py::arg("reports"),
          py::arg("include_timings"));
    m.def("reports_to_csv", &reports_to_csv, py::arg("reports"),
          py::arg("include_timings"));
}
