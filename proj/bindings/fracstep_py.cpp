#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracstep/harness.hpp"
#include "fracstep/kernels.hpp"
#include "fracstep/soe.hpp"
#include "fracstep/spatial.hpp"
#include "fracstep/steppers.hpp"
#include "fracstep/timegrid.hpp"

namespace py = pybind11;
using namespace fracstep;

PYBIND11_MODULE(_fracstep, m) {
    m.doc() = "Nonuniform time-stepping solvers for fractional evolution equations";

    py::class_<TimeMesh>(m, "TimeMesh")
        .def(py::init<std::vector<double>, double>(), py::arg("nodes"), py::arg("theta"))
        .def_property_readonly("nodes", &TimeMesh::nodes)
        .def_property_readonly("steps", &TimeMesh::steps)
        .def_property_readonly("ratios", &TimeMesh::ratios)
        .def_property_readonly("offset_nodes", &TimeMesh::offset_nodes)
        .def_property_readonly("theta", &TimeMesh::theta)
        .def_property_readonly("horizon", &TimeMesh::horizon)
        .def("levels", &TimeMesh::levels)
        .def("max_ratio", &TimeMesh::max_ratio)
        .def("ratio_bound_ok", &TimeMesh::ratio_bound_ok);

    m.def("build_graded", &build_graded, py::arg("N"), py::arg("T"), py::arg("gamma"),
          py::arg("theta"));
    m.def("build_custom", &build_custom, py::arg("nodes"), py::arg("theta"));

    py::class_<MAReport>(m, "MAReport")
        .def_readonly("gamma", &MAReport::gamma)
        .def_readonly("c_gamma_estimate", &MAReport::c_gamma_estimate)
        .def_readonly("step_bound_ok", &MAReport::step_bound_ok)
        .def_readonly("node_growth_ok", &MAReport::node_growth_ok)
        .def_readonly("ratio_decay_ok", &MAReport::ratio_decay_ok)
        .def("satisfied", &MAReport::satisfied);
    m.def("validate_ma", &validate_ma, py::arg("mesh"), py::arg("gamma"),
          py::arg("ceiling") = 10.0);

    m.def("omega_weight", &omega_weight, py::arg("mu"), py::arg("t"));
    py::class_<KernelRow>(m, "KernelRow")
        .def_readonly("n", &KernelRow::n)
        .def_readonly("beta", &KernelRow::beta)
        .def_readonly("coeffs", &KernelRow::coeffs)
        .def("monotone", &KernelRow::monotone);
    m.def("alikhanov_row", &alikhanov_row, py::arg("mesh"), py::arg("beta"), py::arg("n"));
    m.def("discrete_caputo", [](const KernelRow& row, const std::vector<double>& hist) {
        return discrete_caputo(row, std::span<const double>(hist.data(), hist.size()));
    });
    m.def("complementary_row", [](const TimeMesh& mesh, double beta, int n) {
        KernelTable table(mesh, beta);
        return complementary_row(table, n).coeffs;
    });

    py::class_<SoeApprox>(m, "SoeApprox")
        .def_readonly("beta", &SoeApprox::beta)
        .def_readonly("epsilon", &SoeApprox::epsilon)
        .def_readonly("delta_t", &SoeApprox::delta_t)
        .def_readonly("nodes", &SoeApprox::nodes)
        .def_readonly("weights", &SoeApprox::weights)
        .def("terms", &SoeApprox::terms)
        .def("eval", &SoeApprox::eval)
        .def("max_relative_error", &SoeApprox::max_relative_error, py::arg("samples") = 2000);
    m.def("soe_build", &soe_build, py::arg("beta"), py::arg("epsilon"), py::arg("delta_t"),
          py::arg("T"));

    py::class_<Grid2D>(m, "Grid2D")
        .def(py::init([](int mx, int my) { return Grid2D(mx, my, Domain{}); }), py::arg("Mx"),
             py::arg("My"))
        .def_readonly("Mx", &Grid2D::Mx)
        .def_readonly("My", &Grid2D::My)
        .def_readonly("hx", &Grid2D::hx)
        .def_readonly("hy", &Grid2D::hy)
        .def("interior", &Grid2D::interior);
    m.def("l2_norm", &l2_norm);
    m.def("h1_semi", &h1_semi);
    m.def("h1_norm", &h1_norm);

    py::enum_<KernelMode>(m, "KernelMode")
        .value("direct", KernelMode::Direct)
        .value("soe", KernelMode::Soe);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("alpha", &ProblemSpec::alpha)
        .def("beta", &ProblemSpec::beta)
        .def("theta", &ProblemSpec::theta)
        .def("exact", [](const ProblemSpec& p, double x, double y, double t) {
            if (!p.exact) throw std::runtime_error("no exact solution attached");
            return (*p.exact)(x, y, t);
        });
    m.def("manufactured_subdiffusion", &manufactured_subdiffusion, py::arg("alpha"));
    m.def("manufactured_diffwave", &manufactured_diffwave, py::arg("alpha"));
    m.def("gamma_opt", &gamma_opt);
    m.def("expected_order", &expected_order);

    // owns the mesh and grid the history references
    struct Solution {
        std::shared_ptr<TimeMesh> mesh;
        std::shared_ptr<Grid2D> grid;
        SolutionHistory hist;
    };
    py::class_<Solution>(m, "Solution")
        .def("u", [](const Solution& s, int n) { return s.hist.u(n); })
        .def("v", [](const Solution& s, int n) { return s.hist.v(n); })
        .def("levels", [](const Solution& s) { return s.mesh->levels(); })
        .def("t", [](const Solution& s, int n) { return s.mesh->t(n); })
        .def("e1", [](const Solution& s, const ProblemSpec& p, bool semi) {
            return measure_e1(s.hist, p, semi ? H1Mode::Semi : H1Mode::Full);
        }, py::arg("problem"), py::arg("seminorm") = false);

    m.def(
        "solve_graded",
        [](const ProblemSpec& p, int N, double gamma, int M, KernelMode mode) {
            Solution s;
            s.mesh = std::make_shared<TimeMesh>(build_graded(N, p.T, gamma, p.theta()));
            s.grid = std::make_shared<Grid2D>(M, M, p.dom);
            s.hist = solve(p, *s.mesh, *s.grid, SolverOptions{}, mode);
            return s;
        },
        "Solve on a graded mesh and return the full history", py::arg("problem"), py::arg("N"),
        py::arg("gamma"), py::arg("M"), py::arg("kernel") = KernelMode::Direct);
    m.def(
        "solve_e1",
        [](const ProblemSpec& p, int N, double gamma, int M, KernelMode mode, bool semi) {
            TimeMesh mesh = build_graded(N, p.T, gamma, p.theta());
            Grid2D grid(M, M, p.dom);
            SolutionHistory h = solve(p, mesh, grid, SolverOptions{}, mode);
            return measure_e1(h, p, semi ? H1Mode::Semi : H1Mode::Full);
        },
        "Solve on a graded mesh and return the max-in-time discrete H1 error",
        py::arg("problem"), py::arg("N"), py::arg("gamma"), py::arg("M"),
        py::arg("kernel") = KernelMode::Direct, py::arg("seminorm") = false);
}
