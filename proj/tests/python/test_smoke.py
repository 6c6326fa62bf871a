"""End-to-end smoke tests for the Python bindings."""

import math

import pytest

try:
    import fracstep as fs
except ImportError:  # build tree: extension not packaged yet
    import _fracstep as fs


def test_graded_mesh():
    mesh = fs.build_graded(8, 1.0, 2.0, 0.25)
    assert mesh.levels() == 8
    assert mesh.nodes[0] == 0.0
    assert mesh.nodes[-1] == 1.0
    assert mesh.nodes[4] == pytest.approx(0.25)
    assert all(b > a for a, b in zip(mesh.nodes, mesh.nodes[1:]))
    assert mesh.ratio_bound_ok()


def test_custom_mesh_rejects_bad_nodes():
    with pytest.raises(Exception):
        fs.build_custom([0.0, 0.5, 0.4], 0.25)


def test_mesh_assumption_report():
    mesh = fs.build_graded(16, 1.0, 3.0, 0.25)
    rep = fs.validate_ma(mesh, 3.0, 100.0)
    assert rep.satisfied()
    assert rep.c_gamma_estimate >= 1.0


def test_kernel_row_properties():
    mesh = fs.build_graded(12, 1.0, 3.0, 0.35)
    row = fs.alikhanov_row(mesh, 0.7, 12)
    assert row.monotone()
    assert len(row.coeffs) == 12
    assert fs.discrete_caputo(row, [2.5] * 13) == pytest.approx(0.0)


def test_omega_weight():
    assert fs.omega_weight(1.0, 0.3) == pytest.approx(1.0)
    assert fs.omega_weight(0.5, 1.0) == pytest.approx(1.0 / math.sqrt(math.pi))


def test_complementary_row_bounds():
    mesh = fs.build_graded(16, 1.0, 2.0, 0.25)
    coeffs = fs.complementary_row(mesh, 0.5, 16)
    assert all(c >= 0.0 for c in coeffs)


def test_soe_accuracy():
    soe = fs.soe_build(0.5, 1e-12, 1e-4, 1.0)
    assert soe.max_relative_error() <= 1e-12
    assert soe.terms() < 400
    assert soe.eval(0.01) == pytest.approx(0.01 ** -0.5, rel=1e-11)


def test_subdiffusion_solve_and_error():
    p = fs.manufactured_subdiffusion(0.5)
    assert p.exact(0.5, 0.5, 1.0) == pytest.approx(3.0)
    assert fs.gamma_opt(p) == pytest.approx(4.0)
    e8 = fs.solve_e1(p, 8, 4.0, 8)
    e16 = fs.solve_e1(p, 16, 4.0, 8)
    assert e8 < 0.3
    assert e16 < e8


def test_diffwave_solution_history():
    p = fs.manufactured_diffwave(1.5)
    sol = fs.solve_graded(p, 8, 4.0 / 1.5, 8)
    assert sol.levels() == 8
    assert max(abs(v) for v in sol.v(0)) == 0.0
    assert sol.t(8) == pytest.approx(1.0)
    assert sol.e1(p) < 0.5
    # final level should approximate 3*sin(pi x)sin(pi y): check the center
    center = sol.u(8)[len(sol.u(8)) // 2]
    assert center == pytest.approx(3.0, rel=0.1)


def test_kernel_modes_agree():
    p = fs.manufactured_subdiffusion(0.7)
    direct = fs.solve_e1(p, 16, 2.0, 8, fs.KernelMode.direct)
    fast = fs.solve_e1(p, 16, 2.0, 8, fs.KernelMode.soe)
    assert direct == pytest.approx(fast, abs=1e-9)
