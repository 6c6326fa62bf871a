"""Nonuniform time-stepping solvers for 2D time-fractional evolution equations.

The heavy lifting lives in the C++ extension `_fracstep`; this package
re-exports its public surface.
"""

from ._fracstep import (  # noqa: F401
    Grid2D,
    KernelMode,
    KernelRow,
    MAReport,
    ProblemSpec,
    SoeApprox,
    Solution,
    TimeMesh,
    alikhanov_row,
    build_custom,
    build_graded,
    complementary_row,
    discrete_caputo,
    expected_order,
    gamma_opt,
    h1_norm,
    h1_semi,
    l2_norm,
    manufactured_diffwave,
    manufactured_subdiffusion,
    omega_weight,
    soe_build,
    solve_e1,
    solve_graded,
    validate_ma,
)

__all__ = [
    "Grid2D",
    "KernelMode",
    "KernelRow",
    "MAReport",
    "ProblemSpec",
    "SoeApprox",
    "Solution",
    "TimeMesh",
    "alikhanov_row",
    "build_custom",
    "build_graded",
    "complementary_row",
    "discrete_caputo",
    "expected_order",
    "gamma_opt",
    "h1_norm",
    "h1_semi",
    "l2_norm",
    "manufactured_diffwave",
    "manufactured_subdiffusion",
    "omega_weight",
    "soe_build",
    "solve_e1",
    "solve_graded",
    "validate_ma",
]

__version__ = "0.1.0"
