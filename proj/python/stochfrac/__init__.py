"""Finite volume solver for 1-D degenerate fractional stochastic conservation laws."""

from ._core import (
    Grid1D,
    LatticeFunction,
    RateReport,
    RateRow,
    __version__,
    brownian_increments,
    bv_seminorm,
    clipped_burgers_flux,
    clipped_sigma,
    coarsen,
    d_lambda,
    estimate_rate,
    fractional_weight,
    godunov_flux,
    l1_distance,
    project_initial,
    run_error_study,
    solve,
    weight_quadrature,
    weight_table,
    weight_tail_sum,
)

__all__ = [
    "Grid1D",
    "LatticeFunction",
    "RateReport",
    "RateRow",
    "__version__",
    "brownian_increments",
    "bv_seminorm",
    "clipped_burgers_flux",
    "clipped_sigma",
    "coarsen",
    "d_lambda",
    "estimate_rate",
    "fractional_weight",
    "godunov_flux",
    "l1_distance",
    "project_initial",
    "run_error_study",
    "solve",
    "weight_quadrature",
    "weight_table",
    "weight_tail_sum",
]
