"""Radial barrier supersolution, the resulting sup-norm bound, and comparison checks.

With d(x) = 1 - |x| the barrier on the unit ball is

    b(x) = boundary_sup + M (1 - 1/(1 + d(x))),

which satisfies A_nondiv(b) <= -(p-1) f_sup away from the origin once

    M^{p-1} 2^{-2p} N^{1 - p/2} > f_sup.

The smallest such M gives the computable sup-norm bound
|u| <= boundary_sup + M/2 for solutions, and the monotone divergence-form
scheme obeys a discrete comparison principle that comparison_check probes
on solved field pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, ScalarField, boundary_mask, interior_mask, node_coordinates
from .grid import nonexterior_mask, _radius_squared
from .operators import apply_divergence, apply_nondivergence


def min_barrier_M(p: float, N: int, f_sup: float) -> float:
    """Near-minimal barrier strength (f_sup 2^{2p} N^{p/2-1})^{1/(p-1)} (1 + 1e-6).

    Returns 0 for f_sup = 0; callers must treat a vanishing right-hand side
    separately (any M > 0 works there).
    """
    if not p > 2:
        raise ValueError(f"p must be > 2, got {p}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if f_sup < 0:
        raise ValueError(f"f_sup must be >= 0, got {f_sup}")
    return (f_sup * 2.0 ** (2.0 * p) * N ** (p / 2.0 - 1.0)) ** (1.0 / (p - 1.0)) * (1.0 + 1e-6)


@dataclass(frozen=True)
class BarrierParams:
    M: float
    boundary_sup: float
    p: float
    N: int

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError(f"M must be positive, got {self.M}")
        if self.boundary_sup < 0:
            raise ValueError("boundary_sup must be >= 0")
        if not self.p > 2:
            raise ValueError(f"p must be > 2, got {self.p}")


def barrier_field(grid: GridSpec, params: BarrierParams) -> ScalarField:
    """Barrier evaluated at every non-exterior node; ball-shaped grids only."""
    if grid.shape != "ball":
        raise ValueError("the barrier uses the distance to the unit sphere; ball grids only")
    if grid.dimension != params.N:
        raise ValueError(f"params.N = {params.N} but grid dimension is {grid.dimension}")
    d = 1.0 - np.sqrt(_radius_squared(grid))
    vals = params.boundary_sup + params.M * (1.0 - 1.0 / (1.0 + d))
    vals = np.where(nonexterior_mask(grid), vals, np.nan)
    return ScalarField(grid, vals)


def verify_supersolution(grid: GridSpec, params: BarrierParams, f_sup: float,
                         exclusion_radius: float) -> float:
    """Max over interior nodes with |x| >= exclusion_radius of A_nondiv(b) + (p-1) f_sup.

    Non-positive up to discretization error; the barrier is not C^2 at the
    origin, hence the exclusion (at least 2h).
    """
    h = grid.spacing
    if exclusion_radius < 2.0 * h * (1.0 - 1e-12):
        raise ValueError(f"exclusion_radius must be >= 2h = {2 * h}, got {exclusion_radius}")
    b = barrier_field(grid, params)
    op = apply_nondivergence(b, params.p)
    sel = interior_mask(grid) & (_radius_squared(grid) >= exclusion_radius**2)
    if not sel.any():
        raise ValueError("no interior nodes outside the exclusion radius")
    return float((op.values[sel] + (params.p - 1.0) * f_sup).max())


def supersolution_tolerance(grid: GridSpec, params: BarrierParams, f_sup: float) -> float:
    """Discretization allowance 10 h^{1/2} scale for verify_supersolution."""
    margin_scale = params.M ** (params.p - 1.0) * 2.0 ** (-2.0 * params.p) \
        * params.N ** (1.0 - params.p / 2.0)
    scale = (params.p - 1.0) * max(f_sup, margin_scale)
    return 10.0 * np.sqrt(grid.spacing) * scale


def linf_bound_check(u: ScalarField, f: ScalarField, boundary_data, p: float,
                     solver_tol: float = 1e-6):
    """Explicit sup-norm bound |u| <= sup|boundary| + M/2 with M = min_barrier_M.

    Returns (bound, satisfied) where satisfied allows solver_tol slack.
    """
    grid = u.grid
    f_sup = float(np.nanmax(np.abs(f.values[interior_mask(grid)])))
    bidx = np.argwhere(boundary_mask(grid))
    bvals = np.asarray(boundary_data(node_coordinates(grid, bidx)), dtype=float)
    boundary_sup = float(np.abs(bvals).max()) if len(bvals) else 0.0
    bound = boundary_sup + 0.5 * min_barrier_M(p, grid.dimension, f_sup)
    satisfied = bool(u.sup_norm() <= bound + solver_tol)
    return bound, satisfied


@dataclass(frozen=True)
class ComparisonResult:
    premise_holds: bool
    conclusion_holds: bool
    operator_gap: float  # min over interior of A_div(u) - A_div(v)
    boundary_gap: float  # max over boundary of u - v
    interior_gap: float  # max over interior of u - v
    conclusion_tol: float


def comparison_check(u: ScalarField, v: ScalarField, p: float, tol: float) -> ComparisonResult:
    """Ordered operator values plus boundary ordering should order the fields.

    Premise: A_div(u) >= A_div(v) - tol on interior and u <= v + tol on the
    boundary band.  Conclusion: u <= v + tol' on interior, tol' scaling tol
    by the grid diameter in stencil-graph distance (slack for solver
    residuals; the exact discrete principle corresponds to tol = 0).
    """
    if u.grid != v.grid:
        raise ValueError("fields must share a grid")
    grid = u.grid
    au = apply_divergence(u, p)
    av = apply_divergence(v, p)
    imask = interior_mask(grid)
    bmask = boundary_mask(grid)
    operator_gap = float((au.values[imask] - av.values[imask]).min())
    boundary_gap = float((u.values[bmask] - v.values[bmask]).max())
    interior_gap = float((u.values[imask] - v.values[imask]).max())
    diam = grid.dimension * (grid.nodes_per_axis - 1)
    conclusion_tol = tol * diam
    premise = operator_gap >= -tol and boundary_gap <= tol
    conclusion = interior_gap <= conclusion_tol
    return ComparisonResult(premise, conclusion, operator_gap, boundary_gap,
                            interior_gap, conclusion_tol)
