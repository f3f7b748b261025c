"""Closed-form and manufactured reference solutions, plus named f/boundary presets.

The 1D closed form solves (|u'|^{p-2} u')' = (p-1) c on (-1,1) with zero
endpoint values:

    u(x) = ((p-1) c)^{1/(p-1)} (|x|^q - 1) / q,   q = p/(p-1).

Summing copies per axis gives the separable reference u*(x) = sum_i w(x_i)
whose right-hand side is the constant N c; its trace supplies compatible
Dirichlet data on the cube.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, ScalarField, nonexterior_mask


def closed_form_1d(p: float, c: float = 1.0):
    """Returns (u, u') for the symmetric 1D problem with f = c > 0."""
    if not p > 2:
        raise ValueError(f"p must be > 2, got {p}")
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    q = p / (p - 1.0)
    amp = ((p - 1.0) * c) ** (1.0 / (p - 1.0))

    def u(x):
        x = np.asarray(x, dtype=float)
        return amp * (np.abs(x) ** q - 1.0) / q

    def du(x):
        x = np.asarray(x, dtype=float)
        return amp * np.abs(x) ** (1.0 / (p - 1.0)) * np.sign(x)

    return u, du


def separable_reference(p: float, N: int, c: float = 1.0):
    """Manufactured u*(x) = sum_i w(x_i); solves the equation with f = N c."""
    w, _ = closed_form_1d(p, c)

    def u_star(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return w(points).sum(axis=1)

    return u_star, N * c


def zero_boundary(points):
    points = np.atleast_2d(points)
    return np.zeros(len(points))


def constant_boundary(value: float):
    def fn(points):
        points = np.atleast_2d(points)
        return np.full(len(points), float(value))

    return fn


def separable_trace(p: float, c: float = 1.0):
    """Dirichlet data matching the separable reference on the boundary band."""
    w, _ = closed_form_1d(p, c)

    def fn(points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return w(points).sum(axis=1)

    return fn


def constant_field(grid: GridSpec, value: float) -> ScalarField:
    return ScalarField.from_function(grid, lambda pts: np.full(len(pts), float(value)))


def gaussian_field(grid: GridSpec, amp: float = 1.0, center=None, sigma: float = 0.3) -> ScalarField:
    if center is None:
        center = np.zeros(grid.dimension)
    center = np.asarray(center, dtype=float)

    def fn(pts):
        d2 = ((np.atleast_2d(pts) - center) ** 2).sum(axis=1)
        return amp * np.exp(-d2 / (2.0 * sigma**2))

    return ScalarField.from_function(grid, fn)


def checkerboard_field(grid: GridSpec, amp: float = 1.0) -> ScalarField:
    """Sign-alternating field amp * (-1)^(i1+...+iN) on non-exterior nodes."""
    parity = np.zeros(grid.node_shape, dtype=int)
    n = grid.nodes_per_axis
    for ax in range(grid.dimension):
        sh = [1] * grid.dimension
        sh[ax] = n
        parity = parity + np.arange(n).reshape(sh)
    vals = amp * np.where(parity % 2 == 0, 1.0, -1.0)
    out = np.where(nonexterior_mask(grid), vals, np.nan)
    return ScalarField(grid, out)


def radial_ramp_field(grid: GridSpec, amp: float = 1.0) -> ScalarField:
    def fn(pts):
        return amp * np.sqrt((np.atleast_2d(pts) ** 2).sum(axis=1))

    return ScalarField.from_function(grid, fn)


F_PRESETS = ("constant", "separable", "gaussian", "checkerboard", "radial_ramp")
BOUNDARY_PRESETS = ("zero", "constant", "separable_trace")


def make_f_field(grid: GridSpec, preset: str, value: float = 1.0, p: float = 3.0,
                 sigma: float = 0.3, center=None) -> ScalarField:
    if preset == "constant":
        return constant_field(grid, value)
    if preset == "separable":
        _, f_const = separable_reference(p, grid.dimension, value)
        return constant_field(grid, f_const)
    if preset == "gaussian":
        return gaussian_field(grid, amp=value, center=center, sigma=sigma)
    if preset == "checkerboard":
        return checkerboard_field(grid, amp=value)
    if preset == "radial_ramp":
        return radial_ramp_field(grid, amp=value)
    raise ValueError(f"unknown f preset {preset!r}; expected one of {F_PRESETS}")


def make_boundary(preset: str, value: float = 0.0, p: float = 3.0):
    if preset == "zero":
        return zero_boundary
    if preset == "constant":
        return constant_boundary(value)
    if preset == "separable_trace":
        return separable_trace(p, value if value > 0 else 1.0)
    raise ValueError(f"unknown boundary preset {preset!r}; expected one of {BOUNDARY_PRESETS}")


def sweep_presets(grid: GridSpec, rng) -> list:
    """Ten deterministic-shape f presets with small seeded jitter, for the
    regularity sweep.  Jitter (centers within +-0.05, amplitudes +-1%) keeps
    the max ratio stable across seeds while still exercising reseeding."""
    jit = lambda: 1.0 + 0.01 * (2.0 * rng.random() - 1.0)
    off = lambda: 0.05 * (2.0 * rng.random(grid.dimension) - 1.0)
    presets = [
        ("const_1", constant_field(grid, 1.0 * jit())),
        ("const_neg", constant_field(grid, -1.0 * jit())),
        ("const_4", constant_field(grid, 4.0 * jit())),
        ("gauss_center", gaussian_field(grid, amp=2.0 * jit(), center=off(), sigma=0.35)),
        ("gauss_offset", gaussian_field(grid, amp=-1.5 * jit(),
                                        center=0.3 * np.ones(grid.dimension) + off(),
                                        sigma=0.25)),
        ("gauss_narrow", gaussian_field(grid, amp=3.0 * jit(), center=off(), sigma=0.15)),
        ("checkerboard", checkerboard_field(grid, amp=0.5 * jit())),
        ("radial_ramp", radial_ramp_field(grid, amp=1.0 * jit())),
        ("separable", constant_field(grid, float(grid.dimension) * jit())),
        ("tilt", ScalarField.from_function(
            grid, lambda pts, a=jit(): a * (np.atleast_2d(pts)[:, 0] + 0.5))),
    ]
    return presets
