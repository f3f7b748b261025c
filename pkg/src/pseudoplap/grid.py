"""Uniform node-centered grids on [-1,1]^N with unit-ball masking and field I/O.

The grid always has an odd number of nodes per axis so the origin is a node.
Every node is classified exactly once as interior, boundary, or exterior:

* interior: in the open unit ball and all 2N axis neighbours in the closed ball
  (for cube-shaped domains: all coordinates strictly inside (-1, 1)),
* boundary: in the closed ball but not interior (the "boundary band" on which
  Dirichlet data is imposed),
* exterior: outside the closed ball.

Fields store one value per node; exterior nodes carry NaN as an explicit
"unset" marker, never zero, so that a stencil straying outside the domain
poisons the result instead of silently reading zeros.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class NodeClass(IntEnum):
    INTERIOR = 0
    BOUNDARY = 1
    EXTERIOR = 2


@dataclass(frozen=True)
class GridSpec:
    """Node-centered grid on [-1,1]^N, N in {1,2,3}, with n odd nodes per axis."""

    dimension: int
    nodes_per_axis: int
    shape: str = "ball"

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        n = self.nodes_per_axis
        if n < 9 or n % 2 == 0:
            raise ValueError(f"nodes_per_axis must be odd and >= 9, got {n}")
        if self.shape not in ("ball", "cube"):
            raise ValueError(f"shape must be 'ball' or 'cube', got {self.shape!r}")

    @property
    def spacing(self) -> float:
        return 2.0 / (self.nodes_per_axis - 1)

    @property
    def node_shape(self) -> tuple:
        return (self.nodes_per_axis,) * self.dimension

    @property
    def node_count(self) -> int:
        return self.nodes_per_axis**self.dimension

    def axis_coords(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.nodes_per_axis)


@functools.lru_cache(maxsize=64)
def _radius_squared(grid: GridSpec) -> np.ndarray:
    c = grid.axis_coords()
    r2 = np.zeros(grid.node_shape)
    for ax in range(grid.dimension):
        sh = [1] * grid.dimension
        sh[ax] = grid.nodes_per_axis
        r2 = r2 + (c**2).reshape(sh)
    r2.setflags(write=False)
    return r2


@functools.lru_cache(maxsize=64)
def _class_array(grid: GridSpec) -> np.ndarray:
    """Total node classification as an int8 array of NodeClass values."""
    n = grid.nodes_per_axis
    if grid.shape == "cube":
        interior = np.ones(grid.node_shape, dtype=bool)
        for ax in range(grid.dimension):
            idx = np.zeros(n, dtype=bool)
            idx[1:-1] = True
            sh = [1] * grid.dimension
            sh[ax] = n
            interior &= idx.reshape(sh)
        cls = np.where(interior, NodeClass.INTERIOR, NodeClass.BOUNDARY).astype(np.int8)
        cls.setflags(write=False)
        return cls

    r2 = _radius_squared(grid)
    in_closed = r2 <= 1.0
    in_open = r2 < 1.0
    neighbours_ok = np.ones(grid.node_shape, dtype=bool)
    for ax in range(grid.dimension):
        shifted = np.zeros_like(in_closed)
        src = [slice(None)] * grid.dimension
        dst = [slice(None)] * grid.dimension
        src[ax], dst[ax] = slice(1, None), slice(None, -1)
        shifted[tuple(dst)] = in_closed[tuple(src)]  # neighbour at +h; off-grid -> False
        neighbours_ok &= shifted
        shifted = np.zeros_like(in_closed)
        src[ax], dst[ax] = slice(None, -1), slice(1, None)
        shifted[tuple(dst)] = in_closed[tuple(src)]  # neighbour at -h
        neighbours_ok &= shifted
    interior = in_open & neighbours_ok
    cls = np.full(grid.node_shape, NodeClass.EXTERIOR, dtype=np.int8)
    cls[in_closed] = NodeClass.BOUNDARY
    cls[interior] = NodeClass.INTERIOR
    cls.setflags(write=False)
    return cls


def classify_nodes(grid: GridSpec) -> np.ndarray:
    """Classification of every node; entry values are NodeClass members."""
    return _class_array(grid)


def interior_mask(grid: GridSpec) -> np.ndarray:
    return _class_array(grid) == NodeClass.INTERIOR


def boundary_mask(grid: GridSpec) -> np.ndarray:
    return _class_array(grid) == NodeClass.BOUNDARY


def nonexterior_mask(grid: GridSpec) -> np.ndarray:
    return _class_array(grid) != NodeClass.EXTERIOR


def node_coordinates(grid: GridSpec, multi_index: np.ndarray) -> np.ndarray:
    """Coordinates of nodes given as a (k, N) integer multi-index array."""
    c = grid.axis_coords()
    return c[np.asarray(multi_index)]


def interior_ball_nodes(grid: GridSpec, r: float) -> np.ndarray:
    """Multi-indices (lexicographic) of all nodes with |x| <= r.

    Requires r < 1; every selected node must land in the interior class, which
    holds whenever r <= 1 - spacing.
    """
    if not r < 1.0:
        raise ValueError(f"radius must be < 1, got {r}")
    if r <= 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    sel = _radius_squared(grid) <= r * r
    idx = np.argwhere(sel)
    cls = _class_array(grid)
    if not (cls[sel] == NodeClass.INTERIOR).all():
        raise ValueError(
            f"ball of radius {r} reaches the boundary band; "
            f"use r <= 1 - h = {1.0 - grid.spacing:.6g}"
        )
    return idx


@dataclass
class ScalarField:
    """Node-valued function on a grid; exterior nodes hold NaN (unset)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.node_shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.node_shape}"
            )

    @classmethod
    def full(cls, grid: GridSpec, fill: float = np.nan) -> "ScalarField":
        return cls(grid, np.full(grid.node_shape, fill, dtype=float))

    @classmethod
    def from_function(cls, grid: GridSpec, fn, where: str = "nonexterior") -> "ScalarField":
        """Evaluate a vectorized callable fn(points (k,N)) -> (k,) on node subsets."""
        mask = {
            "nonexterior": nonexterior_mask(grid),
            "interior": interior_mask(grid),
            "boundary": boundary_mask(grid),
            "all": np.ones(grid.node_shape, dtype=bool),
        }[where]
        idx = np.argwhere(mask)
        pts = node_coordinates(grid, idx)
        vals = np.full(grid.node_shape, np.nan)
        vals[tuple(idx.T)] = np.asarray(fn(pts), dtype=float)
        return cls(grid, vals)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())

    def sup_norm(self, where: str = "nonexterior") -> float:
        mask = interior_mask(self.grid) if where == "interior" else nonexterior_mask(self.grid)
        if not mask.any():
            return 0.0
        return float(np.nanmax(np.abs(self.values[mask])))

    def validate_finite(self) -> None:
        """Check the core invariant: finite on interior and boundary nodes."""
        mask = nonexterior_mask(self.grid)
        bad = mask & ~np.isfinite(self.values)
        if bad.any():
            node = tuple(int(i) for i in np.argwhere(bad)[0])
            raise ValueError(f"non-finite value at non-exterior node {node}")


class FieldFormatError(ValueError):
    """Malformed field file; message carries path and 1-based line number."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_field(path, field: ScalarField) -> None:
    """Write one row per non-exterior node: x1,...,xN,value with 17 significant digits."""
    field.validate_finite()
    grid = field.grid
    idx = np.argwhere(nonexterior_mask(grid))  # argwhere is lexicographic in the multi-index
    pts = node_coordinates(grid, idx)
    vals = field.values[tuple(idx.T)]
    header = ",".join(f"x{i + 1}" for i in range(grid.dimension)) + ",value"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row, v in zip(pts.reshape(len(idx), -1), vals):
            fh.write(",".join(_fmt(c) for c in row) + "," + _fmt(v) + "\n")


def _infer_grid(dimension: int, coords: np.ndarray, path) -> GridSpec:
    axis_vals = np.unique(coords[:, 0])
    n = len(axis_vals)
    full = n**dimension
    # A full node set is a cube; for N=1 ball and cube classify identically.
    shape = "cube" if (len(coords) == full and dimension > 1) else "ball"
    try:
        grid = GridSpec(dimension, n, shape)
    except ValueError as exc:
        raise FieldFormatError(f"{path}: cannot infer a valid grid ({exc})") from exc
    return grid


def read_field(path, grid: GridSpec | None = None) -> ScalarField:
    """Read a field written by write_field; round-trips bitwise on finite values."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FieldFormatError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[-1] != "value" or any(h != f"x{i + 1}" for i, h in enumerate(header[:-1])):
        raise FieldFormatError(f"{path}:1: bad header {lines[0]!r}")
    dimension = len(header) - 1
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != dimension + 1:
            raise FieldFormatError(
                f"{path}:{lineno}: expected {dimension + 1} columns, got {len(parts)}"
            )
        try:
            nums = [float(t) for t in parts]
        except ValueError as exc:
            raise FieldFormatError(f"{path}:{lineno}: {exc}") from exc
        if not all(math.isfinite(v) for v in nums):
            raise FieldFormatError(f"{path}:{lineno}: non-finite entry in {line!r}")
        rows.append(nums)
    if not rows:
        raise FieldFormatError(f"{path}: header only, no field values")
    data = np.asarray(rows)
    coords, vals = data[:, :-1], data[:, -1]
    if grid is None:
        grid = _infer_grid(dimension, coords, path)
    elif grid.dimension != dimension:
        raise FieldFormatError(
            f"{path}: file has dimension {dimension}, grid expects {grid.dimension}"
        )
    h = grid.spacing
    idx = np.rint((coords + 1.0) / h).astype(int)
    if (idx < 0).any() or (idx >= grid.nodes_per_axis).any():
        lineno = int(np.argwhere(((idx < 0) | (idx >= grid.nodes_per_axis)).any(axis=1))[0]) + 2
        raise FieldFormatError(f"{path}:{lineno}: coordinate outside the grid")
    snapped = node_coordinates(grid, idx)
    bad = np.abs(snapped - coords).max(axis=1) > 1e-12
    if bad.any():
        lineno = int(np.argwhere(bad)[0]) + 2
        raise FieldFormatError(f"{path}:{lineno}: coordinate does not lie on the grid")
    values = np.full(grid.node_shape, np.nan)
    values[tuple(idx.T)] = vals
    field = ScalarField(grid, values)
    missing = nonexterior_mask(grid) & ~np.isfinite(values)
    if missing.any():
        node = tuple(int(i) for i in np.argwhere(missing)[0])
        raise FieldFormatError(f"{path}: missing value for non-exterior node {node}")
    return field
