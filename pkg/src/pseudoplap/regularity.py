"""Empirical interior seminorms and the normalized regularity quotient.

Seminorms are exact maxima over all node pairs inside |x| <= r (an O(K^2)
scan, chunked; K stays desk-scale for the grids used here).  The regularity
quotient of an experiment is

    ratio = Lip_r(u) / (sup|u| + sup|f|^{1/(p-1)}),

which is invariant under the exact degree-(p-1) scaling of the equation;
the empirical constant for a family of runs sharing (p, N, r) is the max
ratio, the falsifiable proxy for a uniform interior estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField, interior_ball_nodes, interior_mask, node_coordinates
from .reporting import write_csv

_CHUNK = 512


def _pair_scan(u: ScalarField, r: float, exponent: float) -> float:
    grid = u.grid
    if not r < 1.0 - 2.0 * grid.spacing:
        raise ValueError(
            f"need r < 1 - 2h = {1.0 - 2.0 * grid.spacing:.6g} for an interior scan, got {r}"
        )
    idx = interior_ball_nodes(grid, r)
    if len(idx) < 2:
        raise ValueError(f"fewer than 2 nodes inside radius {r}")
    pts = node_coordinates(grid, idx).reshape(len(idx), -1)
    vals = u.values[tuple(idx.T)]
    if not np.isfinite(vals).all():
        raise ValueError("field has unset values inside the scan radius")
    best = 0.0
    for lo in range(0, len(idx), _CHUNK):
        hi = min(lo + _CHUNK, len(idx))
        diff = np.abs(vals[lo:hi, None] - vals[None, :])
        dist = np.sqrt(((pts[lo:hi, None, :] - pts[None, :, :]) ** 2).sum(-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            quot = diff / dist**exponent
        quot[dist == 0.0] = 0.0
        best = max(best, float(quot.max()))
    return best


def lipschitz_seminorm(u: ScalarField, r: float) -> float:
    """Max over node pairs in |x| <= r of |u(x) - u(y)| / |x - y|."""
    return _pair_scan(u, r, 1.0)


def holder_seminorm(u: ScalarField, r: float, gamma: float) -> float:
    """Max over node pairs in |x| <= r of |u(x) - u(y)| / |x - y|^gamma."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0,1), got {gamma}")
    return _pair_scan(u, r, gamma)


def normalize_solution(u: ScalarField, f: ScalarField, p: float):
    """Rescale (u, f) -> (v, f~) with scale s = sup|u| + sup|f|^{1/(p-1)}.

    Then sup|v| <= 1, sup|f~| <= 1, and operator residuals scale by s^{1-p}.
    """
    if not p > 2:
        raise ValueError(f"p must be > 2, got {p}")
    u_sup = u.sup_norm()
    f_sup = float(np.nanmax(np.abs(f.values[interior_mask(f.grid)])))
    s = u_sup + f_sup ** (1.0 / (p - 1.0))
    if s == 0.0:
        raise ValueError("both fields vanish; nothing to normalize")
    v = ScalarField(u.grid, u.values / s)
    ft = ScalarField(f.grid, f.values / s ** (p - 1.0))
    return v, ft


@dataclass(frozen=True)
class ExperimentRecord:
    """One solved (p, f, boundary) run with its measured norms and quotient."""

    p: float
    N: int
    r: float
    f_label: str
    u_sup: float
    f_sup: float
    lip_seminorm: float
    holder_seminorms: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = [self.u_sup, self.f_sup, self.lip_seminorm, *self.holder_seminorms.values()]
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("record entries must be finite")

    @property
    def ratio(self) -> float:
        return self.lip_seminorm / (self.u_sup + self.f_sup ** (1.0 / (self.p - 1.0)))


def estimate_constant(records) -> float:
    """Empirical uniform constant: the max ratio over records sharing (p, N, r)."""
    records = list(records)
    if not records:
        raise ValueError("need at least one record")
    key = (records[0].p, records[0].N, records[0].r)
    for rec in records[1:]:
        if (rec.p, rec.N, rec.r) != key:
            raise ValueError(
                f"records mix (p, N, r): {key} vs {(rec.p, rec.N, rec.r)}"
            )
    return max(rec.ratio for rec in records)


def records_to_csv(path, records, cfg_hash: str = "none") -> None:
    """Stable column order: p,N,r,f_label,u_sup,f_sup,lip_seminorm,ratio,holder_<g>..."""
    records = list(records)
    gammas = sorted({g for rec in records for g in rec.holder_seminorms})
    columns = ["p", "N", "r", "f_label", "u_sup", "f_sup", "lip_seminorm", "ratio"]
    columns += [f"holder_{g:g}" for g in gammas]
    rows = []
    for rec in records:
        row = [rec.p, rec.N, rec.r, rec.f_label, rec.u_sup, rec.f_sup,
               rec.lip_seminorm, rec.ratio]
        row += [rec.holder_seminorms.get(g) for g in gammas]
        rows.append(row)
    write_csv(path, columns, rows, cfg_hash)
