"""Regime parameter selectors and the empirical scaffold for the eigenvalue claims.

Four regimes cover {Hölder, Lipschitz} x {2 < p <= 4, p >= 4}.  Each selects
a modulus (s^gamma, or s - omega0 s^{1+tau}), an auxiliary exponent eps for
p > 4, a smallness threshold delta_N, and the three exponents tau_hat, tau1,
tau2 with tau1, tau2 < tau_hat.  The claims scaffold builds, at x = xbar - ybar,
the gradient triple

    q   = M w'(|x|) x/|x|,   qx = q + 2M (xbar - x0),   qy = q - 2M (ybar - x0),

draws a feasible doubling pair (X, Y), and reports three dimensionless ratios

    ratio1 = lambda_1(M^{p-2} Th (X+Y) Th) / (M^{p-1} |x|^{-tau_hat})   (should be < 0),
    ratio2 = max_{i>=2} lambda_i(...)      / (M^{p-1} |x|^{-tau1})      (bounded above),
    ratio3 = [||qx|^{p-2}-|q|^{p-2}| |X| + ||qy|^{p-2}-|q|^{p-2}| |Y|]
                                           / (M^{p-1} |x|^{-tau2})      (bounded above).

The unnamed constants multiplying these scales are never quantified, so the
checks are empirical: sign, caps, and drift across scales rather than fixed
constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eig import jacobi_eigh, spectral_norm
from .jets import build_jet_matrices, check_eq_n_epsilon, feasible_pair_sample, index_set
from .moduli import HolderModulus, LipschitzModulus, Modulus

REGIMES = ("holder_small_p", "holder_large_p", "lipschitz_small_p", "lipschitz_large_p")

DEFAULT_GAMMA = {"holder_small_p": 0.5, "holder_large_p": 0.8}
DEFAULT_REGIME_P = {
    "holder_small_p": 3.0,
    "holder_large_p": 5.0,
    "lipschitz_small_p": 2.6,
    "lipschitz_large_p": 6.0,
}


@dataclass(frozen=True)
class RegimeParams:
    regime: str
    p: float
    N: int
    gamma: float
    tau: float | None
    omega0: float | None
    eps: float | None
    delta_N: float
    tau_hat: float
    tau1: float
    tau2: float

    def modulus(self) -> Modulus:
        if self.regime.startswith("holder"):
            return HolderModulus(self.gamma)
        return LipschitzModulus(self.tau, self.omega0)

    def exponents_ordered(self) -> bool:
        return self.tau1 < self.tau_hat and self.tau2 < self.tau_hat


def regime_params(regime: str, p: float, N: int, gamma: float | None = None) -> RegimeParams:
    """Concrete admissible parameters for one regime; rejects regime/p mismatches."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if N not in (1, 2, 3):
        raise ValueError(f"N must be 1, 2 or 3, got {N}")
    small = regime.endswith("small_p")
    if small and not 2.0 < p <= 4.0:
        raise ValueError(f"{regime} requires 2 < p <= 4, got p = {p}")
    if not small and not p >= 4.0:
        raise ValueError(f"{regime} requires p >= 4, got p = {p}")

    if regime.startswith("holder"):
        if gamma is None:
            gamma = DEFAULT_GAMMA[regime]
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must be in (0,1), got {gamma}")
        tau = omega0 = None
        if small:
            eps = None
            tau_hat = (1.0 - gamma) * (p - 2.0) + 2.0 - gamma
            tau2 = (1.0 - gamma) * max(p - 3.0, 0.0) + 2.0 - gamma
            delta_n = (gamma / 8.0) ** (1.0 / (1.0 - gamma))
        else:
            eps = (1.0 - gamma) / (2.0 * (p - 4.0)) if p > 4.0 else 0.5
            tau_hat = (1.0 - gamma) * (p - 2.0) + 2.0 - gamma - (p - 4.0) * eps
            tau2 = (1.0 - gamma) * (p - 3.0) + 2.0 - gamma
            delta_n = math.exp(
                (-math.log(2.0 * N * (4.0 - gamma)) + math.log(1.0 - gamma)) / (2.0 * eps)
            )
        tau1 = (1.0 - gamma) * (p - 2.0)
        return RegimeParams(regime, p, N, gamma, tau, omega0, eps, delta_n,
                            tau_hat, tau1, tau2)

    if gamma is not None:
        raise ValueError("gamma is selected internally for the Lipschitz regimes")
    if small:
        m = min(0.5, (p - 2.0) / 2.0)
        tau = m / 2.0
        gamma = (1.0 + tau / m) / 2.0
        eps = None
        tau_hat = 1.0 - tau
        tau2 = 1.0 - min(1.0, p - 2.0) * gamma / 2.0
        omega0 = 0.15 / (1.0 + tau)
        delta_n = min((0.5 / (omega0 * (1.0 + tau))) ** (1.0 / tau), 1.0)
    else:
        tau = 1.0 / (2.0 * (p - 2.0))
        gamma = max(0.75, (1.0 + tau * (p - 2.0)) / 2.0)
        lo = tau / 2.0
        hi = (gamma / 2.0 - tau) / (p - 4.0) if p > 4.0 else 2.0 * tau
        eps = 0.5 * (lo + hi)
        if not lo < eps < max(hi, lo + 2 * tau):
            raise ValueError("no admissible eps; constraints incompatible")
        tau_hat = 1.0 - tau - (p - 4.0) * eps
        tau2 = 1.0 - gamma / 2.0
        omega0 = 0.15 / (1.0 + tau)
        first = math.exp(
            (math.log(omega0 * (1.0 + tau) * tau)
             - math.log(2.0 * N * (omega0 * tau * (1.0 + tau) + 3.0))) / (2.0 * eps - tau)
        ) if 2.0 * eps - tau > 0 else 1.0
        second = math.exp(-math.log(2.0 * omega0 * (1.0 + tau)) / tau)
        delta_n = min(first, second)
    tau1 = 0.0
    return RegimeParams(regime, p, N, gamma, tau, omega0, eps, delta_n,
                        tau_hat, tau1, tau2)


def zt_check(Z, T, theta: float, p: float) -> float:
    """Slack of ||Z|^{p-2} - |T|^{p-2}| <= max(1, p-2) |Z-T|^th (|Z|+|T|)^{p-2-th}."""
    if not p > 2:
        raise ValueError(f"p must be > 2, got {p}")
    if not 0.0 < theta <= min(1.0, p - 2.0):
        raise ValueError(f"theta must be in (0, min(1, p-2)], got {theta}")
    Z = np.asarray(Z, dtype=float)
    T = np.asarray(T, dtype=float)
    nz, nt = np.linalg.norm(Z), np.linalg.norm(T)
    lhs = abs(nz ** (p - 2.0) - nt ** (p - 2.0))
    rhs = max(1.0, p - 2.0) * np.linalg.norm(Z - T) ** theta * (nz + nt) ** (p - 2.0 - theta)
    return float(rhs - lhs)


@dataclass(frozen=True)
class ClaimsReport:
    regime: str
    p: float
    N: int
    M: float
    s: float
    ratio1: float
    ratio2: float | None
    ratio2_cap: float | None
    ratio3: float
    q_norm: float
    qx_norm: float
    qy_norm: float
    lambda1: float
    in_delta: bool
    eq_n_epsilon_ok: bool | None
    index_size: int | None


def claims_check(x_bar, y_bar, x0, M: float, params: RegimeParams, rng,
                 c_emp: float = 10.0) -> ClaimsReport:
    """Measure the three claim ratios at one doubled point (xbar, ybar, x0).

    Lipschitz regimes require |xbar-x0| and |ybar-x0| at most
    (c_emp |xbar-ybar|^gamma / M)^{1/2}, mirroring the penalty-term bound at
    a doubled maximum; c_emp stands in for the unquantified Hölder constant.
    """
    x_bar = np.asarray(x_bar, dtype=float)
    y_bar = np.asarray(y_bar, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    z = x_bar - y_bar
    s = float(np.linalg.norm(z))
    if s == 0.0:
        raise ValueError("xbar and ybar must differ")
    p, n = params.p, params.N
    if len(z) != n:
        raise ValueError(f"points have dimension {len(z)}, params expect {n}")
    modulus = params.modulus()
    if params.regime.startswith("lipschitz"):
        cap = math.sqrt(c_emp * s**params.gamma / M)
        for name, pt in (("xbar", x_bar), ("ybar", y_bar)):
            if np.linalg.norm(pt - x0) > cap * (1.0 + 1e-9):
                raise ValueError(
                    f"|{name} - x0| = {np.linalg.norm(pt - x0):.3g} exceeds the doubled-"
                    f"maximum cap (c_emp |xbar-ybar|^gamma / M)^(1/2) = {cap:.3g}"
                )
    jm = build_jet_matrices(z, M, p, modulus)
    wp = float(modulus.omega_prime(s))
    q = M * wp * z / s
    qx = q + 2.0 * M * (x_bar - x0)
    qy = q - 2.0 * M * (y_bar - x0)
    X, Y = feasible_pair_sample(z, M, p, modulus, rng)

    mp2 = M ** (p - 2.0)
    lam = jacobi_eigh(mp2 * jm.Theta @ (X + Y) @ jm.Theta)[0]
    denom = lambda expo: M ** (p - 1.0) * s ** (-expo)
    ratio1 = float(lam[0] / denom(params.tau_hat))
    if n > 1:
        ratio2 = float(lam[1:].max() / denom(params.tau1))
        ratio2_cap = float(2.0 * (2.0 * M + 1.0) * mp2 * jm.theta_norm_sq()
                           / denom(params.tau1))
    else:
        ratio2 = ratio2_cap = None
    nq, nqx, nqy = (float(np.linalg.norm(v)) for v in (q, qx, qy))
    lhs = abs(nqx ** (p - 2.0) - nq ** (p - 2.0)) * spectral_norm(X) \
        + abs(nqy ** (p - 2.0) - nq ** (p - 2.0)) * spectral_norm(Y)
    ratio3 = float(lhs / denom(params.tau2))

    if p > 4.0 and params.eps is not None:
        eq_ok = check_eq_n_epsilon(z, params.eps, modulus, M=M)
        idx_size = int(len(index_set(z, params.eps)))
    else:
        eq_ok, idx_size = None, None
    return ClaimsReport(
        regime=params.regime, p=p, N=n, M=M, s=s,
        ratio1=ratio1, ratio2=ratio2, ratio2_cap=ratio2_cap, ratio3=ratio3,
        q_norm=nq, qx_norm=nqx, qy_norm=nqy, lambda1=float(lam[0]),
        in_delta=bool(s < 0.5 * params.delta_N), eq_n_epsilon_ok=eq_ok,
        index_size=idx_size,
    )


def evaluate_claims_sweep(reports) -> dict:
    """Aggregate a scale sweep into the acceptance verdict.

    Requires: ratio1 < 0 for every sample; the per-scale medians of |ratio1|
    and ratio3 each drift by less than a factor 4 across the swept scales;
    every ratio2 sample stays below its derived cap.  Returns the verdict and
    the per-scale medians for reporting.
    """
    by_scale: dict = {}
    for rep in reports:
        by_scale.setdefault(rep.s, []).append(rep)
    scales = sorted(by_scale, reverse=True)
    med1 = {s: float(np.median([r.ratio1 for r in by_scale[s]])) for s in scales}
    med3 = {s: float(np.median([r.ratio3 for r in by_scale[s]])) for s in scales}
    sign_ok = all(r.ratio1 < 0.0 for r in reports)
    mags1 = [abs(v) for v in med1.values()]
    drift1 = max(mags1) / min(mags1) if min(mags1) > 0 else np.inf
    mags3 = [abs(v) for v in med3.values()]
    drift3 = max(mags3) / max(min(mags3), 1e-300)
    cap_ok = all(
        r.ratio2 is None or r.ratio2 <= r.ratio2_cap + 1e-9 * abs(r.ratio2_cap)
        for r in reports
    )
    ok = sign_ok and drift1 < 4.0 and drift3 < 4.0 and cap_ok
    detail = (f"sign_ok={sign_ok} drift1={drift1:.2f} drift3={drift3:.2f} "
              f"ratio2_cap_ok={cap_ok}")
    return {
        "ok": bool(ok),
        "detail": detail,
        "sign_ok": bool(sign_ok),
        "drift1": float(drift1),
        "drift3": float(drift3),
        "ratio2_cap_ok": bool(cap_ok),
        "ratio1_by_scale": med1,
        "ratio3_by_scale": med3,
    }


def _unit(vec: np.ndarray) -> np.ndarray:
    return vec / np.linalg.norm(vec)


def claims_scale_sweep(params: RegimeParams, M: float, scales, rng,
                       samples_per_scale: int = 5, c_emp: float = 10.0,
                       offset_scale: float = 0.5) -> list:
    """Run claims_check at each separation scale with seeded geometry.

    The separation direction is one random unit vector reused at every scale
    (scale-to-scale drift then measures the s-dependence, not directional
    noise).  x0 offsets follow the regime: a fixed small offset for Hölder,
    the doubled-maximum cap for Lipschitz.
    """
    n = params.N
    direction = _unit(rng.standard_normal(n)) if n > 1 else np.ones(1)
    off_dir = direction  # aligned offset keeps the gradient-shift term leading

    reports = []
    for s in scales:
        if params.regime.startswith("lipschitz"):
            off = offset_scale * math.sqrt(c_emp * s**params.gamma / M)
        else:
            off = offset_scale * 0.1
        for _ in range(samples_per_scale):
            x0 = np.zeros(n)
            x_bar = x0 + off * off_dir
            y_bar = x_bar - s * direction
            reports.append(claims_check(x_bar, y_bar, x0, M, params, rng, c_emp=c_emp))
    return reports
