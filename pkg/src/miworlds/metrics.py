"""Wasserstein and Kolmogorov distances plus the convergence-rate sweep.

In one dimension d_W is the area between CDFs, which also equals the
comonotone coupling cost E|W - W*|; both routes are kept and
cross-validated in the tests.  The sweep solves the Maxwell recursion
over a doubling ladder of world counts and records every distance and
coupling term alongside the sqrt(log N / N) envelope ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .numerics import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive
from .solver import MAXWELL, solve_configuration
from .targets import cdf_pk, maxwell_square_baseline
from .zerobias import EmpiricalDist, coupling_expectations, gzb_density

__all__ = [
    "wasserstein1",
    "kolmogorov",
    "dk_dw_relation_check",
    "MAXWELL_MODE_SUP",
    "RateRow",
    "rate_sweep",
    "rate_rows_csv",
]

# sup of the two-sided Maxwell density x^2 phi(x), attained at |x| = sqrt(2)
MAXWELL_MODE_SUP = 2.0 * math.exp(-1.0) / math.sqrt(2.0 * math.pi)


def wasserstein1(
    F: Callable[[float], float],
    G: Callable[[float], float],
    support,
    spec: QuadratureSpec = DEFAULT_QUAD,
    jumps: Sequence[float] = (),
) -> float:
    """d_W = int_a^b |F - G| with quadrature panels split at F's jumps."""
    a, b = float(support[0]), float(support[1])
    cuts = sorted({a, b} | {float(j) for j in jumps if a < float(j) < b})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += integrate_adaptive(lambda x: abs(F(x) - G(x)), lo, hi, spec)
    return total


def kolmogorov(F_emp: EmpiricalDist, G: Callable[[float], float]) -> float:
    """sup |F_emp - G|, attained at the atoms against a continuous G."""
    worst = 0.0
    for x in F_emp.atoms:
        gx = G(x)
        worst = max(worst, abs(F_emp.cdf(x) - gx), abs(F_emp.cdf_left(x) - gx))
    return worst


def dk_dw_relation_check(dk: float, dw: float, C: float = MAXWELL_MODE_SUP) -> bool:
    """d_K <= sqrt(2 C d_W) for targets with density bounded by C."""
    return dk <= math.sqrt(2.0 * C * dw) + 1e-12


@dataclass(frozen=True)
class RateRow:
    """One sweep entry: distances, coupling terms and the envelope ratio."""

    N: int
    dw: float
    dk: float
    x1: float
    e_abs: float
    e_wabs: float
    e_inv: float
    e_ratio: float
    rhs_bound: float
    ratio_dw: float

    def astuple(self):
        return (
            self.N, self.dw, self.dk, self.x1, self.e_abs, self.e_wabs,
            self.e_inv, self.e_ratio, self.rhs_bound, self.ratio_dw,
        )


RATE_CSV_HEADER = (
    "N", "dw", "dk", "x1", "e_abs", "e_wabs", "e_inv", "e_ratio",
    "rhs_bound", "ratio_dw",
)


def _maxwell_cdf(x: float) -> float:
    return cdf_pk(1, x)


def measure_configuration(cfg, spec: QuadratureSpec = DEFAULT_QUAD) -> RateRow:
    """Distances and coupling terms for one solved Maxwell configuration."""
    baseline = maxwell_square_baseline()
    emp = EmpiricalDist(cfg.points)
    density = gzb_density(baseline, cfg.points)
    report = coupling_expectations(cfg.points, density, spec)
    lo = min(cfg.points[-1], -spec.tail_cutoff)
    hi = max(cfg.points[0], spec.tail_cutoff)
    dw = wasserstein1(
        emp.cdf, _maxwell_cdf, (lo, hi), spec, jumps=cfg.points
    )
    dk = kolmogorov(emp, _maxwell_cdf)
    n = cfg.n_worlds
    envelope = math.sqrt(math.log(n) / n) if n > 1 and math.log(n) > 0 else math.nan
    return RateRow(
        N=n,
        dw=dw,
        dk=dk,
        x1=cfg.points[0],
        e_abs=report.e_abs,
        e_wabs=report.e_wabs,
        e_inv=report.e_inv,
        e_ratio=report.e_ratio,
        rhs_bound=report.rhs_bound,
        ratio_dw=dw / envelope if envelope == envelope else math.nan,
    )


def rate_sweep(
    family: str,
    n_list: Sequence[int],
    spec: QuadratureSpec = DEFAULT_QUAD,
):
    """Solve each N, measure it, and fit log(dw) against log(N).

    Returns (rows, fit) where fit is None for fewer than two rows and
    otherwise a dict with slope (log dw against log N), ratio_slope
    (log of dw over the sqrt(log N / N) envelope against log N),
    intercept and max_ratio.  The envelope is an upper bound only; the
    solved configurations are quantile-like and dw itself decays faster
    than the envelope, so the two slopes differ materially.
    """
    if family != MAXWELL:
        raise ValueError("rate sweeps are defined for the maxwell family")
    if list(n_list) != sorted(set(int(n) for n in n_list)):
        raise ValueError("N list must be strictly ascending")
    rows = []
    for n in n_list:
        cfg = solve_configuration(MAXWELL, int(n))
        rows.append(measure_configuration(cfg, spec))
    fit: Optional[dict] = None
    if len(rows) >= 2:
        logs_n = np.log([r.N for r in rows])
        logs_d = np.log([r.dw for r in rows])
        slope, intercept = np.polyfit(logs_n, logs_d, 1)
        ratio_rows = [r for r in rows if r.ratio_dw == r.ratio_dw]
        ratio_slope = float(
            np.polyfit(
                np.log([r.N for r in ratio_rows]),
                np.log([r.ratio_dw for r in ratio_rows]),
                1,
            )[0]
        )
        fit = {
            "slope": float(slope),
            "ratio_slope": ratio_slope,
            "intercept": float(intercept),
            "max_ratio": max(r.ratio_dw for r in ratio_rows),
        }
    return rows, fit


def rate_rows_csv(rows: Sequence[RateRow]):
    """Header tuple followed by value tuples, ready for the CSV writer."""
    return [RATE_CSV_HEADER] + [r.astuple() for r in rows]
