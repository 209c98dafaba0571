"""Stein solutions for the two-sided Maxwell target and their bounds.

For a Lipschitz test function h with mean m under p_1(x) = x^2 phi(x),
the auxiliary solution is built branch-wise,

    g0(x) = e^{x^2/2} int_x^inf  u^2 (h(u) - m) e^{-u^2/2} du    (x > 0),
    g0(x) = e^{x^2/2} int_-inf^x u^2 (h(u) - m) e^{-u^2/2} du    (x <= 0),

and g = g0 / (x^2 + 2), chi = g' / x.  Differentiating the branches gives
g0'(x) = x g0(x) - sign(x) x^2 (h(x) - m); all derivative evaluators are
assembled from this identity, never from differentiating quadrature
output.  Note the branch-dependent sign: the ODE residual checks are
therefore stated in magnitude form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .numerics import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive
from .zerobias import CouplingReport

__all__ = [
    "TestFunction",
    "SteinSolutionBundle",
    "make_test_function",
    "build_bundle",
    "supnorm_suite",
    "suite_csv_rows",
    "theorem_check",
    "identity_f_check",
    "fixed_suite",
]

# Sup-norm bound multipliers on the Lipschitz constant c.
BOUND_G = 3.0
BOUND_DG = 4.0
BOUND_CHI = 6.0
BOUND_DCHI = 7.0

# Composite Gauss-Legendre rule: 16 panels of 16 nodes on [0, 1].
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_EDGES = np.linspace(0.0, 1.0, 17)
_T01 = (
    0.5 * (_EDGES[:-1, None] + _EDGES[1:, None])
    + 0.5 * (_EDGES[1:, None] - _EDGES[:-1, None]) * _GL_X[None, :]
).ravel()
_W01 = (0.5 * (_EDGES[1:, None] - _EDGES[:-1, None]) * _GL_W[None, :]).ravel()

_CHUNK = 4096
# Truncation budget for exp((x^2-u^2)/2): drop the tail once the exponent
# falls below -40 (mass < 5e-18 relative to the branch scale).
_EXP_BUDGET = 80.0


@dataclass(frozen=True)
class TestFunction:
    """Lipschitz test function with certified constant and p_1 mean.

    ``h`` and ``dh`` must accept numpy arrays; ``kinks`` lists the points
    where dh jumps so integration panels can be split there.
    """

    name: str
    h: Callable
    dh: Callable
    c: float
    mean_under_p1: float
    kinks: tuple = ()

    def htilde(self, x):
        return self.h(x) - self.mean_under_p1


def make_test_function(
    name: str,
    h: Callable,
    dh: Callable,
    c: float,
    kinks: Sequence[float] = (),
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> TestFunction:
    """Build a TestFunction, computing the mean under p_1 by quadrature."""
    L = spec.tail_cutoff
    cuts = sorted({-L, 0.0, L} | {float(k) for k in kinks if -L < float(k) < L})
    mean = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mean += integrate_adaptive(
            lambda u: float(h(u)) * u * u * math.exp(-0.5 * u * u), a, b, spec
        )
    mean /= math.sqrt(2.0 * math.pi)
    return TestFunction(
        name=name, h=h, dh=dh, c=float(c), mean_under_p1=mean,
        kinks=tuple(float(k) for k in kinks),
    )


def _upper_integral_grid(xs, f, kinks, L):
    """int_x^U u^2 f(u) e^{(x^2-u^2)/2} du for xs >= 0, vectorized.

    U truncates the upper limit where the exponential weight has decayed
    below the quadrature tolerance; panels are split at the kinks of f.
    """
    xs = np.asarray(xs, dtype=float)
    U = xs + np.minimum(L - xs, -xs + np.sqrt(xs * xs + _EXP_BUDGET))
    bounds = sorted({0.0, L} | {k for k in kinks if 0.0 < k < L})
    out = np.zeros_like(xs)
    for start in range(0, xs.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        x = xs[sl]
        u_hi = U[sl]
        acc = np.zeros_like(x)
        for p0, p1 in zip(bounds[:-1], bounds[1:]):
            lo = np.clip(x, p0, p1)
            hi = np.clip(u_hi, p0, p1)
            w = hi - lo
            nodes = lo[:, None] + w[:, None] * _T01[None, :]
            vals = (
                nodes * nodes
                * f(nodes)
                * np.exp(0.5 * (np.square(x)[:, None] - np.square(nodes)))
            )
            acc += w * (vals @ _W01)
        out[sl] = acc
    return out


def _g0_scalar(x, htilde, kinks, spec):
    """Adaptive-quadrature g0, the slow reference path."""
    L = spec.tail_cutoff
    if x > 0:
        cuts = sorted({x, L} | {k for k in kinks if x < k < L})
        sign = 1.0
    else:
        cuts = sorted({-L, x} | {k for k in kinks if -L < k < x})
        sign = 1.0
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += integrate_adaptive(
            lambda u: u * u * float(htilde(u)) * math.exp(0.5 * (x * x - u * u)),
            a,
            b,
            spec,
        )
    return sign * total


@dataclass(frozen=True)
class SteinSolutionBundle:
    """Evaluators for g0, g = g0/(x^2+2), chi = g'/x and derivatives.

    Scalar evaluators integrate adaptively; the ``*_grid`` methods share a
    single vectorized composite-quadrature pass over the grid.  All
    derivatives come from the branch identity
    g0' = x g0 - sign(x) x^2 (h - mean).
    """

    test: TestFunction
    spec: QuadratureSpec

    # scalar evaluators -------------------------------------------------

    def g0(self, x: float) -> float:
        return _g0_scalar(float(x), self.test.htilde, self.test.kinks, self.spec)

    def dg0(self, x: float) -> float:
        x = float(x)
        s = math.copysign(1.0, x) if x != 0.0 else 0.0
        return x * self.g0(x) - s * x * x * float(self.test.htilde(x))

    def g(self, x: float) -> float:
        return self.g0(x) / (x * x + 2.0)

    def dg(self, x: float) -> float:
        x = float(x)
        D = x * x + 2.0
        return self.dg0(x) / D - 2.0 * x * self.g0(x) / (D * D)

    def chi(self, x: float) -> float:
        # chi = g'/x in the 0/0-free arrangement
        # (1 - 2/D) g0 / D - |x| htilde / D, exact for every x.
        x = float(x)
        D = x * x + 2.0
        return (1.0 - 2.0 / D) * self.g0(x) / D - abs(x) * float(
            self.test.htilde(x)
        ) / D

    def dchi(self, x: float) -> float:
        x = float(x)
        s = math.copysign(1.0, x) if x != 0.0 else 0.0
        D = x * x + 2.0
        A = 1.0 / D - 2.0 / (D * D)
        dA = 2.0 * x * (2.0 - x * x) / D ** 3
        ht = float(self.test.htilde(x))
        dh = float(self.test.dh(x))
        return (
            dA * self.g0(x)
            + A * self.dg0(x)
            - s * ht / D
            - abs(x) * dh / D
            + 2.0 * x * abs(x) * ht / (D * D)
        )

    # vectorized evaluators ---------------------------------------------

    def g0_grid(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ht = self.test.htilde
        kinks = self.test.kinks
        L = self.spec.tail_cutoff
        out = np.empty_like(xs)
        pos = xs > 0.0
        if np.any(pos):
            out[pos] = _upper_integral_grid(xs[pos], ht, kinks, L)
        if np.any(~pos):
            # lower branch via u -> -u: same machinery at |x| against
            # the reflected integrand
            mirrored = tuple(-k for k in kinks)
            out[~pos] = _upper_integral_grid(
                -xs[~pos], lambda u: ht(-u), mirrored, L
            )
        return out

    def grids(self, xs) -> dict:
        """All six evaluators on a grid from one g0 pass."""
        xs = np.asarray(xs, dtype=float)
        g0 = self.g0_grid(xs)
        s = np.sign(xs)
        ht = np.asarray(self.test.htilde(xs), dtype=float)
        dh = np.asarray(self.test.dh(xs), dtype=float)
        D = xs * xs + 2.0
        dg0 = xs * g0 - s * xs * xs * ht
        g = g0 / D
        dg = dg0 / D - 2.0 * xs * g0 / (D * D)
        chi = (1.0 - 2.0 / D) * g0 / D - np.abs(xs) * ht / D
        A = 1.0 / D - 2.0 / (D * D)
        dA = 2.0 * xs * (2.0 - xs * xs) / D ** 3
        dchi = (
            dA * g0
            + A * dg0
            - s * ht / D
            - np.abs(xs) * dh / D
            + 2.0 * xs * np.abs(xs) * ht / (D * D)
        )
        return {
            "x": xs, "g0": g0, "dg0": dg0, "g": g, "dg": dg,
            "chi": chi, "dchi": dchi,
        }


def build_bundle(
    test: TestFunction, spec: QuadratureSpec = DEFAULT_QUAD
) -> SteinSolutionBundle:
    return SteinSolutionBundle(test=test, spec=spec)


_DEFAULT_GRID_LO = -8.0
_DEFAULT_GRID_HI = 8.0
_DEFAULT_GRID_STEP = 1e-3


def supnorm_suite(
    test: TestFunction,
    spec: QuadratureSpec = DEFAULT_QUAD,
    grid: Optional[np.ndarray] = None,
) -> dict:
    """Grid suprema of |g|, |g'|, |chi|, |chi'| against the c-multiples."""
    if grid is None:
        n = int(round((_DEFAULT_GRID_HI - _DEFAULT_GRID_LO) / _DEFAULT_GRID_STEP))
        grid = _DEFAULT_GRID_LO + _DEFAULT_GRID_STEP * np.arange(n + 1)
    bundle = build_bundle(test, spec)
    vals = bundle.grids(grid)
    sup_g = float(np.max(np.abs(vals["g"])))
    sup_dg = float(np.max(np.abs(vals["dg"])))
    sup_chi = float(np.max(np.abs(vals["chi"])))
    sup_dchi = float(np.max(np.abs(vals["dchi"])))
    c = test.c
    ok = (
        sup_g <= BOUND_G * c
        and sup_dg <= BOUND_DG * c
        and sup_chi <= BOUND_CHI * c
        and sup_dchi <= BOUND_DCHI * c
    )
    return {
        "h_name": test.name,
        "c": c,
        "sup_g": sup_g,
        "sup_dg": sup_dg,
        "sup_chi": sup_chi,
        "sup_dchi": sup_dchi,
        "bound_3c": BOUND_G * c,
        "bound_4c": BOUND_DG * c,
        "bound_6c": BOUND_CHI * c,
        "bound_7c": BOUND_DCHI * c,
        "pass": ok,
    }


_SUITE_FIELDS = (
    "h_name", "c", "sup_g", "sup_dg", "sup_chi", "sup_dchi",
    "bound_3c", "bound_4c", "bound_6c", "bound_7c", "pass",
)


def suite_csv_rows(records: Sequence[dict]):
    """Header plus one tuple per supnorm record, in the published order."""
    rows = [_SUITE_FIELDS]
    for rec in records:
        rows.append(tuple(rec[f] for f in _SUITE_FIELDS))
    return rows


def theorem_check(cfg, report: CouplingReport, dw: float) -> dict:
    """Assemble the coupling-bound inequality dw <= rhs_bound."""
    lhs = float(dw)
    rhs = float(report.rhs_bound)
    return {
        "n_worlds": cfg.n_worlds,
        "lhs": lhs,
        "rhs": rhs,
        "holds": lhs <= rhs + 1e-12,
    }


def identity_f_check(
    test: TestFunction,
    grid: Optional[np.ndarray] = None,
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Max residual of the rewritten Stein identity with f = b tau g = g0.

    For b = x^2 and the Maxwell kernel tau_1, f collapses to g0 and the
    identity reads |f'(x) - x f(x)| = x^2 |h(x) - mean| (magnitude form,
    the sign flips across branches).  Returns the worst grid value of
    ||f' - x f| / x^2 - |h - mean||.
    """
    if grid is None:
        half = np.arange(0.05, 6.0 + 1e-12, 0.05)
        grid = np.concatenate((-half[::-1], half))
    grid = np.asarray(grid, dtype=float)
    if np.any(np.abs(grid) < 0.05):
        raise ValueError("identity grid must exclude |x| < 0.05")
    bundle = build_bundle(test, spec)
    vals = bundle.grids(grid)
    lhs = np.abs(vals["dg0"] - grid * vals["g0"]) / np.square(grid)
    rhs = np.abs(np.asarray(test.htilde(grid), dtype=float))
    return float(np.max(np.abs(lhs - rhs)))


def fixed_suite(spec: QuadratureSpec = DEFAULT_QUAD):
    """The certified test-function suite: odd/even mix, kinked and smooth."""
    ident = make_test_function(
        "identity",
        lambda x: np.asarray(x, dtype=float) + 0.0,
        lambda x: np.ones_like(np.asarray(x, dtype=float)),
        c=1.0,
        spec=spec,
    )
    sine = make_test_function(
        "sine", np.sin, np.cos, c=1.0, spec=spec
    )
    clipped = make_test_function(
        "clipped_linear",
        lambda x: np.clip(x, -1.0, 1.0),
        lambda x: np.where(np.abs(np.asarray(x, dtype=float)) < 1.0, 1.0, 0.0),
        c=1.0,
        kinks=(-1.0, 1.0),
        spec=spec,
    )
    taper = make_test_function(
        "gauss_taper",
        lambda x: x * np.exp(-0.25 * np.square(x)),
        lambda x: (1.0 - 0.5 * np.square(x)) * np.exp(-0.25 * np.square(x)),
        c=1.0,
        spec=spec,
    )
    return (ident, sine, clipped, taper)
