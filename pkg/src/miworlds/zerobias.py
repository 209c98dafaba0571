"""Empirical distributions, generalized zero-bias densities and couplings.

The b-generalized-zero-bias density of the uniform law on symmetric atoms
x_1 > ... > x_N has shape c_n * b(x) on each gap (x_{n+1}, x_n] with
c_n proportional to sum_{i<=n} x_i / b(x_i).  The comonotone (quantile)
coupling of the empirical law W with W* ~ p* yields the four expectation
terms whose weighted sum bounds the Wasserstein distance to the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    AsymmetricInput,
    AtomAtZero,
    BaselineZero,
    MismatchedBreakpoints,
    NotDecreasing,
)
from .numerics import DEFAULT_QUAD, QuadratureSpec, integrate_adaptive
from .targets import Baseline, ground_baseline

__all__ = [
    "EmpiricalDist",
    "PiecewiseDensity",
    "CouplingReport",
    "gzb_density",
    "histogram_density",
    "coupling_expectations",
    "fixed_point_defect",
]

_SYMMETRY_TOL = 1e-8

# Theorem constants for the x^2-generalized zero-bias bound, per unit
# Lipschitz constant of the test function.
LAMBDA_1 = 6.0
LAMBDA_2 = 7.0
LAMBDA_3 = 18.0
LAMBDA_4 = 22.0


class EmpiricalDist:
    """Uniform distribution on strictly decreasing atoms."""

    def __init__(self, atoms: Sequence[float]):
        atoms = tuple(float(a) for a in atoms)
        for i in range(len(atoms) - 1):
            if atoms[i + 1] >= atoms[i]:
                raise NotDecreasing("atoms must be strictly decreasing")
        self.atoms = atoms
        self._asc = np.asarray(atoms[::-1], dtype=float)
        self.n = len(atoms)

    def cdf(self, x: float) -> float:
        return float(np.searchsorted(self._asc, x, side="right")) / self.n

    def cdf_left(self, x: float) -> float:
        return float(np.searchsorted(self._asc, x, side="left")) / self.n

    def quantile(self, u: float) -> float:
        if not 0.0 < u <= 1.0:
            raise ValueError("quantile argument must lie in (0, 1]")
        j = int(math.ceil(u * self.n)) - 1
        return float(self._asc[min(j, self.n - 1)])


@dataclass(frozen=True)
class PiecewiseDensity:
    """Density c_n * b(x) on each gap (x_{n+1}, x_n] of the breakpoints.

    ``breakpoints`` are stored in decreasing order with ``coeffs[n]`` and
    ``masses[n]`` attached to the gap below breakpoint n; houses both the
    zero-bias density p* and the flat histogram density (ground baseline).
    """

    baseline: Baseline
    breakpoints: tuple
    coeffs: tuple
    masses: tuple

    @property
    def support(self):
        return (self.breakpoints[-1], self.breakpoints[0])

    def _ascending(self):
        asc_x = np.asarray(self.breakpoints[::-1], dtype=float)
        asc_c = np.asarray(self.coeffs[::-1], dtype=float)
        asc_m = np.asarray(self.masses[::-1], dtype=float)
        return asc_x, asc_c, asc_m

    def pdf(self, x: float) -> float:
        asc_x, asc_c, _ = self._ascending()
        if x <= asc_x[0] or x > asc_x[-1]:
            return 0.0
        i = int(np.searchsorted(asc_x, x, side="left")) - 1
        return float(asc_c[i] * self.baseline.b(x))

    def cdf(self, x: float) -> float:
        asc_x, asc_c, asc_m = self._ascending()
        if x <= asc_x[0]:
            return 0.0
        if x >= asc_x[-1]:
            return 1.0
        i = int(np.searchsorted(asc_x, x, side="left")) - 1
        below = float(np.sum(asc_m[:i]))
        partial = asc_c[i] * (
            float(self.baseline.B(x)) - float(self.baseline.B(asc_x[i]))
        )
        return min(1.0, below + partial)

    def quantile(self, u: float) -> float:
        if not 0.0 < u <= 1.0:
            raise ValueError("quantile argument must lie in (0, 1]")
        asc_x, asc_c, asc_m = self._ascending()
        cum = np.concatenate(([0.0], np.cumsum(asc_m)))
        cum[-1] = 1.0
        i = int(np.searchsorted(cum, u, side="left")) - 1
        i = max(0, min(i, len(asc_c) - 1))
        if u >= cum[i + 1]:
            return float(asc_x[i + 1])
        target = float(self.baseline.B(asc_x[i])) + (u - cum[i]) / asc_c[i]
        return float(self.baseline.Binv(target))

    def to_csv_rows(self):
        """Rows (interval_left, interval_right, coeff, mass), left < right."""
        rows = []
        n = len(self.breakpoints)
        for i in range(n - 1):
            rows.append(
                (
                    self.breakpoints[i + 1],
                    self.breakpoints[i],
                    self.coeffs[i],
                    self.masses[i],
                )
            )
        return rows


def _check_symmetric_decreasing(atoms):
    n = len(atoms)
    for i in range(n - 1):
        if atoms[i + 1] >= atoms[i]:
            raise NotDecreasing("atoms must be strictly decreasing")
    worst = max(abs(atoms[i] + atoms[n - 1 - i]) for i in range(n))
    if worst > _SYMMETRY_TOL:
        raise AsymmetricInput(f"symmetry defect {worst:g} exceeds {_SYMMETRY_TOL:g}")


def gzb_density(baseline: Baseline, atoms: Sequence[float]) -> PiecewiseDensity:
    """Generalized zero-bias density of the uniform law on the atoms."""
    atoms = tuple(float(a) for a in atoms)
    _check_symmetric_decreasing(atoms)
    bvals = [float(baseline.b(a)) for a in atoms]
    if any(b <= 0.0 for b in bvals):
        raise BaselineZero("baseline vanishes at an atom")
    n = len(atoms)
    partial = 0.0
    raw = []
    for i in range(n - 1):
        partial += atoms[i] / bvals[i]
        raw.append(partial)
    if any(c < 0.0 for c in raw):
        raise AsymmetricInput("partial sums x_i/b(x_i) must stay nonnegative")
    gaps = [
        float(baseline.B(atoms[i])) - float(baseline.B(atoms[i + 1]))
        for i in range(n - 1)
    ]
    masses = [c * g for c, g in zip(raw, gaps)]
    total = sum(masses)
    coeffs = tuple(c / total for c in raw)
    masses = tuple(m / total for m in masses)
    return PiecewiseDensity(
        baseline=baseline, breakpoints=atoms, coeffs=coeffs, masses=masses
    )


def histogram_density(atoms: Sequence[float]) -> PiecewiseDensity:
    """Flat density with mass 1/(N-1) on each gap between atoms."""
    atoms = tuple(float(a) for a in atoms)
    n = len(atoms)
    for i in range(n - 1):
        if atoms[i + 1] >= atoms[i]:
            raise NotDecreasing("atoms must be strictly decreasing")
    mass = 1.0 / (n - 1)
    coeffs = tuple(
        mass / (atoms[i] - atoms[i + 1]) for i in range(n - 1)
    )
    return PiecewiseDensity(
        baseline=ground_baseline(),
        breakpoints=atoms,
        coeffs=coeffs,
        masses=(mass,) * (n - 1),
    )


@dataclass(frozen=True)
class CouplingReport:
    """Expectation terms of the coupling bound and the assembled RHS."""

    e_abs: float
    e_wabs: float
    e_inv: float
    e_ratio: float
    rhs_bound: float

    def to_dict(self) -> dict:
        return {
            "e_abs": self.e_abs,
            "e_wabs": self.e_wabs,
            "e_inv": self.e_inv,
            "e_ratio": self.e_ratio,
            "rhs_bound": self.rhs_bound,
        }


def _poly_div_x(p: Polynomial):
    """p(x)/x as a polynomial, or None when p(0) != 0."""
    c = p.coef
    if abs(c[0]) != 0.0:
        return None
    return Polynomial(c[1:])


def _cell_integrals(atom, x0, x1, coeff, baseline, spec):
    """(E|a-x|, E|1/a - 1/x|) contributions against coeff*b on [x0, x1]."""
    if x1 <= x0:
        return 0.0, 0.0
    cuts = sorted({x0, x1} | {v for v in (0.0, atom) if x0 < v < x1})
    bp = baseline.b_poly
    e1 = 0.0
    e3 = 0.0
    for p, q in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (p + q)
        if bp is not None:
            prim_b = bp.integ()
            prim_xb = (bp * Polynomial([0.0, 1.0])).integ()
            ib = float(prim_b(q) - prim_b(p))
            ixb = float(prim_xb(q) - prim_xb(p))
            e1 += abs(atom * ib - ixb) * coeff
            bx = _poly_div_x(bp)
            if bx is not None:
                prim_bx = bx.integ()
                ibx = float(prim_bx(q) - prim_bx(p))
                e3 += abs(ib / atom - ibx) * coeff
            else:
                if p < 0.0 < q or mid == 0.0:
                    e3 += math.inf
                else:
                    e3 += coeff * integrate_adaptive(
                        lambda x: abs(1.0 / atom - 1.0 / x) * float(baseline.b(x)),
                        p,
                        q,
                        spec,
                    )
        else:
            e1 += coeff * integrate_adaptive(
                lambda x: abs(atom - x) * float(baseline.b(x)), p, q, spec
            )
            if p < 0.0 < q:
                e3 += math.inf
            else:
                e3 += coeff * integrate_adaptive(
                    lambda x: abs(1.0 / atom - 1.0 / x) * float(baseline.b(x)),
                    p,
                    q,
                    spec,
                )
    return e1, e3


def coupling_expectations(
    atoms: Sequence[float],
    gzb: PiecewiseDensity,
    spec: QuadratureSpec = DEFAULT_QUAD,
) -> CouplingReport:
    """Exact expectation terms under the comonotone (quantile) coupling.

    W is uniform on the atoms, W* follows ``gzb``; the unit interval is
    partitioned by both quantile functions' breakpoints and each cell is
    integrated in closed form (polynomial baselines) or by quadrature.
    """
    atoms = tuple(float(a) for a in atoms)
    if len(atoms) != len(gzb.breakpoints) or any(
        abs(a - b) > 1e-12 * max(1.0, abs(a))
        for a, b in zip(atoms, gzb.breakpoints)
    ):
        raise MismatchedBreakpoints("atoms and density breakpoints differ")
    if any(a == 0.0 for a in atoms):
        raise AtomAtZero("reciprocal terms undefined for an atom at zero")

    n = len(atoms)
    asc_y = np.asarray(atoms[::-1], dtype=float)
    asc_x, asc_c, asc_m = gzb._ascending()
    atom_cum = np.arange(1, n + 1) / n
    star_cum = np.cumsum(asc_m)
    star_cum[-1] = 1.0

    u_breaks = np.unique(
        np.concatenate(([0.0], atom_cum, star_cum))
    )
    baseline = gzb.baseline
    Bleft = np.asarray([float(baseline.B(v)) for v in asc_x])
    star_lo = np.concatenate(([0.0], star_cum))

    e_abs = e_wabs = e_inv = e_ratio = 0.0
    for u0, u1 in zip(u_breaks[:-1], u_breaks[1:]):
        if u1 <= u0:
            continue
        um = 0.5 * (u0 + u1)
        j = min(int(np.searchsorted(atom_cum, um, side="left")), n - 1)
        a = float(asc_y[j])
        i = min(int(np.searchsorted(star_cum, um, side="left")), n - 2)
        c = float(asc_c[i])
        # invert the density CDF at the cell edges, snapping to interval
        # endpoints where the edge coincides with a density breakpoint
        if u0 <= star_lo[i]:
            x0 = float(asc_x[i])
        else:
            x0 = float(baseline.Binv(Bleft[i] + (u0 - star_lo[i]) / c))
        if u1 >= star_cum[i]:
            x1 = float(asc_x[i + 1])
        else:
            x1 = float(baseline.Binv(Bleft[i] + (u1 - star_lo[i]) / c))
        e1, e3 = _cell_integrals(a, x0, x1, c, baseline, spec)
        e_abs += e1
        e_wabs += abs(a) * e1
        e_inv += e3
        e_ratio += e1 / abs(a)

    rhs = (
        LAMBDA_1 * e_abs
        + LAMBDA_2 * e_wabs
        + LAMBDA_3 * e_inv
        + LAMBDA_4 * e_ratio
    )
    return CouplingReport(
        e_abs=e_abs, e_wabs=e_wabs, e_inv=e_inv, e_ratio=e_ratio, rhs_bound=rhs
    )


def fixed_point_defect(k: int = 1, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Sup-grid defect of the fixed-point identity p* = p for the target.

    For the two-sided Maxwell target (k = 1) this checks
    b(x) * int_x^inf t phi(t) dt = p_1(x) on x in {-4, -3.9, ..., 4}.
    """
    if k != 1:
        raise ValueError("fixed-point check implemented for k = 1 only")
    from .targets import pdf_pk, phi

    worst = 0.0
    for i in range(-40, 41):
        x = i / 10.0
        inner = integrate_adaptive(
            lambda t: t * float(phi(t)), x, spec.tail_cutoff, spec
        )
        worst = max(worst, abs(x * x * inner - float(pdf_pk(1, x))))
    return worst
