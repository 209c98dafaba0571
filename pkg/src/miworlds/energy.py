"""Potential, interworld and total energies for static configurations.

The interworld potential is built from reciprocal gaps of the cumulative
baseline, with the boundary reciprocals (B at +-infinity) taken as exact
zeros.  For the ground and Maxwell-square baselines the product U*V obeys
a Cauchy-Schwarz lower bound that is attained at the solved minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import BaselineZero, NotDecreasing
from .targets import Baseline

__all__ = ["EnergyReport", "potential_V", "interworld_U", "certify_minimizer"]


@dataclass(frozen=True)
class EnergyReport:
    """Energy decomposition with the Cauchy-Schwarz certificate."""

    V: float
    U: float
    H: float
    cauchy_schwarz_gap: Optional[float]
    lower_bound: Optional[float]

    def to_dict(self) -> dict:
        return {
            "V": self.V,
            "U": self.U,
            "H": self.H,
            "cauchy_schwarz_gap": self.cauchy_schwarz_gap,
            "lower_bound": self.lower_bound,
        }


def potential_V(points: Sequence[float]) -> float:
    """Parabolic-trap potential sum(x_n^2)."""
    return float(sum(x * x for x in points))


def interworld_U(baseline: Baseline, points: Sequence[float]) -> float:
    """Interworld potential from reciprocal cumulative-baseline gaps."""
    n = len(points)
    for i in range(n - 1):
        if points[i + 1] >= points[i]:
            raise NotDecreasing(f"points not strictly decreasing at index {i}")
    bvals = [float(baseline.b(x)) for x in points]
    if any(b <= 0.0 for b in bvals):
        raise BaselineZero("baseline vanishes at a world location")
    Bvals = [float(baseline.B(x)) for x in points]
    # reciprocal of the gap below world n (B(x_{n+1}) - B(x_n)), zero at the
    # boundary since B(x_0) = +inf and B(x_{N+1}) = -inf
    recip_below = [1.0 / (Bvals[i + 1] - Bvals[i]) for i in range(n - 1)] + [0.0]
    recip_above = [0.0] + [1.0 / (Bvals[i] - Bvals[i - 1]) for i in range(1, n)]
    total = 0.0
    for i in range(n):
        d = recip_below[i] - recip_above[i]
        total += d * d * bvals[i] * bvals[i]
    return total


_BOUND_CONSTANTS = {
    # family -> (product lower-bound coefficient on (N-1)^2, H lower-bound
    # coefficient on (N-1))
    "ground": (1.0, 2.0),
    "maxwell_square": (9.0, 6.0),
}


def certify_minimizer(baseline: Baseline, points: Sequence[float]) -> EnergyReport:
    """Energy report with the family's Cauchy-Schwarz product gap.

    The gap and lower bound are only asserted for the ground and
    Maxwell-square baselines; other baselines report them as unavailable.
    """
    V = potential_V(points)
    U = interworld_U(baseline, points)
    H = V + U
    consts = _BOUND_CONSTANTS.get(baseline.family)
    if consts is None:
        gap = None
        lower = None
    else:
        prod_coeff, h_coeff = consts
        n1 = len(points) - 1
        gap = U * V - prod_coeff * n1 * n1
        lower = h_coeff * n1
    return EnergyReport(V=V, U=U, H=H, cauchy_schwarz_gap=gap, lower_bound=lower)
