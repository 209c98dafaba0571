"""Shooting solver for the world-location recursions.

Three families are supported: the ground recursion
x_{n+1} = x_n - 1/(x_1+...+x_n), the Maxwell recursion
x_{n+1}^3 = x_n^3 - 3/(1/x_1+...+1/x_n), and the general-baseline
recursion B(x_{n+1}) = B(x_n) - 1/sum(x_i/b(x_i)).  The unique strictly
decreasing zero-mean configuration is found by bisecting on x_1 until the
midpoint symmetry condition holds, then mirroring the first half.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BracketFailure,
    InvalidStart,
    ParityUnsupported,
    ResidualFailure,
)
from .numerics import signed_cbrt
from .targets import Baseline

__all__ = [
    "GROUND",
    "MAXWELL",
    "GENERAL",
    "Configuration",
    "shoot_sequence",
    "solve_configuration",
    "validate_properties",
    "recursion_residual",
    "configuration_to_json",
    "configuration_from_json",
]

GROUND = "ground"
MAXWELL = "maxwell"
GENERAL = "general"

_RESIDUAL_TOL = 1e-9
_ZERO_OF_B_TOL = 1e-8


@dataclass(frozen=True)
class Configuration:
    """Solved decreasing zero-mean world configuration."""

    family: str
    n_worlds: int
    points: tuple
    shoot_param: float
    residuals: dict

    @property
    def variance_sum(self) -> float:
        return float(sum(x * x for x in self.points))


def _step(family: str, baseline: Optional[Baseline], x: float, partial: float,
          cube_factor: float) -> float:
    if family == GROUND:
        return x - 1.0 / partial
    if family == MAXWELL:
        return signed_cbrt(x ** 3 - cube_factor / partial)
    return baseline.Binv(baseline.B(x) - 1.0 / partial)


def _partial_term(family: str, baseline: Optional[Baseline], x: float) -> float:
    if family == GROUND:
        return x
    if family == MAXWELL:
        return 1.0 / x
    return x / float(baseline.b(x))


def shoot_sequence(
    family: str,
    baseline: Optional[Baseline],
    x1: float,
    max_len: int,
    cube_factor: float = 3.0,
):
    """Iterate the family recursion from x_1 = ``x1``.

    Returns the emitted prefix and the reason iteration stopped:
    ``completed``, ``nondecreasing``, ``singular_partial_sum``,
    ``nonfinite`` or ``baseline_zero``.
    """
    if not (x1 > 0):
        raise InvalidStart(f"shooting start must be positive, got {x1}")
    if family == GENERAL and baseline is None:
        raise ValueError("general family requires a baseline")
    xs = [float(x1)]
    partial = 0.0
    reason = "completed"
    for _ in range(1, max_len):
        x = xs[-1]
        if family == MAXWELL and x == 0.0:
            reason = "singular_partial_sum"
            break
        if family == GENERAL and baseline.near_zero_of_b(x, _ZERO_OF_B_TOL):
            reason = "baseline_zero"
            break
        partial += _partial_term(family, baseline, x)
        if partial == 0.0 or not math.isfinite(partial):
            reason = "singular_partial_sum"
            break
        nxt = _step(family, baseline, x, partial, cube_factor)
        if not math.isfinite(nxt):
            reason = "nonfinite"
            break
        if nxt >= x:
            reason = "nondecreasing"
            break
        xs.append(float(nxt))
    return xs, reason


def _matching_defect(family, baseline, x1, n_worlds, cube_factor):
    """Midpoint symmetry defect; -inf when the shot collapses early."""
    half = n_worlds // 2
    length = half + 1
    xs, _ = shoot_sequence(family, baseline, x1, length, cube_factor)
    if len(xs) < length:
        return -math.inf
    if n_worlds % 2 == 0:
        return xs[half] + xs[half - 1]
    return xs[half]


def _requires_even(family: str, baseline: Optional[Baseline]) -> bool:
    if family == MAXWELL:
        return True
    if family == GENERAL and baseline is not None:
        return baseline.near_zero_of_b(0.0, 1e-12)
    return False


def recursion_residual(
    family: str,
    points: Sequence[float],
    baseline: Optional[Baseline] = None,
    cube_factor: float = 3.0,
) -> float:
    """Max defect of the defining recursion over the full sequence."""
    worst = 0.0
    partial = 0.0
    for n in range(len(points) - 1):
        x, nxt = points[n], points[n + 1]
        partial += _partial_term(family, baseline, x)
        if partial == 0.0:
            return math.inf
        if family == GROUND:
            defect = nxt - x + 1.0 / partial
        elif family == MAXWELL:
            defect = nxt ** 3 - x ** 3 + cube_factor / partial
        else:
            defect = float(baseline.B(nxt)) - float(baseline.B(x)) + 1.0 / partial
        worst = max(worst, abs(defect))
    return worst


def solve_configuration(
    family: str,
    n_worlds: int,
    baseline: Optional[Baseline] = None,
    cube_factor: float = 3.0,
    residual_tol: float = _RESIDUAL_TOL,
) -> Configuration:
    """Solve for the unique strictly decreasing zero-mean configuration."""
    if n_worlds < 2:
        raise ValueError("need at least two worlds")
    if _requires_even(family, baseline) and n_worlds % 2 == 1:
        raise ParityUnsupported(
            f"family {family!r} needs an even world count, got {n_worlds}"
        )
    scale = math.sqrt(math.log(n_worlds) + 1.0)
    lo, hi = 0.5 * scale, 2.0 * scale

    bracket = None
    for _ in range(11):
        probes = np.geomspace(lo, hi, 33)
        vals = [_matching_defect(family, baseline, p, n_worlds, cube_factor)
                for p in probes]
        # Rightmost crossing: baselines with interior zeros admit spurious
        # squeezed solutions at smaller x1; the spread solution is the one
        # whose empirical law tracks the target density.
        for i in range(len(probes) - 2, -1, -1):
            a, b = vals[i], vals[i + 1]
            if b == 0.0:
                bracket = (probes[i + 1], probes[i + 1])
                break
            if a == 0.0:
                bracket = (probes[i], probes[i])
                break
            if (a < 0) != (b < 0):
                bracket = (probes[i], probes[i + 1])
                break
        if bracket is not None:
            break
        lo /= 2.0
        hi *= 2.0
        if hi > 10.0 * math.sqrt(math.log(n_worlds) + 1.0) * 2 ** 10:
            break
    if bracket is None:
        raise BracketFailure(
            f"no sign change for x1 in (0, {hi:g}] ({family}, N={n_worlds})"
        )

    a, b = bracket
    fa = _matching_defect(family, baseline, a, n_worlds, cube_factor)
    if a == b or fa == 0.0:
        x1 = a
    else:
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            fm = _matching_defect(family, baseline, mid, n_worlds, cube_factor)
            if fm == 0.0:
                a = b = mid
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        x1 = 0.5 * (a + b)

    half = n_worlds // 2
    xs, reason = shoot_sequence(family, baseline, x1, half + 1, cube_factor)
    if len(xs) < half + 1:
        raise ResidualFailure(
            f"solved shot collapsed after {len(xs)} points ({reason})"
        )
    first = xs[:half]
    if first[-1] <= 0.0:
        raise ResidualFailure("positive half of the configuration crossed zero")
    mirrored = [-v for v in reversed(first)]
    points = first + mirrored if n_worlds % 2 == 0 else first + [0.0] + mirrored

    if family == GENERAL:
        for x in points:
            if baseline.near_zero_of_b(x, _ZERO_OF_B_TOL):
                raise ResidualFailure(
                    f"world location {x:g} lands on a zero of the baseline"
                )

    residual = recursion_residual(family, points, baseline, cube_factor)
    if residual > residual_tol:
        raise ResidualFailure(
            f"recursion defect {residual:.3e} exceeds {residual_tol:g} "
            f"({family}, N={n_worlds})"
        )
    mean_abs = abs(sum(points)) / n_worlds
    symmetry = max(
        abs(points[n] + points[n_worlds - 1 - n]) for n in range(n_worlds)
    )
    residuals = {
        "max_recursion_residual": residual,
        "mean_abs": mean_abs,
        "symmetry_defect": symmetry,
    }
    if family == MAXWELL:
        residuals["variance_defect"] = abs(
            sum(x * x for x in points) - cube_factor * (n_worlds - 1)
        )
    return Configuration(
        family=family,
        n_worlds=n_worlds,
        points=tuple(points),
        shoot_param=x1,
        residuals=residuals,
    )


def validate_properties(
    cfg: Configuration,
    baseline: Optional[Baseline] = None,
    cube_factor: float = 3.0,
) -> dict:
    """Report the four structural defects plus growth diagnostics."""
    pts = cfg.points
    n = cfg.n_worlds
    report = {
        "p1_zero_mean_defect": abs(sum(pts)),
        "p2_variance_defect": (
            abs(sum(x * x for x in pts) - 3.0 * (n - 1))
            if cfg.family == MAXWELL
            else None
        ),
        "p3_symmetry_defect": max(abs(pts[i] + pts[n - 1 - i]) for i in range(n)),
        "p4_decreasing_violation": max(
            (pts[i + 1] - pts[i] for i in range(n - 1)), default=-math.inf
        )
        > 0,
        "recursion_residual": recursion_residual(
            cfg.family, pts, baseline, cube_factor
        ),
        "x1_over_sqrt_log_n": (
            pts[0] / math.sqrt(math.log(n)) if n >= 8 else None
        ),
    }
    return report


def configuration_to_json(cfg: Configuration) -> str:
    payload = {
        "family": cfg.family,
        "N": cfg.n_worlds,
        "points": list(cfg.points),
        "shoot_param": cfg.shoot_param,
        "residuals": cfg.residuals,
    }
    return json.dumps(payload)


def configuration_from_json(text: str) -> Configuration:
    raw = json.loads(text)
    return Configuration(
        family=raw["family"],
        n_worlds=raw["N"],
        points=tuple(raw["points"]),
        shoot_param=raw["shoot_param"],
        residuals=raw["residuals"],
    )
