"""Command-line surface for solving, certifying and exporting.

Every acceptance check is reachable through one subcommand; outputs are
deterministic (byte-identical across runs for a fixed invocation) with
17-significant-digit floats so CSV values round-trip exactly.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .energy import certify_minimizer
from .errors import MiwError, ParityUnsupported
from .metrics import rate_rows_csv, rate_sweep
from .solver import (
    GENERAL,
    GROUND,
    MAXWELL,
    configuration_to_json,
    solve_configuration,
    validate_properties,
)
from .stein import fixed_suite, suite_csv_rows, supnorm_suite
from .targets import (
    ground_baseline,
    hermite_square_baseline,
    maxwell_square_baseline,
    monomial_baseline,
    pdf_pk,
    phi,
)
from .zerobias import coupling_expectations, fixed_point_defect, gzb_density, histogram_density

__all__ = ["main", "export"]

_FAMILIES = ("ground", "maxwell", "hermite-sq", "monomial")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def export(rows, out_format: str, path: Optional[str] = None) -> int:
    """Serialize rows (CSV: header tuple first) or an object (JSON).

    Returns the number of bytes written to ``path`` or to stdout.
    """
    if out_format == "csv":
        text = "\n".join(",".join(_fmt(v) for v in row) for row in rows) + "\n"
    elif out_format == "json":
        text = json.dumps(rows, indent=2, default=_fmt) + "\n"
    else:
        raise ValueError(f"unknown output format {out_format!r}")
    data = text.encode()
    if path:
        try:
            with open(path, "wb") as fh:
                fh.write(data)
        except OSError as exc:
            raise MiwError(f"cannot write {path}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return len(data)


def _resolve_family(args):
    """(solver family, baseline or None, target pdf callable, label)."""
    fam = args.family
    if fam == "ground":
        return GROUND, None, lambda x: float(phi(x)), "ground"
    if fam == "maxwell":
        if args.n is not None and args.n % 2 == 1:
            raise MiwValidation("maxwell requires an even --n")
        return MAXWELL, None, lambda x: float(pdf_pk(1, x)), "maxwell"
    if fam == "hermite-sq":
        if args.k is None:
            raise MiwValidation("hermite-sq requires --k")
        bl = hermite_square_baseline(args.k)
        k = args.k
        return GENERAL, bl, lambda x: float(pdf_pk(k, x)), f"hermite-sq(k={k})"
    if fam == "monomial":
        if args.r is None or args.r < 0 or args.r % 2 == 1:
            raise MiwValidation("monomial requires an even nonnegative --r")
        bl = monomial_baseline(args.r).normalized()
        return GENERAL, bl, lambda x: float(bl.b(x) * phi(x)), f"monomial(r={args.r})"
    raise MiwValidation(f"unknown family {fam!r}")


class MiwValidation(Exception):
    pass


def _require_n(args) -> int:
    if args.n is None:
        raise MiwValidation("this subcommand requires --n")
    if args.n < 2:
        raise MiwValidation("--n must be at least 2")
    return args.n


def _solve(args):
    fam, bl, _, _ = _resolve_family(args)
    return solve_configuration(fam, _require_n(args), baseline=bl)


def _cmd_solve(args) -> int:
    cfg = _solve(args)
    text = configuration_to_json(cfg) + "\n"
    if args.out_path:
        with open(args.out_path, "wb") as fh:
            fh.write(text.encode())
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    fam, bl, _, _ = _resolve_family(args)
    cfg = solve_configuration(fam, _require_n(args), baseline=bl)
    report = validate_properties(cfg, baseline=bl)
    return export(report, "json", args.out_path) and 0


def _cmd_energy(args) -> int:
    fam, bl, _, _ = _resolve_family(args)
    cfg = solve_configuration(fam, _require_n(args), baseline=bl)
    if bl is None:
        bl = ground_baseline() if fam == GROUND else maxwell_square_baseline()
    rep = certify_minimizer(bl, cfg.points)
    payload = {"family": args.family, "N": cfg.n_worlds}
    payload.update(rep.to_dict())
    return export(payload, "json", args.out_path) and 0


def _cmd_density(args) -> int:
    fam, bl, target_pdf, _ = _resolve_family(args)
    cfg = solve_configuration(fam, _require_n(args), baseline=bl)
    hist = histogram_density(cfg.points)
    rows = [("kind", "x0", "x1", "value")]
    for left, right, coeff, mass in hist.to_csv_rows():
        rows.append(("hist", left, right, coeff))
    span = cfg.points[0] - cfg.points[-1]
    lo = cfg.points[-1] - 0.05 * span
    hi = cfg.points[0] + 0.05 * span
    for x in np.linspace(lo, hi, 400):
        rows.append(("target", float(x), float(x), target_pdf(float(x))))
    return export(rows, args.out_format, args.out_path) and 0


def _cmd_coupling(args) -> int:
    fam, bl, _, _ = _resolve_family(args)
    cfg = solve_configuration(fam, _require_n(args), baseline=bl)
    if bl is None:
        bl = ground_baseline() if fam == GROUND else maxwell_square_baseline()
    density = gzb_density(bl, cfg.points)
    rep = coupling_expectations(cfg.points, density)
    payload = {"family": args.family, "N": cfg.n_worlds}
    payload.update(rep.to_dict())
    return export(payload, "json", args.out_path) and 0


def _cmd_stein_check(args) -> int:
    records = [supnorm_suite(tf) for tf in fixed_suite()]
    return export(suite_csv_rows(records), "csv", args.out_path) and 0


def _cmd_rates(args) -> int:
    if not args.n_list:
        raise MiwValidation("rates requires --n-list")
    rows, fit = rate_sweep(MAXWELL, args.n_list)
    csv_rows = rate_rows_csv(rows)
    text = "\n".join(",".join(_fmt(v) for v in row) for row in csv_rows) + "\n"
    if fit is not None:
        text += "# fit " + json.dumps(
            {k: format(v, ".17g") for k, v in fit.items()}
        ) + "\n"
    data = text.encode()
    if args.out_path:
        with open(args.out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_fixed_point(args) -> int:
    defect = fixed_point_defect(k=1)
    return export({"k": 1, "defect": defect}, "json", args.out_path) and 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="miworlds", description=__doc__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, family=True, n=True):
        if family:
            sp.add_argument("--family", choices=_FAMILIES, default="maxwell")
            sp.add_argument("--k", type=int, default=None)
            sp.add_argument("--r", type=int, default=None)
        if n:
            sp.add_argument("--n", type=int, default=None)
        sp.add_argument(
            "--out", dest="out_format", choices=("csv", "json"), default="csv"
        )
        sp.add_argument("--out-path", dest="out_path", default=None)

    for name, fn in (
        ("solve", _cmd_solve),
        ("verify", _cmd_verify),
        ("energy", _cmd_energy),
        ("density", _cmd_density),
        ("coupling", _cmd_coupling),
    ):
        sp = sub.add_parser(name)
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("stein-check")
    common(sp, family=False, n=False)
    sp.set_defaults(func=_cmd_stein_check)

    sp = sub.add_parser("rates")
    sp.add_argument("--n-list", type=int, nargs="+", default=None)
    common(sp, family=False, n=False)
    sp.set_defaults(func=_cmd_rates)

    sp = sub.add_parser("fixed-point")
    common(sp, family=False, n=False)
    sp.set_defaults(func=_cmd_fixed_point)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (MiwValidation, ValueError, ParityUnsupported) as exc:
        print(f"miworlds: {exc}", file=sys.stderr)
        return 1
    except MiwError as exc:
        print(f"miworlds: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
