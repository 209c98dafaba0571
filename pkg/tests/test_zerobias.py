import math

import numpy as np
import pytest

from miworlds.errors import (
    AsymmetricInput,
    AtomAtZero,
    MismatchedBreakpoints,
    NotDecreasing,
)
from miworlds.metrics import wasserstein1
from miworlds.targets import ground_baseline, maxwell_square_baseline
from miworlds.zerobias import (
    EmpiricalDist,
    coupling_expectations,
    fixed_point_defect,
    gzb_density,
    histogram_density,
)

BL = maxwell_square_baseline()


def test_empirical_dist_basics():
    e = EmpiricalDist((1.0, -1.0))
    assert e.cdf(1.0) == 1.0
    assert e.cdf(0.0) == 0.5
    assert e.cdf_left(-1.0) == 0.0
    assert e.quantile(0.5) == -1.0
    assert e.quantile(1.0) == 1.0
    # quantile(cdf(atom)) fixes atoms
    for a in e.atoms:
        assert e.quantile(e.cdf(a)) == a
    with pytest.raises(NotDecreasing):
        EmpiricalDist((0.0, 1.0))


def test_gzb_single_interval_maxwell():
    d = gzb_density(BL, (1.0, -1.0))
    assert d.coeffs == pytest.approx((1.5,), abs=1e-14)
    assert d.masses == pytest.approx((1.0,), abs=1e-14)
    assert d.pdf(0.5) == pytest.approx(1.5 * 0.25, abs=1e-14)
    assert d.pdf(1.5) == 0.0
    assert d.cdf(0.0) == pytest.approx(0.5, abs=1e-14)
    assert d.quantile(0.5) == pytest.approx(0.0, abs=1e-12)


def test_gzb_single_interval_ground():
    d = gzb_density(ground_baseline(), (1.0, -1.0))
    assert d.pdf(0.3) == pytest.approx(0.5, abs=1e-14)


def test_gzb_mass_per_interval(maxwell_configs):
    d = gzb_density(BL, maxwell_configs[22].points)
    assert max(abs(m - 1.0 / 21.0) for m in d.masses) <= 1e-10


def test_gzb_guards():
    with pytest.raises(AsymmetricInput):
        gzb_density(BL, (1.0, -0.5))
    with pytest.raises(NotDecreasing):
        gzb_density(BL, (-1.0, 1.0))


def test_gzb_quantile_inverts_cdf(maxwell_configs):
    d = gzb_density(BL, maxwell_configs[8].points)
    for u in (0.05, 0.3, 0.5, 0.77, 0.999):
        x = d.quantile(u)
        assert d.cdf(x) == pytest.approx(u, abs=1e-10)


def test_gzb_csv_rows(maxwell_configs):
    d = gzb_density(BL, maxwell_configs[8].points)
    rows = d.to_csv_rows()
    assert len(rows) == 7
    for left, right, coeff, mass in rows:
        assert left < right and coeff > 0 and mass > 0
    assert sum(r[3] for r in rows) == pytest.approx(1.0, abs=1e-12)


def test_histogram_density_masses():
    h = histogram_density((1.0, 0.0, -1.0))
    assert h.masses == pytest.approx((0.5, 0.5), abs=1e-15)
    assert h.pdf(0.5) == pytest.approx(0.5, abs=1e-15)
    assert h.cdf(0.5) == pytest.approx(0.75, abs=1e-14)


def test_coupling_identical_marginals_zero():
    # a symmetric two-atom empirical coupled to itself (degenerate
    # intervals) yields zero transport in every term
    atoms = (1.0, -1.0)
    d = gzb_density(BL, atoms)
    # shrink the density onto the atoms by comparing against itself via
    # the wasserstein oracle instead: e_abs equals d_W(emp, gzb)
    rep = coupling_expectations(atoms, d)
    emp = EmpiricalDist(atoms)
    dw = wasserstein1(emp.cdf, d.cdf, (-1.5, 1.5), jumps=atoms)
    assert rep.e_abs == pytest.approx(dw, abs=1e-9)


def test_coupling_n2_closed_forms(maxwell_configs):
    cfg = maxwell_configs[2]
    a = cfg.points[0]
    rep = coupling_expectations(cfg.points, gzb_density(BL, cfg.points))
    assert rep.e_abs == pytest.approx(a / 4.0, abs=1e-12)
    assert rep.e_wabs == pytest.approx(a * a / 4.0, abs=1e-12)
    assert rep.e_ratio == pytest.approx(0.25, abs=1e-12)
    assert rep.rhs_bound == pytest.approx(
        6 * rep.e_abs + 7 * rep.e_wabs + 18 * rep.e_inv + 22 * rep.e_ratio, abs=1e-14
    )


@pytest.mark.parametrize("n", [8, 32, 128])
def test_coupling_b1_bound(n, maxwell_configs):
    cfg = maxwell_configs[n]
    rep = coupling_expectations(cfg.points, gzb_density(BL, cfg.points))
    assert rep.e_abs <= 2.0 * cfg.points[0] / (n - 1)


def test_coupling_guards(maxwell_configs):
    d = gzb_density(BL, maxwell_configs[8].points)
    with pytest.raises(MismatchedBreakpoints):
        coupling_expectations(maxwell_configs[2].points, d)
    hist = histogram_density((1.0, 0.0, -1.0))
    with pytest.raises(AtomAtZero):
        coupling_expectations((1.0, 0.0, -1.0), hist)


def test_coupling_matches_wasserstein(maxwell_configs):
    cfg = maxwell_configs[22]
    d = gzb_density(BL, cfg.points)
    emp = EmpiricalDist(cfg.points)
    dw = wasserstein1(
        emp.cdf, d.cdf, (cfg.points[-1] - 0.1, cfg.points[0] + 0.1), jumps=cfg.points
    )
    rep = coupling_expectations(cfg.points, d)
    assert rep.e_abs == pytest.approx(dw, abs=1e-9)


@pytest.mark.parametrize(
    "f,df",
    [
        (lambda x: x, lambda x: 1.0),
        (lambda x: x ** 3, lambda x: 3 * x * x),
        (math.sin, math.cos),
    ],
)
def test_definition_identity(f, df, maxwell_configs):
    # sigma^2 E[f'(W*)/b(W*)] = E[W f(W)/b(W)].  Taking f = B shows the
    # only compatible constant is sigma^2 = E[W B(W)/b(W)]; for the
    # empirical Maxwell configuration that is (N-1)/N, approaching the
    # continuous value 1.  (E[W^2/b(W)] equals it only in the limit.)
    cfg = maxwell_configs[22]
    n = cfg.n_worlds
    sigma2 = sum(x * float(BL.B(x)) / float(BL.b(x)) for x in cfg.points) / n
    assert sigma2 == pytest.approx((n - 1) / n, abs=1e-9)
    d = gzb_density(BL, cfg.points)
    lhs = 0.0
    from miworlds.numerics import integrate_adaptive

    for (left, right, coeff, _mass) in d.to_csv_rows():
        lhs += coeff * integrate_adaptive(lambda x: df(x), left, right)
    rhs = sum(x * f(x) / float(BL.b(x)) for x in cfg.points) / n
    assert abs(sigma2 * lhs - rhs) <= 1e-7


def test_rate_orders(sweep_rows):
    # the four Corollary-proof orders, as boundedness of the scaled terms
    e1 = [r.e_abs * r.N / math.sqrt(math.log(r.N)) for r in sweep_rows]
    e2 = [r.e_wabs * r.N / math.log(r.N) for r in sweep_rows]
    e3 = [r.e_inv * math.sqrt(r.N) for r in sweep_rows]
    e4 = [r.e_ratio * math.sqrt(r.N / math.log(r.N)) for r in sweep_rows]
    for seq in (e1, e2, e3, e4):
        assert all(np.isfinite(seq))
        assert max(seq) <= 3.0 * seq[0]


def test_fixed_point_defect():
    assert fixed_point_defect(k=1) <= 1e-10
    with pytest.raises(ValueError):
        fixed_point_defect(k=2)
