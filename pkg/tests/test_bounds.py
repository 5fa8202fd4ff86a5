import json
import math

import numpy as np
import pytest

from clockgap.bounds import (
    BOUND_SLACK,
    aharonov_bound,
    bound_minimizer,
    compare_prior_bounds,
    deift_bound,
    epsilon,
    exact_gap,
    gap_lower_curve,
    gap_table,
    golden_section,
    grid_then_golden,
    lambda0_upper,
    lambda1_lower,
    min_gap_bound_closed,
    min_gap_bound_numeric,
    min_gap_exact,
    verify_decompositions,
    weyl_sandwich,
)
from clockgap.tridiag import eigs_bisect, hermitian_eigvalsh, reduced_hamiltonian

S_GRID = np.linspace(0.0, 1.0, 21)


# ---- Weyl sandwich ----------------------------------------------------------


def test_weyl_examples():
    assert weyl_sandwich([0, 1], [0, 0], 1) == (1.0, 1.0)
    assert weyl_sandwich([-1, 0], [0, 2], 0) == (-1.0, 1.0)


def test_weyl_validation():
    with pytest.raises(ValueError):
        weyl_sandwich([0, 1], [0, 1, 2], 0)
    with pytest.raises(IndexError):
        weyl_sandwich([0, 1], [0, 1], 2)
    with pytest.raises(ValueError):
        weyl_sandwich([1, 0], [0, 1], 0)


def _random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def test_weyl_random_hermitian_pairs(rng):
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a, b = _random_hermitian(rng, n), _random_hermitian(rng, n)
        ea, eb, eab = hermitian_eigvalsh(a), hermitian_eigvalsh(b), hermitian_eigvalsh(a + b)
        for k in range(n):
            lo, hi = weyl_sandwich(ea, eb, k)
            assert lo - 1e-10 <= eab[k] <= hi + 1e-10


# ---- component bounds -------------------------------------------------------


def test_lambda1_lower_examples():
    assert lambda1_lower(0.0, 5) == pytest.approx(1.0, abs=1e-15)
    assert lambda1_lower(1.0, 1) == pytest.approx(1 - math.cos(math.pi / 4), abs=1e-14)
    for L in (1, 7, 30):
        for s in S_GRID:
            assert lambda1_lower(float(s), L) == pytest.approx(
                1 - s * math.cos(epsilon(L)), abs=1e-14
            )


def test_lambda0_upper_examples():
    assert lambda0_upper(1.0, 4) == 0.0
    assert lambda0_upper(0.5, 4) == pytest.approx(1 / 6, abs=1e-14)
    for L in (1, 2, 9, 33):
        for s in S_GRID:
            s = float(s)
            assert lambda0_upper(s, L) == pytest.approx(s * (1 - s) / (2 - s), abs=1e-13)


@pytest.mark.parametrize("L", [1, 2, 3, 8, 17, 64])
def test_bound_chain(L):
    for row in gap_table(L, S_GRID):
        assert row.lambda0 <= row.lambda0_upper + BOUND_SLACK
        assert row.lambda1 >= row.lambda1_lower - BOUND_SLACK
        assert row.gap >= gap_lower_curve(row.s, L) - BOUND_SLACK


def test_tight_at_s1():
    lam = eigs_bisect(reduced_hamiltonian(6, 1.0)).eigenvalues
    assert abs(lam[0]) <= BOUND_SLACK
    assert lambda0_upper(1.0, 6) == 0.0


# ---- decompositions ---------------------------------------------------------


@pytest.mark.parametrize("L,s", [(2, 0.5), (1, 1.0), (8, 0.3), (5, 0.0), (16, 0.999)])
def test_decompositions(L, s):
    r1, r2 = verify_decompositions(L, s)
    assert r1 <= 1e-14 and r2 <= 1e-14


def test_decomposition_l1_s1_exact():
    assert verify_decompositions(1, 1.0) == (0.0, 0.0)


# ---- gap curve and closed form --------------------------------------------


def test_gap_lower_curve_examples():
    assert gap_lower_curve(0.0, 8) == 1.0
    assert gap_lower_curve(1.0, 8) == pytest.approx(1 - math.cos(math.pi / 18), abs=1e-15)
    assert gap_lower_curve(0.5, 8) == pytest.approx(0.340929, abs=1e-6)
    with pytest.raises(ValueError):
        gap_lower_curve(1.5, 8)


def test_closed_form_l1():
    closed, leading = min_gap_bound_closed(1)
    assert closed == pytest.approx(2 * math.sqrt(2 + math.sqrt(2)) - (2 + math.sqrt(2)), abs=1e-15)
    assert closed == pytest.approx(0.281305, abs=1e-6)
    assert leading == pytest.approx((math.pi / 4) ** 2 / 2)


@pytest.mark.parametrize("L", [8, 16, 100, 1000])
def test_closed_form_leading_order(L):
    closed, leading = min_gap_bound_closed(L)
    eps = epsilon(L)
    assert abs(closed - leading) <= eps**4
    # the next term is -7 eps^4 / 96
    assert closed - leading == pytest.approx(-7 * eps**4 / 96, rel=0.05)


@pytest.mark.parametrize("L", [1, 2, 5, 8, 32, 200])
def test_closed_form_matches_numeric_minimum(L):
    _, numeric = min_gap_bound_numeric(L)
    closed, _ = min_gap_bound_closed(L)
    assert abs(numeric - closed) <= 1e-10
    s_num, _ = min_gap_bound_numeric(L)
    assert abs(s_num - bound_minimizer(L)) <= 1e-4


# ---- minimisation -----------------------------------------------------------


def test_golden_section_quadratic():
    x, fx = golden_section(lambda t: (t - 0.3) ** 2 + 1, 0, 1, 1e-12)
    assert abs(x - 0.3) <= 1e-6 and fx == pytest.approx(1.0)


def test_grid_rejects_multimodal():
    f = lambda s: np.cos(12 * np.pi * np.asarray(s))  # noqa: E731
    with pytest.raises(RuntimeError):
        grid_then_golden(f, f)


def test_min_gap_exact_l1():
    s_star, gap = min_gap_exact(1)
    assert gap == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert s_star == pytest.approx(0.5, abs=1e-5)
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(exact_gap(s, 1), np.sqrt((1 - s) ** 2 + s**2), atol=1e-12)


@pytest.mark.parametrize("L", [2, 4, 8, 16, 32])
def test_min_gap_exceeds_bound(L):
    _, gap = min_gap_exact(L)
    closed, _ = min_gap_bound_closed(L)
    assert gap >= closed - BOUND_SLACK
    if L == 8:
        assert gap >= 1 / 162 and gap >= 1 / 9216


# ---- prior bounds -----------------------------------------------------------


def test_prior_bound_formulas():
    assert aharonov_bound(8) == 1 / 9216
    assert deift_bound(8) == 1 / 162


def test_monotone_improvement():
    for L in range(1, 1025):
        closed, _ = min_gap_bound_closed(L)
        assert closed > deift_bound(L) > aharonov_bound(L)


def test_report_large_L_ratios():
    rep = compare_prior_bounds(512, table_points=0, exact=False)
    assert 0.95 <= rep.ratio_to_aharonov / (18 * math.pi**2) <= 1.05
    assert 0.95 <= rep.ratio_to_deift / (math.pi**2 / 4) <= 1.05


def test_report_l1_is_complete():
    rep = compare_prior_bounds(1)
    d = rep.to_dict()
    json.dumps(d)
    for key in ("min_gap_exact", "s_star", "bound_closed_form", "aharonov_bound", "deift_bound"):
        assert math.isfinite(d[key])
    assert rep.min_gap_exact >= rep.bound_closed_form
    assert rep.violations() == []
    assert len(rep.table) == 11
