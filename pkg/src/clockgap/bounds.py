"""Eigenvalue bounds and the minimum spectral gap of the reduced Hamiltonian.

The gap bound comes from two one-sided eigenvalue estimates:

* ``lambda_1(s) >= 1 - s cos(eps)``, from ``H = I - (s/2) T(-1, 1) - e_0 e_0^T``
  and the lower half of the Weyl sandwich;
* ``lambda_0(s) <= s (1 - s) / (2 - s)``, from
  ``H = I - (s/2) T(q, 1/q) - c e_L e_L^T`` with ``q = 2/s - 1`` and
  ``c = s (1 - s) / (2 - s) >= 0``, so subtracting ``c e_L e_L^T`` can only
  lower eigenvalues.

with ``eps = pi / (2L + 2)``.  Minimising their difference over ``s`` gives
``2 sqrt(2 (1 + cos eps)) - 2 (1 + cos eps)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .tridiag import (
    SymTridiag,
    reduced_hamiltonian,
    reduced_lowest_pair,
    t_matrix,
    t_minus11_eigs,
    t_q_eigs,
)

BOUND_SLACK = 2e-12
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def epsilon(L: int) -> float:
    return math.pi / (2 * L + 2)


def aharonov_bound(L: int) -> float:
    """Earlier gap bound ``1 / (144 L^2)``."""
    return 1.0 / (144.0 * L * L)


def deift_bound(L: int) -> float:
    """Earlier gap bound ``1 / (2 (L+1)^2)``."""
    return 1.0 / (2.0 * (L + 1) ** 2)


def _check_s(s):
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")


def _check_L(L):
    if int(L) != L or L < 1:
        raise ValueError(f"L must be an integer >= 1, got {L}")


# --------------------------------------------------------------------------
# Weyl machinery


def weyl_sandwich(eigs_a, eigs_b, k: int) -> tuple[float, float]:
    """Interval ``[mu_k(A) + mu_0(B), mu_k(A) + mu_max(B)]`` containing ``mu_k(A + B)``.

    Both spectra must be sorted ascending.
    """
    a = np.asarray(eigs_a, dtype=float)
    b = np.asarray(eigs_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"spectra must be 1-D of equal length, got {a.shape} and {b.shape}")
    if not 0 <= k < a.size:
        raise IndexError(f"k={k} out of range for {a.size} eigenvalues")
    if np.any(np.diff(a) < 0) or np.any(np.diff(b) < 0):
        raise ValueError("spectra must be sorted ascending")
    return float(a[k] + b[0]), float(a[k] + b[-1])


def _scaled_t_q(L: int, s: float) -> SymTridiag:
    """``(s/2) T(q, 1/q)`` with ``q = 2/s - 1``; the ``s -> 0`` limit is ``e_0 e_0^T``."""
    if s == 0.0:
        d = np.zeros(L + 1)
        d[0] = 1.0
        return SymTridiag(d, np.zeros(L))
    q = 2.0 / s - 1.0
    t = t_matrix(L, q, 1.0 / q)
    return SymTridiag(0.5 * s * t.diag, 0.5 * s * t.offdiag)


def lambda1_lower(s: float, L: int) -> float:
    """Weyl lower bound on the first excited eigenvalue: ``1 - s cos(eps)``.

    ``A = -e_0 e_0^T`` has spectrum ``(-1, 0, ..., 0)``, and the spectrum of
    ``B = I - (s/2) T(-1, 1)`` is known in closed form.
    """
    _check_s(s)
    _check_L(L)
    eigs_a = np.zeros(L + 1)
    eigs_a[0] = -1.0
    eigs_b = np.sort(1.0 - 0.5 * s * t_minus11_eigs(L))
    return weyl_sandwich(eigs_a, eigs_b, 1)[0]


def lambda0_upper(s: float, L: int) -> float:
    """Upper bound on the ground eigenvalue: lowest eigenvalue of ``I - (s/2) T(q, 1/q)``.

    Equals ``s (1 - s) / (2 - s)``.  At ``s in {0, 1}`` (``q`` infinite or 1)
    the closed form is returned directly.
    """
    _check_s(s)
    _check_L(L)
    if s in (0.0, 1.0):
        return s * (1.0 - s) / (2.0 - s)
    q = 2.0 / s - 1.0
    eigs_a_prime = np.sort(1.0 - 0.5 * s * t_q_eigs(L, q))
    return float(eigs_a_prime[0])


def verify_decompositions(L: int, s: float) -> tuple[float, float]:
    """Entrywise residuals of the two splittings of the reduced Hamiltonian.

    1. ``H - (I - (s/2) T(-1, 1) - e_0 e_0^T)``
    2. ``H - (I - (s/2) T(q, 1/q) - c e_L e_L^T)``, ``c = s (1 - s) / (2 - s)``

    Also checks that ``c e_L e_L^T`` is positive semidefinite.
    """
    _check_s(s)
    _check_L(L)
    h = reduced_hamiltonian(L, s).to_dense()
    eye = np.eye(L + 1)

    e0 = np.zeros((L + 1, L + 1))
    e0[0, 0] = 1.0
    first = eye - 0.5 * s * t_matrix(L, -1.0, 1.0).to_dense() - e0

    c = s * (1.0 - s) / (2.0 - s)
    b = np.zeros((L + 1, L + 1))
    b[L, L] = c
    if np.min(np.diag(b)) < 0:
        raise RuntimeError(f"rank-one correction has negative weight {c} at s={s}")
    second = eye - _scaled_t_q(L, s).to_dense() - b

    return float(np.max(np.abs(h - first))), float(np.max(np.abs(h - second)))


# --------------------------------------------------------------------------
# gap curves


def gap_lower_curve(s, L: int):
    """``1 - s cos(eps) - s (1 - s) / (2 - s)``; accepts scalars or arrays."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(s_arr > 1):
        raise ValueError("s must lie in [0, 1]")
    out = 1.0 - s_arr * math.cos(epsilon(L)) - s_arr * (1.0 - s_arr) / (2.0 - s_arr)
    return float(out) if out.ndim == 0 else out


def min_gap_bound_closed(L: int) -> tuple[float, float]:
    """``(2 sqrt(2c) - 2c, eps^2 / 2)`` with ``c = 1 + cos(eps)``."""
    _check_L(L)
    eps = epsilon(L)
    c = 1.0 + math.cos(eps)
    return 2.0 * math.sqrt(2.0 * c) - 2.0 * c, 0.5 * eps * eps


def bound_minimizer(L: int) -> float:
    """Where the lower curve attains its minimum: ``s* = 2 - sqrt(2 / (1 + cos eps))``."""
    return 2.0 - math.sqrt(2.0 / (1.0 + math.cos(epsilon(L))))


def exact_gap(s, L: int):
    """``lambda_1(s) - lambda_0(s)`` by Sturm bisection; scalars or arrays."""
    pair = reduced_lowest_pair(L, s)
    gap = pair[..., 1] - pair[..., 0]
    return float(gap) if np.ndim(gap) == 0 else gap


# --------------------------------------------------------------------------
# 1-D minimisation


def golden_section(f, a: float, b: float, tol: float = 1e-10) -> tuple[float, float]:
    """Minimum of a unimodal ``f`` on ``[a, b]`` to bracket width ``tol``."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # the bracket midpoint is not always the best point seen
    for xc, fcand in ((c, fc), (d, fd)):
        if fcand < fx:
            x, fx = xc, fcand
    return x, fx


def _local_minima(values: np.ndarray) -> int:
    v = values
    interior = np.sum((v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:]))
    return int(interior + (v[0] < v[1]) + (v[-1] < v[-2]))


def grid_then_golden(f_vec, f_scalar, n_grid: int = 1001, tol: float = 1e-10):
    """Global minimum on ``[0, 1]``: coarse grid, then golden section around the best cell.

    Unimodality is not proven; it is checked on the grid and a
    ``RuntimeError`` is raised if a second local minimum shows up.
    """
    grid = np.linspace(0.0, 1.0, n_grid)
    values = f_vec(grid)
    if _local_minima(values) > 1:
        raise RuntimeError("objective has more than one local minimum on the grid")
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n_grid - 1)]
    x, fx = golden_section(f_scalar, lo, hi, tol)
    if values[i] < fx:
        x, fx = float(grid[i]), float(values[i])
    return float(x), float(fx)


def min_gap_exact(L: int, n_grid: int = 1001, tol: float = 1e-10) -> tuple[float, float]:
    """``(s*, min_s Delta(s))`` for the exact gap of the reduced Hamiltonian."""
    _check_L(L)
    return grid_then_golden(
        lambda s: exact_gap(s, L), lambda s: exact_gap(s, L), n_grid, tol
    )


def min_gap_bound_numeric(L: int, n_grid: int = 10_001, tol: float = 1e-10) -> tuple[float, float]:
    """Numerical minimum of :func:`gap_lower_curve`, an oracle for the closed form."""
    _check_L(L)
    return grid_then_golden(
        lambda s: gap_lower_curve(s, L), lambda s: gap_lower_curve(s, L), n_grid, tol
    )


# --------------------------------------------------------------------------
# reports


@dataclass
class GapRow:
    s: float
    lambda0: float
    lambda1: float
    gap: float
    lambda0_upper: float
    lambda1_lower: float


@dataclass
class GapReport:
    L: int
    epsilon: float
    min_gap_exact: float
    s_star: float
    bound_closed_form: float
    bound_leading_order: float
    aharonov_bound: float
    deift_bound: float
    table: list[GapRow] = field(default_factory=list)

    @property
    def ratio_to_aharonov(self) -> float:
        return self.bound_closed_form / self.aharonov_bound

    @property
    def ratio_to_deift(self) -> float:
        return self.bound_closed_form / self.deift_bound

    def violations(self, slack: float = BOUND_SLACK) -> list[str]:
        """Human-readable list of broken invariants; empty when all hold."""
        out = []
        if self.min_gap_exact < self.bound_closed_form - slack:
            out.append(
                f"L={self.L}: exact min gap {self.min_gap_exact!r} below bound "
                f"{self.bound_closed_form!r}"
            )
        if self.bound_closed_form < self.aharonov_bound:
            out.append(f"L={self.L}: bound below 1/(144 L^2)")
        if self.bound_closed_form < self.deift_bound:
            out.append(f"L={self.L}: bound below 1/(2 (L+1)^2)")
        for row in self.table:
            if row.lambda0 > row.lambda0_upper + slack:
                out.append(f"L={self.L}, s={row.s!r}: lambda0 above its upper bound")
            if row.lambda1 < row.lambda1_lower - slack:
                out.append(f"L={self.L}, s={row.s!r}: lambda1 below its lower bound")
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ratio_to_aharonov"] = self.ratio_to_aharonov
        d["ratio_to_deift"] = self.ratio_to_deift
        return d


def gap_table(L: int, s_values) -> list[GapRow]:
    s_values = np.asarray(s_values, dtype=float)
    pairs = reduced_lowest_pair(L, s_values)
    rows = []
    for s, (l0, l1) in zip(s_values, pairs):
        s = float(s)
        rows.append(
            GapRow(
                s=s,
                lambda0=float(l0),
                lambda1=float(l1),
                gap=float(l1 - l0),
                lambda0_upper=lambda0_upper(s, L),
                lambda1_lower=lambda1_lower(s, L),
            )
        )
    return rows


def compare_prior_bounds(L: int, table_points: int = 11, exact: bool = True) -> GapReport:
    """Assemble a :class:`GapReport` for one ``L``.

    With ``exact=False`` the exact minimisation is skipped and the exact
    fields are NaN; useful for very large ``L`` where only the ratios matter.
    """
    _check_L(L)
    closed, leading = min_gap_bound_closed(L)
    if exact:
        s_star, gap = min_gap_exact(L)
    else:
        s_star, gap = math.nan, math.nan
    table = gap_table(L, np.linspace(0.0, 1.0, table_points)) if table_points else []
    return GapReport(
        L=L,
        epsilon=epsilon(L),
        min_gap_exact=gap,
        s_star=s_star,
        bound_closed_form=closed,
        bound_leading_order=leading,
        aharonov_bound=aharonov_bound(L),
        deift_bound=deift_bound(L),
        table=table,
    )
