"""Eigenvector ansatz for the reduced Hamiltonian.

Eigenvectors take the form ``cosh((L - k + 1/2) theta)`` (one "real" root,
the ground state) or ``cos((L - k + 1/2) theta)`` (``L`` "complex" roots,
the excited states).  The angles solve

    s = f_real(theta)    = 1 - tanh((L+1) theta) tanh(theta/2)
    s = f_complex(theta) = 1 + tan((L+1) theta) tan(theta/2)

and the eigenvalues are ``1 - s cosh(theta_0)`` and ``1 - s cos(theta_l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .tridiag import reduced_hamiltonian

THETA_TOL = 1e-13
POLE_GUARD = 1e-9


class Branch(str, Enum):
    REAL = "real"
    COMPLEX = "complex"


class BracketError(RuntimeError):
    """No sign change across a root bracket."""


@dataclass(frozen=True)
class BranchSolution:
    branch: Branch
    index: int
    theta: float  # math.inf marks the s = 0 ground state
    s: float
    L: int

    @property
    def eigenvalue(self) -> float:
        if self.branch is Branch.REAL:
            if math.isinf(self.theta):
                return 0.0
            return 1.0 - self.s * math.cosh(self.theta)
        return 1.0 - self.s * math.cos(self.theta)


@dataclass(frozen=True)
class AnsatzSpectrum:
    s: float
    L: int
    solutions: tuple[BranchSolution, ...]
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # unnormalised, one per column

    def residuals(self) -> np.ndarray:
        """``||H psi - lambda psi|| / ||psi||`` for every eigenpair."""
        h = reduced_hamiltonian(self.L, self.s)
        out = []
        for lam, psi in zip(self.eigenvalues, self.eigenvectors.T):
            out.append(np.linalg.norm(h.matvec(psi) - lam * psi) / np.linalg.norm(psi))
        return np.array(out)


def _check_s(s):
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")


def _check_L(L):
    if int(L) != L or L < 1:
        raise ValueError(f"L must be an integer >= 1, got {L}")


def pole(L: int, l: int) -> float:
    """Location ``(2l - 1) pi / (2L + 2)`` of the l-th divergence of ``f_complex``."""
    return (2 * l - 1) * math.pi / (2 * L + 2)


# --------------------------------------------------------------------------
# branch functions


def _one_minus_tanh(x: float) -> float:
    # 1 - tanh(x) = 2 e^{-2x} / (1 + e^{-2x}), exact for large x
    t = math.exp(-2.0 * x)
    return 2.0 * t / (1.0 + t)


def f_real(theta: float, L: int) -> float:
    """``1 - tanh((L+1) theta) tanh(theta/2)``, decreasing from 1 to 0."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    a = (L + 1) * theta
    b = 0.5 * theta
    # 1 - ta*tb = (1 - ta) + ta*(1 - tb): no cancellation when both tanh -> 1
    return _one_minus_tanh(a) + math.tanh(a) * _one_minus_tanh(b)


def f_complex(theta: float, L: int) -> float:
    """``1 + tan((L+1) theta) tan(theta/2)`` on ``(0, pi)``."""
    if not 0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    for l in range(1, L + 1):
        if abs(theta - pole(L, l)) <= 1e-14:
            raise ValueError(f"theta={theta} is at the pole of f_complex for l={l}")
    return 1.0 + math.tan((L + 1) * theta) * math.tan(0.5 * theta)


def _f_complex_prime(theta: float, L: int) -> float:
    a = (L + 1) * theta
    b = 0.5 * theta
    ca = math.cos(a)
    if ca == 0.0:
        return math.inf
    return (L + 1) * math.tan(b) / ca**2 + 0.5 * math.tan(a) / math.cos(b) ** 2


def _sech2(x: float) -> float:
    t = math.exp(-2.0 * abs(x))
    return 4.0 * t / (1.0 + t) ** 2


def _f_real_prime(theta: float, L: int) -> float:
    a = (L + 1) * theta
    b = 0.5 * theta
    return -((L + 1) * _sech2(a) * math.tanh(b) + 0.5 * math.tanh(a) * _sech2(b))


# --------------------------------------------------------------------------
# root finding


def _bisect(g, lo, hi, tol=THETA_TOL, increasing=True):
    """Root of monotone ``g`` in ``[lo, hi]``; ``g(lo)``, ``g(hi)`` must straddle 0."""
    glo, ghi = g(lo), g(hi)
    if increasing and not (glo < 0 < ghi) or not increasing and not (glo > 0 > ghi):
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: g(lo)={glo!r}, g(hi)={ghi!r}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0.0:
            return mid, lo, hi
        if (gm < 0) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), lo, hi


def _polish(g, dg, x, lo, hi, steps=2):
    """A couple of Newton steps, kept only if they stay in the bracket and help."""
    best, gbest = x, abs(g(x))
    for _ in range(steps):
        d = dg(x)
        if d == 0.0 or not math.isfinite(d):
            break
        x_new = x - g(x) / d
        if not lo <= x_new <= hi:
            break
        x = x_new
        gx = abs(g(x))
        if gx < gbest:
            best, gbest = x, gx
    return best


def solve_real_branch(s: float, L: int) -> BranchSolution:
    """The unique ``theta_0 >= 0`` with ``f_real(theta_0) = s``.

    ``s = 1`` gives ``theta_0 = 0``; ``s = 0`` gives ``theta_0 = inf`` with
    eigenvalue 0.
    """
    _check_s(s)
    _check_L(L)
    if s == 1.0:
        return BranchSolution(Branch.REAL, 0, 0.0, s, L)
    if s == 0.0:
        return BranchSolution(Branch.REAL, 0, math.inf, s, L)

    g = lambda th: f_real(th, L) - s  # noqa: E731
    # ln(2/s - 1) solves the large-(L+1)theta limit; bracket around it
    guess = math.log(2.0 / s - 1.0) if s < 1 else 0.0
    hi = max(guess, 1e-3) * 2 + 1.0
    while g(hi) > 0:
        hi *= 2
    lo = min(guess, hi) * 0.5 if guess > 0 else 0.0
    while lo > 0 and g(lo) < 0:
        lo *= 0.5
    if lo == 0.0:
        lo = 1e-300
        if g(lo) <= 0:  # s within rounding of 1
            return BranchSolution(Branch.REAL, 0, 0.0, s, L)
    theta, lo, hi = _bisect(g, lo, hi, increasing=False)
    theta = _polish(g, lambda th: _f_real_prime(th, L), theta, lo, hi)
    return BranchSolution(Branch.REAL, 0, theta, s, L)


def solve_complex_branch(s: float, L: int, l: int) -> BranchSolution:
    """Root of ``f_complex(theta) = s`` between the poles ``l`` and ``l + 1``.

    The bracket ``((2l-1) pi / (2L+2), (2l+1) pi / (2L+2))`` is shrunk inward
    by ``POLE_GUARD`` of its width so ``tan`` is never evaluated at a pole.
    """
    _check_s(s)
    _check_L(L)
    if not 1 <= l <= L:
        raise ValueError(f"l must lie in 1..{L}, got {l}")
    if s == 1.0:
        return BranchSolution(Branch.COMPLEX, l, l * math.pi / (L + 1), s, L)
    if s == 0.0:
        # tan((L+1) theta) = -cot(theta/2)  =>  (L + 1/2) theta = (l - 1/2) pi
        return BranchSolution(Branch.COMPLEX, l, (2 * l - 1) * math.pi / (2 * L + 1), s, L)

    a, b = pole(L, l), pole(L, l + 1)
    width = b - a
    lo, hi = a + POLE_GUARD * width, b - POLE_GUARD * width
    g = lambda th: f_complex(th, L) - s  # noqa: E731
    theta, lo, hi = _bisect(g, lo, hi, increasing=True)
    theta = _polish(g, lambda th: _f_complex_prime(th, L), theta, lo, hi)
    return BranchSolution(Branch.COMPLEX, l, theta, s, L)


# --------------------------------------------------------------------------
# eigenvectors and the full spectrum


def ansatz_eigenvector(sol: BranchSolution) -> np.ndarray:
    """Unnormalised eigenvector with components indexed ``k = 0..L``."""
    k = np.arange(sol.L + 1)
    arg = sol.L - k + 0.5
    if sol.branch is Branch.REAL:
        if math.isinf(sol.theta):
            e0 = np.zeros(sol.L + 1)
            e0[0] = 1.0
            return e0
        return np.cosh(arg * sol.theta)
    return np.cos(arg * sol.theta)


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def full_ansatz_spectrum(s: float, L: int) -> AnsatzSpectrum:
    """All ``L + 1`` eigenpairs from one real and ``L`` complex roots."""
    _check_s(s)
    _check_L(L)
    sols = [solve_real_branch(s, L)]
    sols += [solve_complex_branch(s, L, l) for l in range(1, L + 1)]
    lam = np.array([sol.eigenvalue for sol in sols])
    vecs = np.column_stack([ansatz_eigenvector(sol) for sol in sols])
    return AnsatzSpectrum(s, L, tuple(sols), lam, vecs)


# --------------------------------------------------------------------------
# closed-form approximations


def lambda0_approx(s: float) -> float:
    """``s (1 - s) / (2 - s)``; never below the true ground eigenvalue."""
    _check_s(s)
    return s * (1.0 - s) / (2.0 - s)


def psi0_approx(s: float, L: int) -> np.ndarray:
    """``[(2/s - 1)^(L-k+1/2) + (2/s - 1)^-(L-k+1/2)] / 2``.

    ``s = 0`` returns ``e_0`` (limit of the normalised form).
    """
    _check_s(s)
    _check_L(L)
    if s == 0.0:
        e0 = np.zeros(L + 1)
        e0[0] = 1.0
        return e0
    q = 2.0 / s - 1.0
    p = L - np.arange(L + 1) + 0.5
    return 0.5 * (q**p + q ** (-p))


def theta_l_approx(s: float, L: int, l: int) -> float:
    """The larger of the pole estimate and the linearisation about ``l pi / (L+1)``."""
    _check_s(s)
    _check_L(L)
    if not 1 <= l <= L:
        raise ValueError(f"l must lie in 1..{L}, got {l}")
    linear = l * math.pi / (L + 1) - (1.0 - s) / ((L + 1) * math.tan(l * math.pi / (2 * L + 2)))
    return max(pole(L, l), linear)


def approx_spectrum(s: float, L: int) -> np.ndarray:
    """Approximate eigenvalues: ``lambda0_approx`` then ``1 - s cos(theta_l_approx)``."""
    lam = [lambda0_approx(s)]
    lam += [1.0 - s * math.cos(theta_l_approx(s, L, l)) for l in range(1, L + 1)]
    return np.array(lam)


def approx_eigenvectors(s: float, L: int, count: int) -> np.ndarray:
    """The ``count`` lowest approximate eigenvectors as unnormalised columns."""
    cols = [psi0_approx(s, L)]
    k = np.arange(L + 1)
    for l in range(1, count):
        cols.append(np.cos((L - k + 0.5) * theta_l_approx(s, L, l)))
    return np.column_stack(cols)
