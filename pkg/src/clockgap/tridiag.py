"""Symmetric tridiagonal matrices and their spectra.

Two independent eigensolvers live here:

* :func:`eigs_bisect` -- Sturm-sequence counting and bisection for the
  eigenvalues, inverse iteration for the vectors.  This is the production
  path used everywhere else in the package.
* :func:`eigs_dense_oracle` -- cyclic Jacobi rotations on the dense matrix.
  Slow, simple, and used only to cross-check the first.

The module also carries the two matrix families that matter for the gap
problem: the reduced adiabatic Hamiltonian and ``T(a, b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

BISECT_TOL = 1e-13
# relative to the block norm; vectors closer than this are re-orthogonalised
CLUSTER_TOL = 1e-3
MAX_INVERSE_ITERS = 50
RESIDUAL_TOL = 1e-10
DENSE_ORACLE_MAX = 512


class ConvergenceError(RuntimeError):
    """Inverse iteration failed for one or more eigenvalue indices."""

    def __init__(self, indices, residuals):
        self.indices = list(indices)
        self.residuals = list(residuals)
        detail = ", ".join(f"{i}: {r:.3e}" for i, r in zip(self.indices, self.residuals))
        super().__init__(f"inverse iteration did not converge for indices {{{detail}}}")


@dataclass(frozen=True)
class SymTridiag:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        e = np.array(self.offdiag, dtype=float).reshape(-1)
        if d.size < 1:
            raise ValueError("tridiagonal matrix needs at least one row")
        if e.size != d.size - 1:
            raise ValueError(f"offdiag has length {e.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal entries must be finite")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def gershgorin(self) -> tuple[float, float]:
        """Interval ``[min d - 2 max|e|, max d + 2 max|e|]`` holding every eigenvalue."""
        r = 2.0 * float(np.max(np.abs(self.offdiag))) if self.n > 1 else 0.0
        return float(self.diag.min()) - r, float(self.diag.max()) + r


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None  # columns, same order as eigenvalues

    def __len__(self):
        return self.eigenvalues.size


# --------------------------------------------------------------------------
# matrix families


def reduced_hamiltonian(L: int, s: float) -> SymTridiag:
    """The adiabatic Hamiltonian restricted to the path subspace."""
    if int(L) != L or L < 1:
        raise ValueError(f"L must be an integer >= 1, got {L}")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    L = int(L)
    d = np.ones(L + 1)
    d[0] = s / 2
    d[-1] = 1 - s / 2
    return SymTridiag(d, np.full(L, -s / 2))


def t_matrix(L: int, a: float, b: float) -> SymTridiag:
    """``(L+1) x (L+1)`` matrix with zero diagonal except corners ``a``, ``b``, unit off-diagonal."""
    if int(L) != L or L < 1:
        raise ValueError(f"L must be an integer >= 1, got {L}")
    d = np.zeros(int(L) + 1)
    d[0] = a
    d[-1] = b
    return SymTridiag(d, np.ones(int(L)))


def t_minus11_eigs(L: int) -> np.ndarray:
    """Closed-form spectrum of ``T(-1, 1)``: ``2 cos((2j+1) eps)``, ascending."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    eps = math.pi / (2 * L + 2)
    j = np.arange(L + 1)
    return np.sort(2.0 * np.cos((2 * j + 1) * eps))


def t_q_eigs(L: int, q: float) -> np.ndarray:
    """Closed-form spectrum of ``T(q, 1/q)`` for ``q > 1``, ascending.

    The isolated eigenvalue ``q + 1/q`` exceeds 2 and so sits last.
    """
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if not q > 1:
        raise ValueError(f"q must exceed 1, got {q}")
    eps = math.pi / (2 * L + 2)
    j = np.arange(1, L + 1)
    return np.sort(np.append(2.0 * np.cos(2 * j * eps), q + 1.0 / q))


# --------------------------------------------------------------------------
# Sturm bisection


def sturm_count(diag: np.ndarray, offdiag: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below ``x``.

    ``diag`` has shape ``(..., n)`` and ``offdiag`` ``(..., n-1)``; ``x`` must
    broadcast against the leading batch shape with one extra trailing axis,
    e.g. ``diag (B, n)`` with ``x (B, K)``.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    x = np.asarray(x, dtype=float)
    n = diag.shape[-1]
    e2 = offdiag**2
    scale = np.max(np.abs(diag), axis=-1, keepdims=True) + (
        np.max(np.abs(offdiag), axis=-1, keepdims=True) if n > 1 else 0.0
    )
    pivmin = np.finfo(float).tiny / np.finfo(float).eps * np.maximum(scale, 1.0)

    q = diag[..., 0:1] - x
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(int)
    for j in range(1, n):
        q = diag[..., j : j + 1] - x - e2[..., j - 1 : j] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def bisect_eigenvalues(
    diag: np.ndarray,
    offdiag: np.ndarray,
    indices,
    tol: float = BISECT_TOL,
) -> np.ndarray:
    """Eigenvalues with the given ascending ``indices`` by bisection.

    Batched over leading axes of ``diag``/``offdiag``; the result has shape
    ``batch + (len(indices),)``.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    k = np.asarray(indices, dtype=int).reshape(-1)
    n = diag.shape[-1]
    if np.any(k < 0) or np.any(k >= n):
        raise IndexError(f"eigenvalue indices {k.tolist()} out of range for n={n}")

    r = 2.0 * np.max(np.abs(offdiag), axis=-1, keepdims=True) if n > 1 else 0.0
    lo = np.min(diag, axis=-1, keepdims=True) - r
    hi = np.max(diag, axis=-1, keepdims=True) + r
    # widen by a hair so the endpoints are strict brackets
    pad = 1e-12 * np.maximum(1.0, np.maximum(np.abs(lo), np.abs(hi)))
    lo = lo - pad
    hi = hi + pad
    batch = diag.shape[:-1]
    lo = np.broadcast_to(lo, batch + (k.size,)).copy()
    hi = np.broadcast_to(hi, batch + (k.size,)).copy()

    width = float(np.max(hi - lo)) if lo.size else 0.0
    steps = max(1, math.ceil(math.log2(max(width, tol) / tol)) + 2)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        above = sturm_count(diag, offdiag, mid) > k
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.all(hi - lo <= tol):
            break
    return 0.5 * (lo + hi)


def _split_blocks(offdiag: np.ndarray) -> list[tuple[int, int]]:
    """Index ranges ``[start, stop)`` of the irreducible diagonal blocks."""
    cuts = [0] + [j + 1 for j, e in enumerate(offdiag) if e == 0.0] + [offdiag.size + 1]
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:])]


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    """Runs of eigenvalues whose consecutive gaps are at most ``tol``."""
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and v - values[groups[-1][-1]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _inverse_iteration(d, e, lam, rng, previous, shift_nudge):
    """One eigenvector of the irreducible block (d, e) near ``lam``."""
    n = d.size
    if n == 1:
        return np.ones(1), 0.0
    scale = max(1.0, float(np.max(np.abs(d))) + float(np.max(np.abs(e))))
    sigma = lam + shift_nudge * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = d - sigma
    ab[2, :-1] = e

    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    resid = math.inf
    for _ in range(MAX_INVERSE_ITERS):
        for p in previous:
            x -= (p @ x) * p
        try:
            y = solve_banded((1, 1), ab, x, check_finite=False)
        except np.linalg.LinAlgError:
            sigma += 10 * np.finfo(float).eps * scale
            ab[1] = d - sigma
            continue
        for p in previous:
            y -= (p @ y) * p
        norm = np.linalg.norm(y)
        if not np.isfinite(norm) or norm == 0.0:
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            continue
        x = y / norm
        tx = d * x
        tx[:-1] += e * x[1:]
        tx[1:] += e * x[:-1]
        resid = float(np.linalg.norm(tx - lam * x))
        if resid <= 0.1 * RESIDUAL_TOL:
            break
    return x, resid


def eigs_bisect(m: SymTridiag, want_vectors: bool = False, seed: int = 0) -> Spectrum:
    """All eigenvalues of ``m`` by Sturm bisection, ascending.

    With ``want_vectors`` the eigenvectors are found by inverse iteration on
    each irreducible block; vectors inside a cluster of nearly equal
    eigenvalues are re-orthogonalised against each other.
    """
    n = m.n
    values = np.empty(n)
    vectors = np.zeros((n, n)) if want_vectors else None
    rng = np.random.default_rng(seed)
    failed, failed_res = [], []

    # each irreducible block is solved on its own; this also keeps s = 0 trivial
    block_of = []
    for a, b in _split_blocks(m.offdiag):
        d = m.diag[a:b]
        e = m.offdiag[a : b - 1]
        if b - a == 1:
            lam = d.copy()
        else:
            lam = bisect_eigenvalues(d, e, np.arange(b - a))
        block_of.append((a, b, lam))

    all_vals = np.concatenate([lam for _, _, lam in block_of])
    order = np.argsort(all_vals, kind="stable")
    values[:] = all_vals[order]
    if not want_vectors:
        return Spectrum(values)

    cols = []
    for a, b, lam in block_of:
        d = m.diag[a:b]
        e = m.offdiag[a : b - 1]
        norm = max(1.0, float(np.max(np.abs(d))) + 2.0 * float(np.max(np.abs(e), initial=0.0)))
        for group in _clusters(lam, CLUSTER_TOL * norm):
            found: list[np.ndarray] = []
            for rank, i in enumerate(group):
                x, resid = _inverse_iteration(d, e, lam[i], rng, found, 1e-15 * rank)
                found.append(x)
                full = np.zeros(n)
                full[a:b] = x
                cols.append((full, resid))
    for dest, src in enumerate(order):
        vec, resid = cols[src]
        if resid > RESIDUAL_TOL:
            failed.append(dest)
            failed_res.append(resid)
        # sign convention: largest-magnitude component positive
        j = int(np.argmax(np.abs(vec)))
        vectors[:, dest] = vec if vec[j] >= 0 else -vec
    if failed:
        raise ConvergenceError(failed, failed_res)
    return Spectrum(values, vectors)


def lowest_eigenvalues(m: SymTridiag, count: int) -> np.ndarray:
    """The ``count`` smallest eigenvalues, skipping the rest of the spectrum."""
    return bisect_eigenvalues(m.diag, m.offdiag, np.arange(count))


def reduced_lowest_pair(L: int, s) -> np.ndarray:
    """``(lambda_0, lambda_1)`` of the reduced Hamiltonian for an array of ``s``.

    Returns shape ``s.shape + (2,)``.  All ``s`` values are bisected together.
    """
    s = np.asarray(s, dtype=float)
    flat = s.reshape(-1)
    if np.any(flat < 0) or np.any(flat > 1):
        raise ValueError("s must lie in [0, 1]")
    d = np.ones((flat.size, L + 1))
    d[:, 0] = flat / 2
    d[:, -1] = 1 - flat / 2
    e = np.repeat((-flat / 2)[:, None], L, axis=1)
    return bisect_eigenvalues(d, e, [0, 1]).reshape(s.shape + (2,))


# --------------------------------------------------------------------------
# Jacobi oracle


def jacobi_eigh(a: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigen-decomposition of a dense real symmetric matrix by cyclic Jacobi.

    Returns ``(values, vectors)`` with ascending values.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("jacobi_eigh needs a square matrix")
    if n > DENSE_ORACLE_MAX:
        raise ValueError(f"dense oracle is capped at n <= {DENSE_ORACLE_MAX}, got {n}")
    if not np.allclose(a, a.T, atol=1e-14, rtol=0):
        raise ValueError("jacobi_eigh needs a symmetric matrix")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    total = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * max(total, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-3 * tol * total:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - sn * aq
                a[q, :] = sn * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigvalsh(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix through the Jacobi oracle.

    Uses the real embedding ``[[Re, -Im], [Im, Re]]``, whose spectrum is the
    Hermitian spectrum with every eigenvalue doubled.
    """
    h = np.asarray(h, dtype=complex)
    big = np.block([[h.real, -h.imag], [h.imag, h.real]])
    w, _ = jacobi_eigh(big)
    return w[::2]


def eigs_dense_oracle(m: SymTridiag, want_vectors: bool = False) -> Spectrum:
    if m.n > DENSE_ORACLE_MAX:
        raise ValueError(f"dense oracle is capped at n <= {DENSE_ORACLE_MAX}, got {m.n}")
    w, v = jacobi_eigh(m.to_dense())
    return Spectrum(w, v if want_vectors else None)
