import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clockgap.tridiag import (
    ConvergenceError,
    SymTridiag,
    bisect_eigenvalues,
    eigs_bisect,
    eigs_dense_oracle,
    hermitian_eigvalsh,
    jacobi_eigh,
    reduced_hamiltonian,
    reduced_lowest_pair,
    sturm_count,
    t_matrix,
    t_minus11_eigs,
    t_q_eigs,
)

EXAMPLES = [
    (SymTridiag([-1, 1], [1]), [-math.sqrt(2), math.sqrt(2)]),
    (SymTridiag([0, 1, 1], [0, 0]), [0, 1, 1]),
    (SymTridiag([3, 1 / 3], [1]), [0, 10 / 3]),
]


def random_tridiag(rng, n):
    return SymTridiag(rng.uniform(-2, 2, n), rng.uniform(-1, 1, n - 1))


def test_reduced_hamiltonian_examples():
    h = reduced_hamiltonian(1, 1.0)
    assert np.array_equal(h.diag, [0.5, 0.5]) and np.array_equal(h.offdiag, [-0.5])
    h = reduced_hamiltonian(2, 0.0)
    assert np.array_equal(h.diag, [0, 1, 1]) and np.array_equal(h.offdiag, [0, 0])
    h = reduced_hamiltonian(3, 0.5)
    assert np.array_equal(h.diag, [0.25, 1, 1, 0.75])
    assert np.array_equal(h.offdiag, [-0.25] * 3)


@pytest.mark.parametrize("L,s", [(0, 0.5), (2, -0.1), (2, 1.01)])
def test_reduced_hamiltonian_validation(L, s):
    with pytest.raises(ValueError):
        reduced_hamiltonian(L, s)


def test_t_matrix_examples():
    assert np.array_equal(t_matrix(1, -1, 1).to_dense(), [[-1, 1], [1, 1]])
    assert np.allclose(t_matrix(1, 3, 1 / 3).to_dense(), [[3, 1], [1, 1 / 3]])
    t = t_matrix(2, 0, 0)
    assert np.array_equal(t.diag, [0, 0, 0]) and np.array_equal(t.offdiag, [1, 1])


def test_symtridiag_validation():
    with pytest.raises(ValueError):
        SymTridiag([1, 2], [1, 2])
    with pytest.raises(ValueError):
        SymTridiag([], [])
    with pytest.raises(ValueError):
        SymTridiag([np.nan], [])


@pytest.mark.parametrize("m,expected", EXAMPLES)
def test_bisect_examples(m, expected):
    spec = eigs_bisect(m, want_vectors=True)
    assert np.max(np.abs(spec.eigenvalues - expected)) <= 1e-12
    for lam, v in zip(spec.eigenvalues, spec.eigenvectors.T):
        assert np.linalg.norm(m.matvec(v) - lam * v) <= 1e-10


@pytest.mark.parametrize("m,expected", EXAMPLES)
def test_dense_oracle_examples(m, expected):
    assert np.max(np.abs(eigs_dense_oracle(m).eigenvalues - expected)) <= 1e-12


def test_dense_oracle_identity_and_cap():
    assert np.allclose(eigs_dense_oracle(SymTridiag(np.ones(5), np.zeros(4))).eigenvalues, 1)
    with pytest.raises(ValueError):
        eigs_dense_oracle(SymTridiag(np.ones(513), np.zeros(512)))


def test_jacobi_matches_lapack(rng):
    # third, unrelated route for the oracle itself
    a = rng.normal(size=(12, 12))
    a = a + a.T
    w, v = jacobi_eigh(a)
    assert np.max(np.abs(w - np.linalg.eigvalsh(a))) <= 1e-12
    assert np.max(np.abs(a @ v - v * w)) <= 1e-11


def test_hermitian_oracle(rng):
    h = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = h + h.conj().T
    assert np.max(np.abs(hermitian_eigvalsh(h) - np.linalg.eigvalsh(h))) <= 1e-12


def test_reduced_spectrum_cross_algorithm():
    m = reduced_hamiltonian(8, 0.5)
    assert np.max(np.abs(eigs_bisect(m).eigenvalues - eigs_dense_oracle(m).eigenvalues)) <= 1e-10


def test_sturm_vs_jacobi_random_batch(rng):
    for _ in range(100):
        n = int(rng.integers(1, 65))
        m = random_tridiag(rng, n)
        a = eigs_bisect(m).eigenvalues
        b = eigs_dense_oracle(m).eigenvalues
        assert np.max(np.abs(a - b)) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=24),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_sturm_count_brackets_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    m = random_tridiag(rng, n)
    w = np.linalg.eigvalsh(m.to_dense())
    xs = rng.uniform(-5, 5, 10)
    counts = sturm_count(m.diag, m.offdiag, xs)
    for x, c in zip(xs, counts):
        if np.min(np.abs(w - x)) > 1e-9:
            assert c == np.sum(w < x)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=40),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_eigenvectors_residual_and_orthogonality(n, seed):
    m = random_tridiag(np.random.default_rng(seed), n)
    spec = eigs_bisect(m, want_vectors=True)
    w, v = spec.eigenvalues, spec.eigenvectors
    assert np.all(np.diff(w) >= 0)
    for lam, x in zip(w, v.T):
        assert np.linalg.norm(m.matvec(x) - lam * x) <= 1e-10
    gram = v.T @ v
    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) > 1e-6:
                assert abs(gram[i, j]) <= 1e-8


def test_degenerate_s0_vectors():
    L = 6
    spec = eigs_bisect(reduced_hamiltonian(L, 0.0), want_vectors=True)
    assert np.array_equal(spec.eigenvalues, [0] + [1] * L)
    assert np.allclose(spec.eigenvectors.T @ spec.eigenvectors, np.eye(L + 1), atol=1e-12)


def test_near_degenerate_cluster_is_orthogonalised():
    # Wilkinson-style matrix: a pair of eigenvalues closer than 1e-13
    n = 21
    d = np.abs(np.arange(n) - 10).astype(float)
    m = SymTridiag(d, np.ones(n - 1))
    spec = eigs_bisect(m, want_vectors=True)
    v = spec.eigenvectors
    assert np.allclose(v.T @ v, np.eye(n), atol=1e-8)
    for lam, x in zip(spec.eigenvalues, v.T):
        assert np.linalg.norm(m.matvec(x) - lam * x) <= 1e-10


def test_convergence_error_reports_indices():
    err = ConvergenceError([3, 5], [1e-3, 2e-3])
    assert err.indices == [3, 5]
    assert "3" in str(err) and "5" in str(err)


def test_bisect_batched_matches_single():
    s = np.linspace(0, 1, 7)
    pairs = reduced_lowest_pair(5, s)
    for si, p in zip(s, pairs):
        full = eigs_bisect(reduced_hamiltonian(5, si)).eigenvalues
        assert np.max(np.abs(p - full[:2])) <= 2e-13
    with pytest.raises(IndexError):
        bisect_eigenvalues(np.zeros(3), np.zeros(2), [3])


def test_analytic_t_examples():
    assert np.allclose(t_minus11_eigs(1), [-math.sqrt(2), math.sqrt(2)], atol=1e-15)
    assert np.allclose(t_minus11_eigs(2), [-math.sqrt(3), 0, math.sqrt(3)], atol=1e-15)
    assert np.allclose(t_q_eigs(1, 3.0), [0, 10 / 3], atol=1e-15)
    assert np.allclose(t_q_eigs(2, 3.0), [-1, 1, 10 / 3], atol=1e-15)
    with pytest.raises(ValueError):
        t_q_eigs(3, 1.0)


def test_analytic_catalog_against_bisection():
    for L in range(1, 65):
        num = eigs_bisect(t_matrix(L, -1, 1)).eigenvalues
        assert np.max(np.abs(num - t_minus11_eigs(L))) <= 1e-12
        for s in np.arange(1, 10) / 10:
            q = 2 / s - 1
            num = eigs_bisect(t_matrix(L, q, 1 / q)).eigenvalues
            assert np.max(np.abs(num - t_q_eigs(L, q))) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(
    L=st.integers(min_value=1, max_value=12),
    s=st.fractions(min_value=0, max_value=1, max_denominator=10**6),
)
def test_reduced_is_shifted_t_minus11_exactly(L, s):
    # exact rational arithmetic, entry by entry
    def reduced(i, j):
        if i == j:
            return s / 2 if i == 0 else (1 - s / 2 if i == L else Fraction(1))
        return -s / 2 if abs(i - j) == 1 else Fraction(0)

    def t_entry(i, j):
        if i == j:
            return Fraction(-1) if i == 0 else (Fraction(1) if i == L else Fraction(0))
        return Fraction(1) if abs(i - j) == 1 else Fraction(0)

    for i in range(L + 1):
        for j in range(L + 1):
            rebuilt = (i == j) - s / 2 * t_entry(i, j) - (i == j == 0)
            assert reduced(i, j) == rebuilt


@settings(max_examples=50, deadline=None)
@given(L=st.integers(min_value=1, max_value=40), s=st.floats(min_value=0, max_value=1))
def test_reduced_is_shifted_t_minus11_in_floats(L, s):
    h = reduced_hamiltonian(L, s).to_dense()
    e0 = np.zeros((L + 1, L + 1))
    e0[0, 0] = 1
    rebuilt = np.eye(L + 1) - (s / 2) * t_matrix(L, -1, 1).to_dense() - e0
    assert np.max(np.abs(h - rebuilt)) <= 1e-15
