"""Clock-space operators for a circuit.

The full space is logical (``2**N``) times clock (``L+1``).  Composite
index = ``clock_label * 2**N + logical_index``, so each clock value owns a
contiguous block of ``2**N`` amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .circuit import Circuit, embed_gate, path_states
from .tridiag import SymTridiag

DENSE_MAX_DIM = 4096


@dataclass(frozen=True)
class FullHamiltonian:
    """Sparse Hermitian operator on the clock (x) logical space."""

    matrix: sp.csr_array
    n_qubits: int
    n_gates: int
    name: str

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entries(self) -> Iterator[tuple[int, int, complex]]:
        """Stored entries in row-major order."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            yield int(coo.row[k]), int(coo.col[k]), complex(coo.data[k])

    def __matmul__(self, v):
        return self.matrix @ v

    def to_dense(self) -> np.ndarray:
        if self.dim > DENSE_MAX_DIM:
            raise ValueError(f"dense conversion capped at dim <= {DENSE_MAX_DIM}, got {self.dim}")
        return self.matrix.toarray()

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0

    def expectation(self, psi: np.ndarray) -> complex:
        return complex(np.vdot(psi, self.matrix @ psi))


class _Assembler:
    """COO accumulator; duplicate (i, j) insertions sum on conversion."""

    def __init__(self, dim):
        self.dim = dim
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def add_block(self, row_clock, col_clock, block, block_dim):
        block = sp.coo_array(block)
        self.rows.append(block.row + row_clock * block_dim)
        self.cols.append(block.col + col_clock * block_dim)
        self.vals.append(block.data.astype(complex))

    def build(self) -> sp.csr_array:
        if not self.rows:
            return sp.csr_array((self.dim, self.dim), dtype=complex)
        m = sp.coo_array(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(self.dim, self.dim),
        ).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return m


def full_dim(circuit: Circuit) -> int:
    return (circuit.n_gates + 1) * circuit.logical_dim


def _ones_penalty(circuit: Circuit) -> np.ndarray:
    """Diagonal of ``sum_i |1_i><1_i|`` on the logical space: the Hamming weight."""
    idx = np.arange(circuit.logical_dim)
    return np.array([bin(i).count("1") for i in idx], dtype=float)


def build_clock_hamiltonian(circuit: Circuit) -> FullHamiltonian:
    """Feynman's clock Hamiltonian with the positive-semidefinite diagonal terms."""
    d = circuit.logical_dim
    eye = sp.identity(d, dtype=complex, format="coo")
    acc = _Assembler(full_dim(circuit))
    for l, gate in enumerate(circuit.gates, start=1):
        u = embed_gate(gate, circuit.n_qubits)
        acc.add_block(l - 1, l - 1, 0.5 * eye, d)
        acc.add_block(l, l, 0.5 * eye, d)
        acc.add_block(l, l - 1, -0.5 * u, d)
        acc.add_block(l - 1, l, -0.5 * u.conj().T, d)
    return FullHamiltonian(acc.build(), circuit.n_qubits, circuit.n_gates, "clock")


def _clock_zero_penalty(circuit: Circuit) -> sp.csr_array:
    dim = full_dim(circuit)
    diag = np.zeros(dim)
    diag[: circuit.logical_dim] = _ones_penalty(circuit)
    return sp.diags_array(diag, format="csr").astype(complex)


def build_h_init(circuit: Circuit) -> FullHamiltonian:
    """Penalise 1s at clock 0 and every clock value above 0."""
    d = circuit.logical_dim
    diag = np.ones(full_dim(circuit))
    diag[:d] = _ones_penalty(circuit)
    m = sp.diags_array(diag, format="csr").astype(complex)
    return FullHamiltonian(m, circuit.n_qubits, circuit.n_gates, "init")


def build_h_final(circuit: Circuit) -> FullHamiltonian:
    hc = build_clock_hamiltonian(circuit)
    m = (hc.matrix + _clock_zero_penalty(circuit)).tocsr()
    m.sort_indices()
    return FullHamiltonian(m, circuit.n_qubits, circuit.n_gates, "final")


def _check_s(s: float):
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")


def build_hs(circuit: Circuit, s: float) -> FullHamiltonian:
    """``(1 - s) H_init + s H_final``."""
    _check_s(s)
    h0 = build_h_init(circuit).matrix
    h1 = build_h_final(circuit).matrix
    m = ((1.0 - s) * h0 + s * h1).tocsr()
    m.sort_indices()
    return FullHamiltonian(m, circuit.n_qubits, circuit.n_gates, f"H(s={s!r})")


@dataclass(frozen=True)
class PathBasis:
    """Orthonormal path states ``gamma(l) = alpha(l) (x) |l>_c`` as matrix columns."""

    gammas: np.ndarray  # shape (dim, L+1)
    eta: np.ndarray

    @property
    def n_states(self) -> int:
        return self.gammas.shape[1]

    def coordinates(self, psi: np.ndarray) -> np.ndarray:
        """Components ``<gamma(l)|psi>``."""
        return self.gammas.conj().T @ psi

    def lift(self, coords: np.ndarray) -> np.ndarray:
        return self.gammas @ coords

    def leakage(self, psi: np.ndarray) -> float:
        """Norm of the part of ``psi`` outside the path subspace."""
        return float(np.linalg.norm(psi - self.lift(self.coordinates(psi))))


def path_basis(circuit: Circuit) -> PathBasis:
    d = circuit.logical_dim
    L = circuit.n_gates
    gammas = np.zeros((full_dim(circuit), L + 1), dtype=complex)
    for l, alpha in enumerate(path_states(circuit)):
        gammas[l * d : (l + 1) * d, l] = alpha
    eta = gammas.sum(axis=1) / np.sqrt(L + 1)
    return PathBasis(gammas, eta)


def project_to_path(circuit: Circuit, s: float) -> SymTridiag:
    """``<gamma(l)| H(s) |gamma(m)>`` computed from the full operator.

    Raises if the projected matrix is not real symmetric tridiagonal to
    1e-12, which would mean the construction is broken.
    """
    _check_s(s)
    basis = path_basis(circuit)
    h = build_hs(circuit, s).matrix
    m = basis.gammas.conj().T @ (h @ basis.gammas)
    n = m.shape[0]
    band = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= 1
    stray = max(
        float(np.max(np.abs(m[~band]), initial=0.0)),
        float(np.max(np.abs(m.imag))),
        float(np.max(np.abs(m - m.conj().T))),
    )
    if stray > 1e-12:
        raise RuntimeError(f"projected Hamiltonian is not real tridiagonal (deviation {stray:.3e})")
    return SymTridiag(np.diag(m).real, np.diag(m, 1).real)


def check_invariant_subspace(circuit: Circuit, s: float) -> float:
    """``max_l ||(I - P) H(s) gamma(l)||`` for ``P`` the path-subspace projector."""
    basis = path_basis(circuit)
    h = build_hs(circuit, s).matrix
    hg = h @ basis.gammas
    outside = hg - basis.gammas @ (basis.gammas.conj().T @ hg)
    return float(np.max(np.linalg.norm(outside, axis=0)))


def clock_block(psi: np.ndarray, circuit: Circuit, label: int) -> np.ndarray:
    d = circuit.logical_dim
    return psi[label * d : (label + 1) * d]
