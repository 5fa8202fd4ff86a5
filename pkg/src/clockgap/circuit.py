"""Quantum circuits and their computational-path states.

Qubit 0 is the most significant bit of a basis-state index, so for ``N = 2``
the amplitude of ``|q0 q1>`` lives at index ``2*q0 + q1``.  Two-qubit gate
matrices are written in the basis ``|t0 t1>`` of their ordered targets, which
makes ``CNOT`` with ``targets=(0, 1)`` a control on qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

UNITARY_TOL = 1e-12

_S2 = 1.0 / np.sqrt(2.0)

STANDARD_GATES: dict[str, np.ndarray] = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "t": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "cnot": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
}


class CircuitError(ValueError):
    """Raised for malformed gates, circuits or prefix lengths."""


@dataclass(frozen=True)
class Gate:
    """A one- or two-qubit gate.

    ``kind`` is one of the names in :data:`STANDARD_GATES` (case-insensitive)
    or ``"custom"``, in which case ``matrix`` must be given.
    """

    kind: str
    targets: tuple[int, ...]
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)

        if len(targets) not in (1, 2):
            raise CircuitError(f"gate {kind!r}: expected 1 or 2 targets, got {len(targets)}")
        if len(set(targets)) != len(targets):
            raise CircuitError(f"gate {kind!r}: targets must be distinct, got {targets}")
        if any(t < 0 for t in targets):
            raise CircuitError(f"gate {kind!r}: negative target in {targets}")

        if kind == "custom":
            if self.matrix is None:
                raise CircuitError("custom gate requires an explicit matrix")
            u = np.array(self.matrix, dtype=complex)
        else:
            if kind not in STANDARD_GATES:
                raise CircuitError(
                    f"unknown gate {self.kind!r}; use one of "
                    f"{sorted(STANDARD_GATES)} or 'custom' with a matrix"
                )
            if self.matrix is not None:
                raise CircuitError(f"gate {kind!r} is a standard gate and takes no matrix")
            u = STANDARD_GATES[kind].copy()

        dim = 2 ** len(targets)
        if u.shape != (dim, dim):
            raise CircuitError(
                f"gate {kind!r} on {len(targets)} qubit(s) needs a {dim}x{dim} matrix, "
                f"got shape {u.shape}"
            )
        err = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
        if err > UNITARY_TOL:
            raise CircuitError(f"gate {kind!r} is not unitary (max |U^dag U - I| = {err:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @property
    def n_targets(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if int(self.n_qubits) < 1:
            raise CircuitError(f"n_qubits must be positive, got {self.n_qubits}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        gates = tuple(self.gates)
        if not gates:
            raise CircuitError("a circuit needs at least one gate (L >= 1)")
        for i, g in enumerate(gates):
            if not isinstance(g, Gate):
                raise CircuitError(f"gates[{i}] is not a Gate")
            bad = [t for t in g.targets if t >= self.n_qubits]
            if bad:
                raise CircuitError(
                    f"gates[{i}] ({g.kind}): target {bad[0]} out of range for "
                    f"{self.n_qubits} qubit(s)"
                )
        object.__setattr__(self, "gates", gates)

    @property
    def n_gates(self) -> int:
        """Number of gates, ``L``."""
        return len(self.gates)

    @property
    def logical_dim(self) -> int:
        return 2**self.n_qubits


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(2**n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_gate(state: np.ndarray, gate: Gate, n_qubits: int | None = None) -> np.ndarray:
    """Apply ``gate`` to ``state``.

    ``state`` may carry trailing batch axes: shape ``(2**N,)`` or
    ``(2**N, m)``.  Each column is transformed independently.
    """
    state = np.asarray(state, dtype=complex)
    dim = state.shape[0]
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if dim < 2 or 2**n != dim:
        raise CircuitError(f"state length {dim} is not a power of two")
    if n_qubits is not None and n != n_qubits:
        raise CircuitError(f"state has {n} qubits, expected {n_qubits}")
    if any(t >= n for t in gate.targets):
        raise CircuitError(f"gate {gate.kind} targets {gate.targets} exceed {n} qubit(s)")

    batch = state.shape[1:]
    k = gate.n_targets
    tensor = state.reshape((2,) * n + batch)
    u = gate.matrix.reshape((2,) * (2 * k))
    # contract the gate's input legs with the target axes, then move outputs back
    out = np.tensordot(u, tensor, axes=(list(range(k, 2 * k)), list(gate.targets)))
    out = np.moveaxis(out, list(range(k)), list(gate.targets))
    return out.reshape(state.shape)


def run_prefix(circuit: Circuit, l: int) -> np.ndarray:
    """Return ``U_l ... U_1 |0...0>``; ``l = 0`` gives the all-zeros state."""
    if not 0 <= l <= circuit.n_gates:
        raise CircuitError(f"prefix length {l} outside [0, {circuit.n_gates}]")
    psi = zero_state(circuit.n_qubits)
    for gate in circuit.gates[:l]:
        psi = apply_gate(psi, gate)
    return psi


def path_states(circuit: Circuit) -> list[np.ndarray]:
    """All intermediate states ``alpha(0), ..., alpha(L)`` in one pass."""
    states = [zero_state(circuit.n_qubits)]
    for gate in circuit.gates:
        states.append(apply_gate(states[-1], gate))
    return states


def embed_gate(gate: Gate, n_qubits: int) -> np.ndarray:
    """Dense ``2**N x 2**N`` matrix of ``gate`` acting on ``n_qubits`` qubits."""
    return apply_gate(np.eye(2**n_qubits, dtype=complex), gate, n_qubits)


def _parse_matrix(raw, where: str) -> np.ndarray:
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CircuitError(f"{where}: matrix must be nested [re, im] pairs ({exc})") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise CircuitError(f"{where}: matrix must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def circuit_from_dict(data: dict) -> Circuit:
    """Build a circuit from the JSON layout used on the command line.

    ``{"n_qubits": 2, "gates": [{"name": "h", "targets": [0]}, ...]}``;
    custom gates add ``"matrix"`` as row-major ``[re, im]`` pairs.
    """
    if not isinstance(data, dict):
        raise CircuitError("circuit: top level must be an object")
    if "n_qubits" not in data:
        raise CircuitError("circuit.n_qubits: missing")
    n = data["n_qubits"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise CircuitError(f"circuit.n_qubits: expected integer, got {n!r}")
    raw_gates = data.get("gates")
    if not isinstance(raw_gates, list):
        raise CircuitError("circuit.gates: expected a list")

    gates = []
    for i, g in enumerate(raw_gates):
        where = f"circuit.gates[{i}]"
        if not isinstance(g, dict):
            raise CircuitError(f"{where}: expected an object")
        name = g.get("name")
        if not isinstance(name, str):
            raise CircuitError(f"{where}.name: expected a string")
        targets = g.get("targets")
        if not isinstance(targets, list) or not all(
            isinstance(t, int) and not isinstance(t, bool) for t in targets
        ):
            raise CircuitError(f"{where}.targets: expected a list of integers")
        matrix = _parse_matrix(g["matrix"], f"{where}.matrix") if "matrix" in g else None
        try:
            gates.append(Gate(name, tuple(targets), matrix))
        except CircuitError as exc:
            raise CircuitError(f"{where}: {exc}") from None
    return Circuit(n, tuple(gates))


def circuit_to_dict(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        entry = {"name": g.kind, "targets": list(g.targets)}
        if g.kind == "custom":
            entry["matrix"] = [[[z.real, z.imag] for z in row] for row in g.matrix]
        gates.append(entry)
    return {"n_qubits": circuit.n_qubits, "gates": gates}


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    """Random custom one- and two-qubit gates; handy for tests and scans."""
    gates = []
    for _ in range(n_gates):
        k = 2 if n_qubits > 1 and rng.random() < 0.5 else 1
        targets = tuple(int(t) for t in rng.choice(n_qubits, size=k, replace=False))
        gates.append(Gate("custom", targets, random_unitary(2**k, rng)))
    return Circuit(n_qubits, tuple(gates))


def standard_circuit(n_qubits: int, spec: Sequence[tuple[str, Sequence[int]]]) -> Circuit:
    """Shorthand: ``standard_circuit(2, [("h", [0]), ("cnot", [0, 1])])``."""
    return Circuit(n_qubits, tuple(Gate(name, tuple(t)) for name, t in spec))
