"""Adiabatic evolution under ``H(s)`` with the linear schedule ``s = t / T``.

Integration is fixed-step classical RK4 on ``i dpsi/dt = H(s(t)) psi``.
Because ``H(s) = H_init + s (H_final - H_init)``, each right-hand side
evaluation costs two matrix-vector products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .circuit import Circuit
from .clock import (
    DENSE_MAX_DIM,
    build_h_final,
    build_h_init,
    clock_block,
    full_dim,
    path_basis,
)
from .circuit import run_prefix
from .tridiag import eigs_bisect, reduced_hamiltonian

STEPS_PER_UNIT_TIME = 200
NORM_DRIFT_LIMIT = 1e-4


class StepSizeError(RuntimeError):
    """Norm drift exceeded the limit; the step is too coarse."""


@dataclass(frozen=True)
class Schedule:
    total_time: float
    steps: int | None = None

    def __post_init__(self):
        if not (self.total_time > 0 and math.isfinite(self.total_time)):
            raise ValueError(f"total time must be positive and finite, got {self.total_time}")
        if self.steps is None:
            object.__setattr__(self, "steps", default_steps(self.total_time))
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def dt(self) -> float:
        return self.total_time / self.steps

    def s_of_t(self, t: float) -> float:
        return min(max(t / self.total_time, 0.0), 1.0)


def default_steps(total_time: float) -> int:
    return max(1, math.ceil(STEPS_PER_UNIT_TIME * total_time))


def adiabatic_time(L: int) -> float:
    """``50 (L+1)^2``: the "slow enough" test time used throughout."""
    return 50.0 * (L + 1) ** 2


@dataclass
class SimulationTrace:
    times: np.ndarray
    s_values: np.ndarray
    overlaps: np.ndarray  # |<ground(s)|psi(t)>|^2
    leakage: np.ndarray  # zeros for reduced runs
    norms: np.ndarray
    p_clock_L: float
    p_clock_L_alt: float
    logical_fidelity: float  # nan for reduced runs
    final_state: np.ndarray
    final_path_coords: np.ndarray

    @property
    def final_overlap(self) -> float:
        return float(self.overlaps[-1])

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(np.abs(self.norms - 1.0)))

    def rows(self):
        """``(t, s, overlap, leakage, norm)`` per sample."""
        return zip(self.times, self.s_values, self.overlaps, self.leakage, self.norms)

    def summary(self) -> dict:
        return {
            "final_overlap": self.final_overlap,
            "max_leakage": float(np.max(self.leakage)),
            "max_norm_drift": self.max_norm_drift,
            "p_clock_L": self.p_clock_L,
            "p_clock_L_alt": self.p_clock_L_alt,
            "logical_fidelity": self.logical_fidelity,
        }


def _sample_steps(steps: int, samples: int) -> np.ndarray:
    samples = max(2, min(samples, steps + 1))
    return np.unique(np.round(np.linspace(0, steps, samples)).astype(int))


def rk4_linear(h0, h1, psi0, schedule: Schedule, sample_at, observe):
    """Integrate ``psi' = -i (h0 + s(t) h1) psi``; call ``observe(step, t, psi)`` at ``sample_at``.

    ``h0``/``h1`` may be dense arrays or sparse matrices.
    """
    psi = np.array(psi0, dtype=complex)
    T, n = schedule.total_time, schedule.steps
    dt = schedule.dt
    sample_at = set(int(k) for k in sample_at)

    def rhs(s, v):
        return -1j * (h0 @ v + s * (h1 @ v))

    if 0 in sample_at:
        observe(0, 0.0, psi)
    for k in range(n):
        t = k * dt
        s1 = t / T
        sm = (t + 0.5 * dt) / T
        s2 = min((k + 1) / n, 1.0)
        k1 = rhs(s1, psi)
        k2 = rhs(sm, psi + 0.5 * dt * k1)
        k3 = rhs(sm, psi + 0.5 * dt * k2)
        k4 = rhs(s2, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k + 1 in sample_at:
            observe(k + 1, (k + 1) * dt if k + 1 < n else T, psi)
    return psi


class _GroundTracker:
    """Instantaneous reduced ground state, sign-aligned with the previous sample."""

    def __init__(self, L):
        self.L = L
        self.prev = None

    def __call__(self, s):
        v = eigs_bisect(reduced_hamiltonian(self.L, s), want_vectors=True).eigenvectors[:, 0]
        if self.prev is not None and float(v @ self.prev) < 0:
            v = -v
        self.prev = v
        return v


def _run(h0, h1, psi0, schedule, samples, L, coords_of, leakage_of):
    steps = _sample_steps(schedule.steps, samples)
    ground = _GroundTracker(L)
    rec = {"t": [], "s": [], "overlap": [], "leak": [], "norm": []}

    def observe(step, t, psi):
        s = 1.0 if step == schedule.steps else schedule.s_of_t(t)
        c = coords_of(psi)
        g = ground(s)
        rec["t"].append(t)
        rec["s"].append(s)
        rec["overlap"].append(abs(np.vdot(g, c)) ** 2)
        rec["leak"].append(leakage_of(psi))
        norm = float(np.linalg.norm(psi))
        rec["norm"].append(norm)
        if abs(norm - 1.0) > NORM_DRIFT_LIMIT:
            raise StepSizeError(
                f"norm drifted to {norm:.6f} at t={t:.4g}; increase the number of steps "
                f"(currently {schedule.steps} for T={schedule.total_time:g})"
            )

    psi = rk4_linear(h0, h1, psi0, schedule, steps, observe)
    return psi, {k: np.array(v) for k, v in rec.items()}


def evolve_reduced(L: int, schedule: Schedule, samples: int = 201) -> SimulationTrace:
    """Evolve ``e_0`` in the ``(L+1)``-dimensional path coordinates."""
    if int(L) != L or L < 1:
        raise ValueError(f"L must be an integer >= 1, got {L}")
    h0 = reduced_hamiltonian(L, 0.0).to_dense()
    h1 = reduced_hamiltonian(L, 1.0).to_dense() - h0
    psi0 = np.zeros(L + 1, dtype=complex)
    psi0[0] = 1.0
    psi, rec = _run(h0, h1, psi0, schedule, samples, L, lambda v: v, lambda v: 0.0)

    p_amp = float(abs(psi[L]) ** 2)
    proj = np.zeros((L + 1, L + 1))
    proj[L, L] = 1.0
    p_proj = float(np.vdot(psi, proj @ psi).real)
    return SimulationTrace(
        times=rec["t"],
        s_values=rec["s"],
        overlaps=rec["overlap"],
        leakage=rec["leak"],
        norms=rec["norm"],
        p_clock_L=p_amp,
        p_clock_L_alt=p_proj,
        logical_fidelity=math.nan,
        final_state=psi,
        final_path_coords=psi,
    )


def evolve_full(circuit: Circuit, schedule: Schedule, samples: int = 201) -> SimulationTrace:
    """Evolve ``gamma(0)`` in the full clock (x) logical space.

    Records leakage out of the path subspace and, at the end, the logical
    state conditioned on reading the clock as ``L``.
    """
    dim = full_dim(circuit)
    if dim > DENSE_MAX_DIM:
        raise ValueError(f"full-space simulation capped at dim <= {DENSE_MAX_DIM}, got {dim}")
    L = circuit.n_gates
    h_init = build_h_init(circuit).matrix
    h0 = h_init
    h1 = (build_h_final(circuit).matrix - h_init).tocsr()
    basis = path_basis(circuit)
    psi0 = basis.gammas[:, 0].copy()
    psi, rec = _run(h0, h1, psi0, schedule, samples, L, basis.coordinates, basis.leakage)

    block = clock_block(psi, circuit, L)
    p_amp = float(np.sum(np.abs(block) ** 2))
    d = circuit.logical_dim
    mask = np.zeros(dim)
    mask[L * d : (L + 1) * d] = 1.0
    p_proj = float(np.vdot(psi, sp.diags_array(mask) @ psi).real)
    alpha_L = run_prefix(circuit, L)
    fidelity = float(abs(np.vdot(alpha_L, block)) ** 2 / p_amp) if p_amp > 0 else 0.0
    return SimulationTrace(
        times=rec["t"],
        s_values=rec["s"],
        overlaps=rec["overlap"],
        leakage=rec["leak"],
        norms=rec["norm"],
        p_clock_L=p_amp,
        p_clock_L_alt=p_proj,
        logical_fidelity=fidelity,
        final_state=psi,
        final_path_coords=basis.coordinates(psi),
    )


def success_vs_T(target, T_list, steps_rule=default_steps, samples: int = 2) -> list[dict]:
    """Final ground-state overlap for each total time.

    ``target`` is either an integer ``L`` (reduced run) or a :class:`Circuit`.
    """
    rows = []
    for T in T_list:
        schedule = Schedule(float(T), steps_rule(float(T)))
        if isinstance(target, Circuit):
            trace = evolve_full(target, schedule, samples)
        else:
            trace = evolve_reduced(int(target), schedule, samples)
        rows.append(
            {
                "T": float(T),
                "steps": schedule.steps,
                "final_overlap": trace.final_overlap,
                "p_clock_L": trace.p_clock_L,
            }
        )
    return rows


def rk4_error_ratio(L: int, total_time: float, steps: int, refine: int = 16) -> float:
    """``err(steps) / err(2 steps)`` against a ``refine``-times finer reference.

    About 16 for a fourth-order method.
    """
    def final(n):
        return evolve_reduced(L, Schedule(total_time, n), samples=2).final_state

    ref = final(steps * refine)
    e1 = np.linalg.norm(final(steps) - ref)
    e2 = np.linalg.norm(final(2 * steps) - ref)
    return float(e1 / e2)
