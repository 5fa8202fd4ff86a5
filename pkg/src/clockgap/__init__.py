"""Clock-Hamiltonian spectra, gap bounds and adiabatic simulation for quantum circuits."""

from .circuit import Circuit, Gate, apply_gate, run_prefix
from .tridiag import SymTridiag, eigs_bisect, eigs_dense_oracle, reduced_hamiltonian, t_matrix
from .ansatz import full_ansatz_spectrum, solve_complex_branch, solve_real_branch
from .bounds import compare_prior_bounds, min_gap_bound_closed, min_gap_exact

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "SymTridiag",
    "apply_gate",
    "compare_prior_bounds",
    "eigs_bisect",
    "eigs_dense_oracle",
    "full_ansatz_spectrum",
    "min_gap_bound_closed",
    "min_gap_exact",
    "reduced_hamiltonian",
    "run_prefix",
    "solve_complex_branch",
    "solve_real_branch",
    "t_matrix",
]
