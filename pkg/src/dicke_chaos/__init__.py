"""Dicke-model chaos toolkit.

Quantum spectra and level statistics, the classical flow with Poincare
sections and Lyapunov fields, Poincare-Husimi functions, and the
phase-space overlap index used to classify regular, chaotic, and mixed
eigenstates.
"""

from .model import (
    BasisIndex,
    BasisState,
    ModelParams,
    ValidationError,
    build_even_parity_basis,
    hilbert_dims,
)
from .spectrum import (
    HamiltonianMatrix,
    Spectrum,
    assemble_hamiltonian,
    check_truncation_convergence,
    compute_spectrum,
    convergence_ceiling,
    diagonalize,
)

__version__ = "0.1.0"

__all__ = [
    "BasisIndex",
    "BasisState",
    "ModelParams",
    "ValidationError",
    "build_even_parity_basis",
    "hilbert_dims",
    "HamiltonianMatrix",
    "Spectrum",
    "assemble_hamiltonian",
    "check_truncation_convergence",
    "compute_spectrum",
    "convergence_ceiling",
    "diagonalize",
    "__version__",
]
