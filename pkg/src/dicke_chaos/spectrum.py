"""Dense Hamiltonian assembly and diagonalization in the even-parity basis.

All matrix elements are real: the only off-diagonal coupling is
(2 lambda / sqrt(N)) J_x (a^dag + a), whose SU(2) ladder and bosonic ladder
factors are real in the product basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import BasisIndex, ModelParams, build_even_parity_basis


class ProvenanceError(ValueError):
    """Inputs built from inconsistent parameter sets."""


class EigensolverError(RuntimeError):
    pass


@dataclass
class HamiltonianMatrix:
    matrix: np.ndarray
    basis: BasisIndex
    params: ModelParams


@dataclass
class Spectrum:
    """Ascending eigenenergies; eigenvectors are columns over the basis."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    basis: BasisIndex
    params: ModelParams

    @property
    def epsilon(self) -> np.ndarray:
        """Rescaled energies eps_n = E_n / j; n = 0 is the ground state."""
        return self.eigenvalues / self.params.j


@dataclass
class ConvergenceReport:
    max_deviation: float
    n_states: int
    n_trc_lo: int
    n_trc_hi: int
    tolerance: float

    @property
    def converged(self) -> bool:
        return self.max_deviation <= self.tolerance


def assemble_hamiltonian(params: ModelParams, basis: BasisIndex) -> HamiltonianMatrix:
    """Dense symmetric H in the even-parity basis.

    Diagonal: omega*n + omega0*m.  Off-diagonal: the J_x (a^dag + a) term
    couples (n, m) <-> (n +- 1, m +- 1) within the even block.
    """
    if basis.params != params:
        raise ProvenanceError(
            f"basis built for {basis.params}, Hamiltonian requested for {params}"
        )
    j = params.j
    d = basis.size
    h = np.zeros((d, d))
    g = 2.0 * params.coupling / math.sqrt(params.n_atoms)
    for i, s in enumerate(basis.states):
        n, m = s.n_boson, s.m
        h[i, i] = params.omega * n + params.omega0 * m
        # J_x = (J_+ + J_-)/2; <m+1|J_+|m> = sqrt(j(j+1) - m(m+1))
        for dn, dm in ((1, 1), (1, -1)):
            n2, m2 = n + dn, m + dm
            if (n2, m2) not in basis:
                continue
            k = basis.index_of(n2, m2)
            spin = 0.5 * math.sqrt(j * (j + 1) - m * m2)
            elem = g * spin * math.sqrt(n + 1)
            h[i, k] = elem
            h[k, i] = elem
    return HamiltonianMatrix(matrix=h, basis=basis, params=params)


def diagonalize(h: HamiltonianMatrix, vectors: bool = True) -> Spectrum:
    """Full dense symmetric eigendecomposition (LAPACK), ascending order."""
    a = h.matrix
    if not np.all(np.isfinite(a)):
        raise EigensolverError(f"non-finite Hamiltonian entries (size {a.shape[0]})")
    try:
        if vectors:
            w, v = scipy.linalg.eigh(a)
        else:
            w = scipy.linalg.eigvalsh(a)
            v = None
    except scipy.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"eigensolver failed for d={a.shape[0]}, params={h.params}"
        ) from exc
    return Spectrum(eigenvalues=w, eigenvectors=v, basis=h.basis, params=h.params)


def compute_spectrum(params: ModelParams, vectors: bool = True) -> Spectrum:
    """Convenience: basis -> assembly -> diagonalization."""
    basis = build_even_parity_basis(params)
    return diagonalize(assemble_hamiltonian(params, basis), vectors=vectors)


def check_truncation_convergence(
    params: ModelParams,
    window: tuple[float, float],
    n_trc_step: int = 20,
    tolerance: float = 1e-6,
) -> ConvergenceReport:
    """Compare rescaled window energies at n_trc and n_trc + n_trc_step.

    Window states are matched by ordering inside the window (nearest-energy
    pairing after sorting); level crossings are absent for small steps.
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    eps_a = compute_spectrum(params, vectors=False).epsilon
    params_b = ModelParams(
        params.omega,
        params.omega0,
        params.coupling,
        params.n_atoms,
        params.n_trc + n_trc_step,
    )
    eps_b = compute_spectrum(params_b, vectors=False).epsilon
    in_a = eps_a[(eps_a >= lo) & (eps_a <= hi)]
    in_b = eps_b[(eps_b >= lo) & (eps_b <= hi)]
    if in_a.size == 0:
        raise ValueError(f"window [{lo}, {hi}] contains no states at n_trc={params.n_trc}")
    k = min(in_a.size, in_b.size)
    dev = float(np.max(np.abs(in_a[:k] - in_b[:k])))
    if in_a.size != in_b.size:
        # window membership changed across truncations: count it as deviation
        dev = max(dev, tolerance * 10)
    return ConvergenceReport(
        max_deviation=dev,
        n_states=k,
        n_trc_lo=params.n_trc,
        n_trc_hi=params.n_trc + n_trc_step,
        tolerance=tolerance,
    )


def convergence_ceiling(
    eps_lo: np.ndarray, eps_hi: np.ndarray, tolerance: float = 1e-6
) -> float:
    """Highest rescaled energy converged between two truncations.

    Compares two ascending epsilon arrays index by index and returns the
    energy of the last level (in the coarser spectrum) before the first
    deviation above ``tolerance``; levels above it are truncation artifacts
    and must be excluded from bulk statistics.
    """
    eps_lo = np.asarray(eps_lo, dtype=float)
    eps_hi = np.asarray(eps_hi, dtype=float)
    k = min(eps_lo.size, eps_hi.size)
    dev = np.abs(eps_lo[:k] - eps_hi[:k])
    bad = np.nonzero(dev > tolerance)[0]
    if bad.size == 0:
        return float(eps_lo[k - 1])
    if bad[0] == 0:
        raise ValueError("spectra deviate from the ground state up")
    return float(eps_lo[bad[0] - 1])
