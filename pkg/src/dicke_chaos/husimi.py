"""Coherent-state overlaps and Poincare-Husimi functions of eigenstates.

A section point (q2, p2) at reference energy E is lifted to the phase point
(q1 = q1,+, q2, p1 = 0, p2) and mapped to the Glauber/Bloch parameters

    alpha = sqrt(j/2) (q1 + i p1),   xi = (q2 + i p2) / sqrt(4 - p2^2 - q2^2)

The Poincare-Husimi value of eigenstate |E_n> is |<alpha, xi | E_n>|^2,
normalized on the grid so that the accessible-cell average is 1.

All factorials and binomials are handled in the log domain so that photon
numbers up to a few hundred and 2j ~ 10^2 never overflow.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .classical import section_branch_q1
from .grid import PolarGrid, PolarGridField
from .model import BasisIndex, ModelParams
from .spectrum import ProvenanceError


def coherent_params(x, j: int) -> tuple[complex, complex]:
    """(alpha, xi) of a phase point; defined only strictly inside the disk."""
    q1, q2, p1, p2 = x
    rad = 4.0 - p2 * p2 - q2 * q2
    if rad <= 0:
        raise ValueError("coherent parameters undefined on the atomic boundary")
    alpha = math.sqrt(j / 2.0) * (q1 + 1j * p1)
    xi = (q2 + 1j * p2) / math.sqrt(rad)
    return alpha, xi


def boson_overlap(alpha: complex, n: int) -> complex:
    """<n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!)."""
    return complex(boson_overlaps(alpha, n)[n])


def boson_overlaps(alpha: complex, n_max: int) -> np.ndarray:
    """Vector of <n|alpha> for n = 0..n_max."""
    n = np.arange(n_max + 1)
    a = abs(alpha)
    if a == 0.0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    log_mod = -0.5 * a * a + n * math.log(a) - 0.5 * gammaln(n + 1.0)
    phase = n * np.angle(alpha)
    return np.exp(log_mod) * np.exp(1j * phase)


def spin_overlap(xi: complex, j: int, m: int) -> complex:
    """<j, m|xi> = sqrt(C(2j, j+m)) xi^{j+m} / (1 + |xi|^2)^j."""
    if not -j <= m <= j:
        raise ValueError(f"m = {m} outside [-{j}, {j}]")
    return complex(spin_overlaps(xi, j)[j + m])


def spin_overlaps(xi: complex, j: int) -> np.ndarray:
    """Vector of <j, m|xi> for m = -j..j (index j + m)."""
    k = np.arange(2 * j + 1)  # k = j + m
    x = abs(xi)
    log_binom = gammaln(2 * j + 1.0) - gammaln(k + 1.0) - gammaln(2 * j - k + 1.0)
    if x == 0.0:
        out = np.zeros(2 * j + 1, dtype=complex)
        out[0] = 1.0
        return out
    log_mod = 0.5 * log_binom + k * math.log(x) - j * math.log1p(x * x)
    phase = k * np.angle(xi)
    return np.exp(log_mod) * np.exp(1j * phase)


def section_overlap_matrix(
    energy: float,
    params: ModelParams,
    basis: BasisIndex,
    grid: PolarGrid,
    chunk: int = 512,
):
    """Accessibility mask plus a generator of coherent-overlap row chunks.

    Yields (slice, W) pairs where W[c, k] = conj(<CS(cell c)|basis state k>),
    so that amplitudes for an eigenvector block V are W @ V.  Chunked to keep
    memory bounded at large Hilbert dimensions.
    """
    q2, p2 = grid.cell_centers()
    flat_q2, flat_p2 = q2.ravel(), p2.ravel()
    accessible = np.zeros(flat_q2.size, dtype=bool)
    lifts = np.zeros(flat_q2.size)
    for c in range(flat_q2.size):
        roots = section_branch_q1(flat_q2[c], flat_p2[c], energy, params)
        if roots:
            accessible[c] = True
            lifts[c] = roots[0]
    cells = np.nonzero(accessible)[0]
    j = params.j
    ns = np.array([s.n_boson for s in basis.states])
    ks = np.array([s.m + j for s in basis.states])

    def chunks():
        for start in range(0, cells.size, chunk):
            sel = cells[start : start + chunk]
            w = np.empty((sel.size, basis.size), dtype=complex)
            for row, c in enumerate(sel):
                x = (lifts[c], flat_q2[c], 0.0, flat_p2[c])
                alpha, xi = coherent_params(x, j)
                b = np.conj(boson_overlaps(alpha, params.n_trc))
                s = np.conj(spin_overlaps(xi, j))
                w[row] = b[ns] * s[ks]
            yield sel, w

    return accessible, chunks


def poincare_husimi_batch(
    states: np.ndarray,
    window_energy: float,
    params: ModelParams,
    basis: BasisIndex,
    grid: PolarGrid | None = None,
    state_indices: list[int] | None = None,
) -> list[PolarGridField]:
    """Poincare-Husimi fields for eigenvector columns ``states`` (d x k).

    All states share one section surface, grid, and accessibility mask at the
    window reference energy.  Each field is normalized to the discrete
    convention sum(Q) / n_accessible = 1.
    """
    grid = grid or PolarGrid()
    states = np.asarray(states)
    if states.ndim == 1:
        states = states[:, None]
    if states.shape[0] != basis.size:
        raise ProvenanceError(
            f"state length {states.shape[0]} does not match basis size {basis.size}"
        )
    norms = np.linalg.norm(states, axis=0)
    if np.any(norms == 0):
        raise ValueError("zero eigenvector supplied")
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise ValueError("eigenvectors must be normalized")
    accessible_flat, chunks = section_overlap_matrix(window_energy, params, basis, grid)
    n_acc = int(accessible_flat.sum())
    if n_acc == 0:
        raise ValueError(f"empty energy shell at E = {window_energy}")
    q_flat = np.zeros((accessible_flat.size, states.shape[1]))
    for sel, w in chunks():
        amp = w @ states
        q_flat[sel] = np.abs(amp) ** 2
    # discrete normalization: accessible-cell average of Q equals 1
    totals = q_flat[accessible_flat].sum(axis=0)
    q_flat = q_flat * (n_acc / totals)
    shape = (grid.n_r, grid.n_theta)
    accessible = accessible_flat.reshape(shape)
    fields = []
    for col in range(states.shape[1]):
        vals = q_flat[:, col].reshape(shape).copy()
        vals[~accessible] = np.nan
        fields.append(
            PolarGridField(
                grid=grid,
                values=vals,
                accessible=accessible.copy(),
                meta={
                    "kind": "husimi",
                    "energy": window_energy,
                    "params": params.to_dict(),
                    "state_index": None
                    if state_indices is None
                    else state_indices[col],
                },
            )
        )
    return fields


def poincare_husimi(
    state: np.ndarray,
    window_energy: float,
    params: ModelParams,
    basis: BasisIndex,
    grid: PolarGrid | None = None,
) -> PolarGridField:
    """Poincare-Husimi field of a single normalized eigenvector."""
    return poincare_husimi_batch(state, window_energy, params, basis, grid)[0]
