"""Cached orchestration: spectra -> Husimi fields -> M records -> scans.

Every expensive intermediate is memoized on disk through :mod:`.cache`:
eigenvalue sets per parameter tuple, Lyapunov fields per (coupling, energy,
grid, horizon), and M records per (params, window, mask) combination.  The
cutoff sweep therefore reuses M records across M_c values without touching
any spectra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cache
from .classify import (
    ChaosMask,
    MixedScanRecord,
    chaos_mask,
    mixed_fraction,
    overlap_index,
    powerlaw_fit,
    select_window_states,
)
from .grid import PolarGrid, PolarGridField
from .husimi import poincare_husimi_batch
from .lyapunov import lyapunov_map
from .model import ModelParams, build_even_parity_basis
from .spectrum import Spectrum, assemble_hamiltonian, diagonalize


@dataclass
class OverlapRecords:
    params: ModelParams
    energy: float
    delta_e: float
    state_indices: np.ndarray
    epsilon: np.ndarray
    m_values: np.ndarray


def eigenvalues_cached(params: ModelParams) -> np.ndarray:
    payload = {"what": "eigenvalues", **params.to_dict()}
    hit = cache.load_arrays("spectrum", payload)
    if hit is not None:
        return hit["eigenvalues"]
    basis = build_even_parity_basis(params)
    spec = diagonalize(assemble_hamiltonian(params, basis), vectors=False)
    cache.store_arrays("spectrum", payload, {"eigenvalues": spec.eigenvalues})
    return spec.eigenvalues


def lyapunov_field_cached(
    params: ModelParams,
    energy: float,
    grid: PolarGrid,
    t_end: float = 1000.0,
) -> PolarGridField:
    # the classical flow is independent of N and n_trc
    payload = {
        "what": "lyapunov",
        "omega": params.omega,
        "omega0": params.omega0,
        "coupling": params.coupling,
        "energy": energy,
        "grid": grid.spec(),
        "t_end": t_end,
    }
    hit = cache.load_arrays("lyapunov", payload)
    if hit is not None:
        return PolarGridField(
            grid=grid,
            values=hit["values"],
            accessible=hit["accessible"].astype(bool),
            meta={"kind": "lyapunov", "energy": energy, "t_end": t_end},
        )
    fld = lyapunov_map(energy, params, grid=grid, t_end=t_end)
    cache.store_arrays(
        "lyapunov",
        payload,
        {"values": fld.values, "accessible": fld.accessible},
    )
    return fld


def chaos_mask_cached(
    params: ModelParams,
    energy: float,
    grid: PolarGrid,
    threshold: float = 0.005,
    t_end: float = 1000.0,
) -> ChaosMask:
    return chaos_mask(lyapunov_field_cached(params, energy, grid, t_end), threshold)


def overlap_records(
    params: ModelParams,
    energy: float,
    mask: ChaosMask,
    delta_e: float = 0.04,
    spectrum: Spectrum | None = None,
) -> OverlapRecords:
    """M records for all window states of one parameter set."""
    grid = mask.field.grid
    payload = {
        "what": "overlap",
        **params.to_dict(),
        "energy": energy,
        "delta_e": delta_e,
        "grid": grid.spec(),
        "threshold": mask.threshold,
        "mask_t_end": mask.field.meta.get("t_end", None),
    }
    hit = cache.load_arrays("overlap", payload)
    if hit is not None:
        return OverlapRecords(
            params=params,
            energy=energy,
            delta_e=delta_e,
            state_indices=hit["indices"],
            epsilon=hit["epsilon"],
            m_values=hit["m_values"],
        )
    if spectrum is None:
        basis = build_even_parity_basis(params)
        spectrum = diagonalize(assemble_hamiltonian(params, basis), vectors=True)
    idx = select_window_states(spectrum, energy, delta_e)
    fields = poincare_husimi_batch(
        spectrum.eigenvectors[:, idx],
        energy,
        params,
        spectrum.basis,
        grid=grid,
        state_indices=list(idx),
    )
    m_values = np.array([overlap_index(f, mask) for f in fields])
    eps = spectrum.epsilon[idx]
    cache.store_arrays(
        "overlap",
        payload,
        {"indices": idx, "epsilon": eps, "m_values": m_values},
    )
    return OverlapRecords(
        params=params,
        energy=energy,
        delta_e=delta_e,
        state_indices=idx,
        epsilon=eps,
        m_values=m_values,
    )


def ensemble_members(lo: int, hi: int, step: int = 4) -> list[int]:
    return list(range(lo, hi + 1, step))


def ensemble_scan(
    ensembles: list[list[int]],
    coupling: float,
    energy: float,
    m_c: float = 0.8,
    omega: float = 1.0,
    omega0: float = 1.0,
    n_trc: int = 170,
    grid: PolarGrid | None = None,
    delta_e: float = 0.04,
    threshold: float = 0.005,
    t_end: float = 1000.0,
) -> list[MixedScanRecord]:
    """Per-ensemble (avg N, avg R_m); one classical mask shared across N."""
    grid = grid or PolarGrid()
    ref = ModelParams(omega, omega0, coupling, ensembles[0][0], n_trc)
    mask = chaos_mask_cached(ref, energy, grid, threshold, t_end)
    out = []
    for members in ensembles:
        rec = MixedScanRecord(
            n_values=[], r_m_values=[], n_window_states=[], n_mixed=[]
        )
        for n in members:
            params = ModelParams(omega, omega0, coupling, n, n_trc)
            recs = overlap_records(params, energy, mask, delta_e)
            r_m = mixed_fraction(recs.m_values, m_c)
            rec.n_values.append(n)
            rec.r_m_values.append(r_m)
            rec.n_window_states.append(int(recs.m_values.size))
            rec.n_mixed.append(int(np.sum(np.abs(recs.m_values) <= m_c)))
        out.append(rec)
    return out


def ensemble_m_values(
    ensemble: list[int],
    coupling: float,
    energy: float,
    omega: float = 1.0,
    omega0: float = 1.0,
    n_trc: int = 170,
    grid: PolarGrid | None = None,
    delta_e: float = 0.04,
    threshold: float = 0.005,
    t_end: float = 1000.0,
) -> np.ndarray:
    """Pooled M values over an ensemble of system sizes (for P(M))."""
    grid = grid or PolarGrid()
    ref = ModelParams(omega, omega0, coupling, ensemble[0], n_trc)
    mask = chaos_mask_cached(ref, energy, grid, threshold, t_end)
    chunks = []
    for n in ensemble:
        params = ModelParams(omega, omega0, coupling, n, n_trc)
        chunks.append(overlap_records(params, energy, mask, delta_e).m_values)
    return np.concatenate(chunks)


def cutoff_sweep(
    scan_records_by_mc,
    mc_list: list[float],
) -> list[tuple[float, float, float, float]]:
    """(M_c, gamma, prefactor, r_squared) per cutoff from shared M records.

    ``scan_records_by_mc`` is a callable M_c -> list[MixedScanRecord]; with
    cached overlap records no spectra are recomputed across cutoffs.
    """
    out = []
    for m_c in mc_list:
        records = scan_records_by_mc(m_c)
        points = [(r.avg_n, r.avg_r_m) for r in records]
        try:
            gamma, pref, r2 = powerlaw_fit(points)
        except Exception:
            continue
        out.append((m_c, gamma, pref, r2))
    return out
