"""Chaos masks, the phase-space overlap index M, and mixed-state measures.

M_n = (1/N_cells) sum_cells Q_n(cell) C(cell) with C = +1 on chaotic cells
and -1 elsewhere; with the discrete Husimi normalization this is a
Q-weighted mean of +-1, so M_n in [-1, 1].  States with |M| <= M_c count as
mixed; their fraction R_m in an energy window decays as a power of the
system size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import PolarGridField
from .ratios import InsufficientDataError
from .spectrum import ProvenanceError, Spectrum


@dataclass
class ChaosMask:
    field: PolarGridField        # values +-1 on accessible cells
    threshold: float

    @property
    def chaotic_fraction(self) -> float:
        v = self.field.accessible_values()
        return float(np.mean(v > 0))


@dataclass
class OverlapRecord:
    state_index: int
    epsilon: float
    m_value: float


@dataclass
class MixedScanRecord:
    n_values: list
    r_m_values: list
    n_window_states: list
    n_mixed: list
    incomplete: bool = False
    notes: list = field(default_factory=list)

    @property
    def avg_n(self) -> float:
        return float(np.mean(self.n_values))

    @property
    def avg_r_m(self) -> float:
        return float(np.mean(self.r_m_values))


def chaos_mask(lyap_field: PolarGridField, threshold: float = 0.005) -> ChaosMask:
    """Label accessible cells +1 (chaotic, Lambda > threshold) or -1.

    The default threshold sits just above the finite-time estimator floor of
    regular orbits at t_end = 1000 (~ln t / t ~ 0.004), so "regular" means
    Lambda indistinguishable from zero at that horizon; larger cutoffs would
    relabel the weakly chaotic sticky layer around the islands as regular.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    values = np.full(lyap_field.values.shape, np.nan)
    acc = lyap_field.accessible
    values[acc] = np.where(lyap_field.values[acc] > threshold, 1.0, -1.0)
    masked = PolarGridField(
        grid=lyap_field.grid,
        values=values,
        accessible=acc.copy(),
        meta={**lyap_field.meta, "kind": "chaos_mask", "threshold": threshold},
    )
    return ChaosMask(field=masked, threshold=threshold)


def overlap_index(q: PolarGridField, mask: ChaosMask) -> float:
    """M = (1/N_cells) sum Q C over accessible cells."""
    if not q.same_grid_as(mask.field):
        raise ProvenanceError("Husimi field and chaos mask live on different grids")
    acc = q.accessible
    n_cells = int(acc.sum())
    return float(np.sum(q.values[acc] * mask.field.values[acc]) / n_cells)


def select_window_states(
    spectrum: Spectrum, energy: float, delta_e: float = 0.04
) -> np.ndarray:
    """Indices n with eps_n in the closed asymmetric window [E-dE, E+2dE]."""
    eps = spectrum.epsilon
    idx = np.nonzero((eps >= energy - delta_e) & (eps <= energy + 2 * delta_e))[0]
    if idx.size == 0:
        raise InsufficientDataError(
            f"no eigenstates in window [{energy - delta_e}, {energy + 2 * delta_e}]"
        )
    return idx


def index_distribution(m_values: np.ndarray, bins: int = 20):
    """Density histogram of M on [-1, 1]; integrates to 1."""
    m_values = np.asarray(m_values, dtype=float)
    if m_values.size == 0:
        raise InsufficientDataError("no overlap records")
    counts, edges = np.histogram(m_values, bins=bins, range=(-1.0, 1.0))
    densities = counts / (m_values.size * np.diff(edges))
    return edges, densities


def mixed_fraction(m_values: np.ndarray, m_c: float = 0.8) -> float:
    """R_m: fraction of window states with |M| <= M_c."""
    if not 0 < m_c < 1:
        raise ValueError(f"M_c must lie in (0, 1), got {m_c}")
    m_values = np.asarray(m_values, dtype=float)
    if m_values.size == 0:
        raise InsufficientDataError("no overlap records")
    return float(np.mean(np.abs(m_values) <= m_c))


def powerlaw_fit(points) -> tuple[float, float, float]:
    """Fit R = prefactor * N^(-gamma) by least squares in log-log space.

    Returns (gamma, prefactor, r_squared).  Points with nonpositive R are
    excluded (log undefined).
    """
    points = list(points)
    pts = [(n, r) for n, r in points if r > 0]
    dropped = len(points) - len(pts)
    if dropped:
        import warnings

        warnings.warn(f"powerlaw_fit: excluded {dropped} nonpositive point(s)")
    if len(pts) < 3:
        raise InsufficientDataError(f"need >= 3 usable points, got {len(pts)}")
    x = np.log(np.array([p[0] for p in pts]))
    y = np.log(np.array([p[1] for p in pts]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(-slope), float(np.exp(intercept)), r2
