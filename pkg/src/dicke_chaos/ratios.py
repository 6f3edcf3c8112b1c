"""Level-spacing-ratio statistics: r_n = min(delta_n, 1/delta_n).

Ratio statistics need no unfolding and live on [0, 1].  Reference
distributions: GOE surmise P_GOE(r) = (27/4)(r + r^2)/(1 + r + r^2)^{5/2}
and Poisson P_P(r) = 2/(1 + r)^2, with means <r>_GOE = 4 - 2 sqrt(3) and
<r>_P = 2 ln 2 - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MEAN_R_POISSON = 2.0 * math.log(2.0) - 1.0     # ~0.38629
MEAN_R_GOE = 4.0 - 2.0 * math.sqrt(3.0)        # ~0.53590


class InsufficientDataError(ValueError):
    pass


@dataclass
class RatioSample:
    ratios: np.ndarray
    n_degenerate: int = 0
    provenance: dict = field(default_factory=dict)


@dataclass
class RatioReport:
    bin_edges: np.ndarray
    densities: np.ndarray
    mean_r: float
    rescaled_mean_r: float
    ks_goe: float
    ks_poisson: float


def spacing_ratios(levels: np.ndarray, provenance: dict | None = None) -> RatioSample:
    """r_n = min(s_n/s_{n+1}, s_{n+1}/s_n) over consecutive spacings.

    Degenerate spacings yield r = 0 and are counted in ``n_degenerate``;
    parity-resolved Dicke spectra should never produce them.
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size < 3:
        raise InsufficientDataError(f"need >= 3 levels, got {levels.size}")
    if np.any(np.diff(levels) < 0):
        raise ValueError("levels must be ascending")
    s = np.diff(levels)
    a, b = s[:-1], s[1:]
    n_deg = int(np.sum((a == 0) | (b == 0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.minimum(a / b, b / a)
    r = np.where(np.isfinite(r), r, 0.0)
    return RatioSample(ratios=r, n_degenerate=n_deg, provenance=provenance or {})


def goe_density(r):
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise ValueError("r must lie in [0, 1]")
    return (27.0 / 4.0) * (r + r * r) / (1.0 + r + r * r) ** 2.5


def poisson_density(r):
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise ValueError("r must lie in [0, 1]")
    return 2.0 / (1.0 + r) ** 2


def reference_densities(r) -> tuple[np.ndarray, np.ndarray]:
    return goe_density(r), poisson_density(r)


def _goe_antiderivative(r):
    # int (27/4)(u - 1) u^{-5/2} dr with u = r^2 + r + 1, x = r + 1/2, a^2 = 3/4
    x = r + 0.5
    a2 = 0.75
    u = r * r + r + 1.0
    i32 = x / (a2 * np.sqrt(u))
    i52 = x / (3.0 * a2 * u**1.5) + (2.0 / (3.0 * a2)) * i32
    return (27.0 / 4.0) * (i32 - i52)


def goe_cdf(r):
    r = np.asarray(r, dtype=float)
    return _goe_antiderivative(r) - _goe_antiderivative(np.zeros_like(r))


def poisson_cdf(r):
    r = np.asarray(r, dtype=float)
    return 2.0 * r / (1.0 + r)


def _ks_distance(sample: np.ndarray, cdf) -> float:
    x = np.sort(sample)
    n = x.size
    f = cdf(x)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def mean_and_rescaled(sample: RatioSample) -> tuple[float, float]:
    """(mean r, rescaled mean |<r> - <r>_P| / (<r>_GOE - <r>_P))."""
    if sample.ratios.size == 0:
        raise InsufficientDataError("empty ratio sample")
    mean_r = float(np.mean(sample.ratios))
    rescaled = abs(mean_r - MEAN_R_POISSON) / (MEAN_R_GOE - MEAN_R_POISSON)
    return mean_r, rescaled


def ratio_report(sample: RatioSample, bins: int = 25) -> RatioReport:
    counts, edges = np.histogram(sample.ratios, bins=bins, range=(0.0, 1.0))
    densities = counts / (sample.ratios.size * np.diff(edges))
    mean_r, rescaled = mean_and_rescaled(sample)
    return RatioReport(
        bin_edges=edges,
        densities=densities,
        mean_r=mean_r,
        rescaled_mean_r=rescaled,
        ks_goe=_ks_distance(sample.ratios, goe_cdf),
        ks_poisson=_ks_distance(sample.ratios, poisson_cdf),
    )


def bulk_levels(levels: np.ndarray, low_frac: float = 0.05, ceiling: float | None = None) -> np.ndarray:
    """Bulk slice for full-spectrum statistics.

    Drops the lowest 5% (spectral edge) and, when given, everything above the
    truncation-convergence ceiling.
    """
    levels = np.asarray(levels, dtype=float)
    lo = int(low_frac * levels.size)
    out = levels[lo:]
    if ceiling is not None:
        out = out[out <= ceiling]
    return out


def windowed_ratio_scan(
    epsilon: np.ndarray, window_size: int = 150, stride: int = 50
) -> list[tuple[float, float]]:
    """Sliding-window (mean eps, rescaled <r~>) over an ascending spectrum."""
    if window_size < 10:
        raise ValueError(f"window_size must be >= 10, got {window_size}")
    epsilon = np.asarray(epsilon, dtype=float)
    if epsilon.size < window_size + 2:
        raise InsufficientDataError(
            f"need >= {window_size + 2} levels, got {epsilon.size}"
        )
    out = []
    for start in range(0, epsilon.size - window_size + 1, stride):
        win = epsilon[start : start + window_size]
        _, rescaled = mean_and_rescaled(spacing_ratios(win))
        out.append((float(np.mean(win)), rescaled))
    return out
