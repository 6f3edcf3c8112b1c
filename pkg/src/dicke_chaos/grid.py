"""Polar grid over the atomic (q2, p2) disk of radius 2.

Cells are labeled (i, j) with centers q2 = r_i cos(theta_j),
p2 = r_i sin(theta_j); the area element is r dr dtheta.  The same grid
carries Lyapunov fields, chaos masks, and Poincare-Husimi fields, so that
cellwise sums line up without interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

R_MAX = 2.0


@dataclass(frozen=True)
class PolarGrid:
    n_r: int = 150
    n_theta: int = 150
    r_max: float = R_MAX

    def __post_init__(self):
        if self.n_r < 1 or self.n_theta < 1:
            raise ValueError("grid resolution must be positive")

    @property
    def dr(self) -> float:
        return self.r_max / self.n_r

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    @property
    def r_centers(self) -> np.ndarray:
        return (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def theta_centers(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * self.dtheta

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """(q2, p2) arrays of shape (n_r, n_theta)."""
        r = self.r_centers[:, None]
        th = self.theta_centers[None, :]
        return r * np.cos(th), r * np.sin(th)

    def area_weights(self) -> np.ndarray:
        """r dr dtheta per cell, shape (n_r, n_theta)."""
        w = self.r_centers * self.dr * self.dtheta
        return np.broadcast_to(w[:, None], (self.n_r, self.n_theta)).copy()

    def spec(self) -> dict:
        return {"n_r": self.n_r, "n_theta": self.n_theta, "r_max": self.r_max}


@dataclass
class PolarGridField:
    """Scalar field on a PolarGrid with an accessibility mask.

    ``values`` is only meaningful where ``accessible`` is True; inaccessible
    cells (no real section root at the field's energy) are NaN, never 0.
    """

    grid: PolarGrid
    values: np.ndarray
    accessible: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (self.grid.n_r, self.grid.n_theta)
        if self.values.shape != shape or self.accessible.shape != shape:
            raise ValueError(f"field arrays must have shape {shape}")

    @property
    def n_accessible(self) -> int:
        return int(np.sum(self.accessible))

    def accessible_values(self) -> np.ndarray:
        return self.values[self.accessible]

    def same_grid_as(self, other: "PolarGridField") -> bool:
        return self.grid == other.grid and np.array_equal(
            self.accessible, other.accessible
        )
