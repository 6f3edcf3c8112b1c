"""Classical Dicke flow: energy, equations of motion, integration, sections.

Phase space is x = (q1, q2, p1, p2) with the atomic constraint
p2^2 + q2^2 <= 4.  The classical energy (per spin j, shifted by -omega0) is

    H_c = (omega/2)(p1^2 + q1^2) + (omega0/2)(p2^2 + q2^2)
          + lambda q1 q2 sqrt(4 - p2^2 - q2^2) - omega0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import ModelParams

BOUNDARY_GUARD = 1e-10


class DomainError(ValueError):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray          # shape (n, 4), rows (q1, q2, p1, p2)
    energy0: float
    max_energy_drift: float
    truncated: bool = False
    diagnostic: str = ""


@dataclass
class SectionPointSet:
    """(q2, p2) crossings of the p1 = 0, q1 > 0 surface at fixed energy."""

    energy: float
    points: np.ndarray                      # shape (n, 2)
    seed_ids: np.ndarray                    # seed index per crossing
    states: np.ndarray | None = None        # refined full states, shape (n, 4)
    convention: str = "both p1-sign-change directions, q1 > 0 recorded"
    diagnostics: list = field(default_factory=list)


def _radius2(x) -> float:
    return x[3] * x[3] + x[1] * x[1]


def hamiltonian_value(x, params: ModelParams) -> float:
    q1, q2, p1, p2 = x
    rad = 4.0 - p2 * p2 - q2 * q2
    if rad < 0:
        raise DomainError(
            f"atomic constraint violated: p2^2 + q2^2 = {p2 * p2 + q2 * q2:.6g} > 4"
        )
    return (
        0.5 * params.omega * (p1 * p1 + q1 * q1)
        + 0.5 * params.omega0 * (p2 * p2 + q2 * q2)
        + params.coupling * q1 * q2 * math.sqrt(rad)
        - params.omega0
    )


def eom_rhs(x, params: ModelParams) -> np.ndarray:
    """Hamilton's equations; requires the strict interior of the atomic disk."""
    q1, q2, p1, p2 = x
    rad = 4.0 - p2 * p2 - q2 * q2
    if rad <= BOUNDARY_GUARD:
        raise DomainError(
            f"state at the singular atomic boundary: 4 - p2^2 - q2^2 = {rad:.3g}"
        )
    w, w0, lam = params.omega, params.omega0, params.coupling
    s = math.sqrt(rad)
    return np.array(
        [
            w * p1,
            w0 * p2 - lam * q1 * q2 * p2 / s,
            -w * q1 - lam * q2 * s,
            -w0 * q2 - lam * q1 * s + lam * q1 * q2 * q2 / s,
        ]
    )


def hessian(x, params: ModelParams) -> np.ndarray:
    """Analytic 4x4 Hessian of H_c, variable order (q1, q2, p1, p2)."""
    q1, q2, p1, p2 = x
    rad = 4.0 - p2 * p2 - q2 * q2
    if rad <= BOUNDARY_GUARD:
        raise DomainError("Hessian requested at the singular atomic boundary")
    w, w0, lam = params.omega, params.omega0, params.coupling
    s = math.sqrt(rad)
    h = np.zeros((4, 4))
    # d sqrt(rad)/dq2 = -q2/s, d/dp2 = -p2/s
    h[0, 0] = w
    h[2, 2] = w
    h[0, 1] = h[1, 0] = lam * (s - q2 * q2 / s)
    h[0, 3] = h[3, 0] = -lam * q2 * p2 / s
    # d^2/dq2^2 of q2 sqrt(rad): -3 q2/s - q2^3/s^3
    h[1, 1] = w0 + lam * q1 * (-3.0 * q2 / s - q2**3 / s**3)
    h[1, 3] = h[3, 1] = lam * q1 * (-p2 / s - q2 * q2 * p2 / s**3)
    h[3, 3] = w0 + lam * q1 * q2 * (-1.0 / s - p2 * p2 / s**3)
    return h


J4 = np.block(
    [
        [np.zeros((2, 2)), np.eye(2)],
        [-np.eye(2), np.zeros((2, 2))],
    ]
)


def integrate(
    x0,
    params: ModelParams,
    t_end: float,
    tol: float = 1e-12,
    n_samples: int = 1000,
) -> Trajectory:
    """Adaptive DOP853 integration with an energy-conservation audit."""
    x0 = np.asarray(x0, dtype=float)
    if _radius2(x0) >= 4.0 - BOUNDARY_GUARD:
        raise DomainError("initial condition must lie strictly inside the atomic disk")
    e0 = hamiltonian_value(x0, params)
    boundary = _boundary_event()
    sol = solve_ivp(
        lambda t, y: eom_rhs(y, params),
        (0.0, t_end),
        x0,
        method="DOP853",
        rtol=tol,
        atol=tol,
        dense_output=False,
        t_eval=np.linspace(0.0, t_end, n_samples),
        events=boundary,
    )
    truncated = not sol.success or (sol.t_events[0].size > 0)
    states = sol.y.T
    energies = np.array([hamiltonian_value(x, params) for x in states])
    drift = float(np.max(np.abs(energies - e0))) if energies.size else 0.0
    return Trajectory(
        times=sol.t,
        states=states,
        energy0=e0,
        max_energy_drift=drift,
        truncated=truncated,
        diagnostic="" if not truncated else f"integrator stopped: {sol.message}",
    )


def _boundary_event():
    def ev(t, y):
        return 4.0 - y[1] * y[1] - y[3] * y[3] - BOUNDARY_GUARD

    ev.terminal = True
    ev.direction = -1
    return ev


def section_branch_q1(
    q2: float, p2: float, energy: float, params: ModelParams
) -> tuple[float, ...]:
    """Roots q1,+- of H_c(q1, q2, p1=0, p2) = E; () when outside the shell.

    Returned sorted descending, so [0] is the q1,+ branch.
    """
    rad = 4.0 - p2 * p2 - q2 * q2
    if rad < 0:
        raise DomainError("point outside the atomic disk")
    w, w0, lam = params.omega, params.omega0, params.coupling
    b = -(lam / w) * q2 * math.sqrt(rad)
    disc = (lam * lam / (w * w)) * q2 * q2 * rad - w0 * (p2 * p2 + q2 * q2) + 2.0 * (
        w0 + energy
    )
    if disc < 0:
        return ()
    if disc == 0:
        return (b,)
    root = math.sqrt(disc)
    return (b + root, b - root)


def lift_to_section(q2: float, p2: float, energy: float, params: ModelParams) -> np.ndarray:
    """PhasePoint on the section surface: p1 = 0, q1 = q1,+(E)."""
    roots = section_branch_q1(q2, p2, energy, params)
    if not roots:
        raise DomainError(
            f"(q2, p2) = ({q2:.4g}, {p2:.4g}) outside the energy shell E = {energy}"
        )
    return np.array([roots[0], q2, 0.0, p2])


def poincare_section(
    energy: float,
    params: ModelParams,
    seeds: list[tuple[float, float]],
    n_crossings: int = 200,
    t_max: float = 20000.0,
    tol: float = 1e-10,
) -> SectionPointSet:
    """Integrate each seed and record p1 = 0 crossings with q1 > 0.

    Crossings are located by the solver's dense-output root refinement; both
    sign-change directions are recorded.
    """
    pts: list[tuple[float, float]] = []
    ids: list[int] = []
    full: list[np.ndarray] = []
    diagnostics: list[str] = []

    def p1_zero(t, y):
        return y[2]

    p1_zero.terminal = False
    p1_zero.direction = 0
    boundary = _boundary_event()

    for sid, (q2, p2) in enumerate(seeds):
        x0 = lift_to_section(q2, p2, energy, params)
        collected = 0
        t0, chunk = 0.0, 500.0
        y0 = x0
        while collected < n_crossings and t0 < t_max:
            sol = solve_ivp(
                lambda t, y: eom_rhs(y, params),
                (t0, min(t0 + chunk, t_max)),
                y0,
                method="DOP853",
                rtol=tol,
                atol=tol,
                events=(p1_zero, boundary),
            )
            for ystate in sol.y_events[0]:
                if ystate[0] > 0:
                    pts.append((ystate[1], ystate[3]))
                    full.append(ystate)
                    ids.append(sid)
                    collected += 1
                    if collected >= n_crossings:
                        break
            if not sol.success or sol.t_events[1].size > 0:
                diagnostics.append(
                    f"seed {sid}: integration stopped at t={sol.t[-1]:.3g} ({sol.message})"
                )
                break
            t0 = sol.t[-1]
            y0 = sol.y[:, -1]
    return SectionPointSet(
        energy=energy,
        points=np.array(pts).reshape(-1, 2),
        seed_ids=np.array(ids, dtype=int),
        states=np.array(full).reshape(-1, 4),
        diagnostics=diagnostics,
    )


def accessible_seeds(
    energy: float, params: ModelParams, n: int = 8
) -> list[tuple[float, float]]:
    """Uniform grid of section points inside the energy shell."""
    out = []
    for q2 in np.linspace(-1.9, 1.9, n):
        for p2 in np.linspace(-1.9, 1.9, n):
            if q2 * q2 + p2 * p2 >= 4.0:
                continue
            if section_branch_q1(q2, p2, energy, params):
                out.append((float(q2), float(p2)))
    return out


def fundamental_matrix(
    x0, params: ModelParams, t_end: float, tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate Omega' = [J4 . D^2 H_c(x(t))] Omega from the identity.

    Returns (times, Omega(t) stack); used for the symplectic det audit and as
    a cross-check of the renormalized tangent propagation.
    """
    x0 = np.asarray(x0, dtype=float)

    def rhs(t, y):
        x = y[:4]
        om = y[4:].reshape(4, 4)
        dx = eom_rhs(x, params)
        dom = (J4 @ hessian(x, params)) @ om
        return np.concatenate([dx, dom.ravel()])

    y0 = np.concatenate([x0, np.eye(4).ravel()])
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        y0,
        method="DOP853",
        rtol=tol,
        atol=tol,
        t_eval=np.linspace(0.0, t_end, 201),
    )
    omegas = sol.y[4:, :].T.reshape(-1, 4, 4)
    return sol.t, omegas
