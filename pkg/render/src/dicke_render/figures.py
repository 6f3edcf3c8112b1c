"""The six figure kinds rendered from dicke-chaos data files.

    section    — Poincaré-section scatter in the (q2, p2) disk
    heatmap    — polar-grid scalar field (Lyapunov exponent or Husimi Q)
    ratio-hist — P(r) histogram with the GOE and Poisson reference curves
    m-hist     — P(M) histogram of the overlap index on [-1, 1]
    scan       — windowed rescaled mean ratio versus energy
    powerlaw   — log-log mixed-fraction decay with the fitted line and γ
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "dicke-render"

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, check_manifest_consistency, load_csv, load_json


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    out: str
    title: str = ""
    labels: dict = field(default_factory=dict)


def _new_axes(figsize=(5.0, 4.0)):
    fig, ax = plt.subplots(figsize=figsize)
    return fig, ax


def _save(fig, out: str | Path) -> None:
    out = Path(out)
    fmt = out.suffix.lstrip(".").lower() or "png"
    if fmt == "svg":
        metadata = {"Date": None}
    else:
        metadata = {"Software": "dicke-render"}
    fig.savefig(out, dpi=150, format=fmt, metadata=metadata, bbox_inches="tight")
    plt.close(fig)


def _disk_boundary(ax):
    theta = np.linspace(0.0, 2.0 * np.pi, 361)
    ax.plot(2.0 * np.cos(theta), 2.0 * np.sin(theta), color="black", lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlabel("$q_2$")
    ax.set_ylabel("$p_2$")


def render_section(spec: FigureSpec):
    fig, ax = _new_axes((4.6, 4.6))
    for path in spec.inputs:
        cols = load_csv(path, ["seed_id", "crossing_idx", "q2", "p2"])
        ax.scatter(
            cols["q2"],
            cols["p2"],
            c=cols["seed_id"],
            cmap="viridis",
            s=1.0,
            linewidths=0,
            rasterized=True,
        )
    _disk_boundary(ax)
    return fig


# reference ratio densities (closed-form surmises, overlays only)
def _goe_density(r):
    return (27.0 / 4.0) * (r + r * r) / (1.0 + r + r * r) ** 2.5


def _poisson_density(r):
    return 2.0 / (1.0 + r) ** 2


def _field_grid(cols):
    """Rebuild the (n_r, n_theta) value grid and polar cell corners."""
    i = cols["r_idx"].astype(int)
    j = cols["theta_idx"].astype(int)
    n_r, n_theta = i.max() + 1, j.max() + 1
    if i.size != n_r * n_theta:
        raise SchemaError(f"field CSV is not a complete {n_r}x{n_theta} grid")
    values = np.full((n_r, n_theta), np.nan)
    radii = np.zeros(n_r)
    thetas = np.zeros(n_theta)
    r_pt = np.hypot(cols["q2"], cols["p2"])
    th_pt = np.arctan2(cols["p2"], cols["q2"])
    name = _value_column(cols)
    for k in range(i.size):
        values[i[k], j[k]] = cols[name][k]
        radii[i[k]] = r_pt[k]
        thetas[j[k]] = th_pt[k]
    acc = cols["accessible"].astype(bool)
    vals = values.copy()
    vals[~acc.reshape(n_r, n_theta)] = np.nan

    def edges(centers, lo, hi):
        mids = 0.5 * (centers[:-1] + centers[1:])
        return np.concatenate([[lo], mids, [hi]])

    r_edges = edges(radii, 0.0, 2.0)
    th_sorted = np.sort(thetas)
    dth = 2.0 * np.pi / n_theta
    th_edges = np.concatenate([th_sorted - dth / 2.0, [th_sorted[-1] + dth / 2.0]])
    order = np.argsort(thetas)
    return vals[:, order], r_edges, th_edges


def _value_column(cols):
    known = {"r_idx", "theta_idx", "q2", "p2", "accessible"}
    extras = [name for name in cols if name not in known]
    if len(extras) != 1:
        raise SchemaError(f"expected exactly one value column, found {extras}")
    return extras[0]


def render_heatmap(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise SchemaError("heatmap takes exactly one field CSV")
    cols = load_csv(
        spec.inputs[0], ["r_idx", "theta_idx", "q2", "p2", "accessible"]
    )
    vals, r_edges, th_edges = _field_grid(cols)
    th_grid, r_grid = np.meshgrid(th_edges, r_edges)
    x = r_grid * np.cos(th_grid)
    y = r_grid * np.sin(th_grid)
    fig, ax = _new_axes((5.2, 4.6))
    mesh = ax.pcolormesh(x, y, vals, cmap="magma", shading="flat")
    fig.colorbar(mesh, ax=ax, label=spec.labels.get("value", _value_column(cols)))
    _disk_boundary(ax)
    return fig


def _hist_bars(ax, cols, color):
    lo, hi, dens = cols["bin_lo"], cols["bin_hi"], cols["density"]
    ax.bar(lo, dens, width=hi - lo, align="edge", color=color, edgecolor="white")


def render_ratio_hist(spec: FigureSpec):
    fig, ax = _new_axes()
    for path in spec.inputs:
        cols = load_csv(path, ["bin_lo", "bin_hi", "density"])
        _hist_bars(ax, cols, "#7fa8d0")
    r = np.linspace(0.0, 1.0, 400)
    ax.plot(r, _goe_density(r), color="crimson", lw=1.5, label="GOE")
    ax.plot(r, _poisson_density(r), color="darkgreen", lw=1.5, ls="--", label="Poisson")
    ax.set_xlabel("$r$")
    ax.set_ylabel("$P(r)$")
    ax.set_xlim(0, 1)
    ax.legend()
    return fig


def render_m_hist(spec: FigureSpec):
    fig, ax = _new_axes()
    for path in spec.inputs:
        cols = load_csv(path, ["bin_lo", "bin_hi", "density"])
        _hist_bars(ax, cols, "#9b8dc9")
    ax.set_xlabel("$M$")
    ax.set_ylabel("$P(M)$")
    ax.set_xlim(-1, 1)
    return fig


def render_scan(spec: FigureSpec):
    fig, ax = _new_axes()
    for path in spec.inputs:
        cols = load_csv(path, ["mean_epsilon", "rescaled_mean_r"])
        ax.plot(cols["mean_epsilon"], cols["rescaled_mean_r"], marker="o", ms=3)
    ax.axhline(0.0, color="darkgreen", lw=0.8, ls=":")
    ax.axhline(1.0, color="crimson", lw=0.8, ls=":")
    ax.set_xlabel(r"$\langle \epsilon \rangle$")
    ax.set_ylabel(r"$\langle \tilde r \rangle$")
    return fig


def render_powerlaw(spec: FigureSpec):
    if len(spec.inputs) != 1:
        raise SchemaError("powerlaw takes exactly one fit-results JSON")
    fit = load_json(spec.inputs[0], ["gamma", "prefactor", "points"])
    points = np.array(fit["points"], dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] == 0:
        raise SchemaError(f"{spec.inputs[0]}: 'points' must be a nonempty list of pairs")
    n, r_m = points[:, 0], points[:, 1]
    fig, ax = _new_axes()
    ax.loglog(n, r_m, "o", color="#2f5d8a")
    grid = np.geomspace(n.min() * 0.9, n.max() * 1.1, 100)
    ax.loglog(grid, fit["prefactor"] * grid ** -fit["gamma"], color="crimson", lw=1.2)
    ax.annotate(
        rf"$\gamma = {fit['gamma']:.4f}$",
        xy=(0.05, 0.08),
        xycoords="axes fraction",
    )
    ax.set_xlabel(r"$\langle N \rangle$")
    ax.set_ylabel(r"$\langle R_m \rangle$")
    return fig


KINDS = {
    "section": render_section,
    "heatmap": render_heatmap,
    "ratio-hist": render_ratio_hist,
    "m-hist": render_m_hist,
    "scan": render_scan,
    "powerlaw": render_powerlaw,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure to ``spec.out``; returns the output path."""
    if spec.kind not in KINDS:
        raise SchemaError(f"unknown figure kind '{spec.kind}' (choose from {sorted(KINDS)})")
    if not spec.inputs:
        raise SchemaError("no input files given")
    check_manifest_consistency(spec.inputs)
    fig = KINDS[spec.kind](spec)
    if spec.title:
        fig.axes[0].set_title(spec.title)
    _save(fig, spec.out)
    return Path(spec.out)
