"""Command-line pipeline: one subcommand per figure family.

    dicke spectrum  -> eigenvalues CSV (+ eigenvector blob) and convergence
    dicke ratio     -> ratio CSV, P(r) histogram, windowed scan
    dicke poincare  -> section crossing CSV
    dicke lyapunov  -> Lyapunov field CSV and averaged exponent
    dicke husimi    -> per-state Poincare-Husimi field CSVs
    dicke overlap   -> M records and P(M) histogram
    dicke scan      -> ensemble R_m table, power-law fit, optional M_c sweep

Every run writes a manifest.json recording parameters, tolerances, and the
produced files; re-running with an identical manifest is a cache hit and
recomputes nothing.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, cache, pipeline
from .classical import accessible_seeds, poincare_section
from .classify import index_distribution, mixed_fraction, powerlaw_fit, select_window_states
from .grid import PolarGrid
from .husimi import poincare_husimi_batch
from .lyapunov import averaged_lyapunov
from .model import ModelParams, ValidationError, build_even_parity_basis
from .ratios import bulk_levels, ratio_report, spacing_ratios, windowed_ratio_scan
from .spectrum import assemble_hamiltonian, check_truncation_convergence, diagonalize

FLOAT_FMT = "%.12g"


def _params_from(args) -> ModelParams:
    cfg = {}
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text())
    def pick(name, default=None):
        v = getattr(args, name, None)
        if v is not None:
            return v
        return cfg.get(name, default)
    return ModelParams(
        omega=float(pick("omega", 1.0)),
        omega0=float(pick("omega0", 1.0)),
        coupling=float(pick("coupling", 0.0)),
        n_atoms=int(pick("n_atoms", 2)),
        n_trc=int(pick("n_trc", 2)),
    )


def _manifest(out: Path, command: str, params: dict, settings: dict, outputs: list[str]) -> dict:
    m = {
        "command": command,
        "params": params,
        "settings": settings,
        "outputs": sorted(outputs),
        "version": __version__,
    }
    m["key"] = cache.key_of({k: m[k] for k in ("command", "params", "settings")})
    return m


def _is_cache_hit(out: Path, manifest: dict) -> bool:
    path = out / "manifest.json"
    if not path.exists():
        return False
    try:
        old = json.loads(path.read_text())
    except json.JSONDecodeError:
        return False
    if old.get("key") != manifest["key"]:
        return False
    return all((out / f).exists() for f in old.get("outputs", []))


def _write_manifest(out: Path, manifest: dict) -> None:
    manifest = {**manifest, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _save_field_csv(path: Path, fld, value_name: str) -> None:
    q2, p2 = fld.grid.cell_centers()
    rows = []
    for i in range(fld.grid.n_r):
        for jj in range(fld.grid.n_theta):
            rows.append(
                (i, jj, q2[i, jj], p2[i, jj], fld.values[i, jj], int(fld.accessible[i, jj]))
            )
    with open(path, "w") as fh:
        fh.write(f"r_idx,theta_idx,q2,p2,{value_name},accessible\n")
        for r in rows:
            fh.write(
                f"{r[0]},{r[1]},{FLOAT_FMT % r[2]},{FLOAT_FMT % r[3]},"
                f"{FLOAT_FMT % r[4] if np.isfinite(r[4]) else 'nan'},{r[5]}\n"
            )


def cmd_spectrum(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    settings = {"vectors": not args.no_vectors}
    manifest = _manifest(out, "spectrum", params.to_dict(), settings, [])
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0
    basis = build_even_parity_basis(params)
    spec = diagonalize(assemble_hamiltonian(params, basis), vectors=not args.no_vectors)
    outputs = ["eigenvalues.csv"]
    with open(out / "eigenvalues.csv", "w") as fh:
        fh.write("n,E,epsilon\n")
        for n, (e, eps) in enumerate(zip(spec.eigenvalues, spec.epsilon)):
            fh.write(f"{n},{FLOAT_FMT % e},{FLOAT_FMT % eps}\n")
    if spec.eigenvectors is not None:
        np.savez_compressed(out / "eigenvectors.npz", eigenvectors=spec.eigenvectors)
        outputs.append("eigenvectors.npz")
    if args.convergence_window:
        lo, hi = args.convergence_window
        rep = check_truncation_convergence(params, (lo, hi), n_trc_step=args.n_trc_step)
        (out / "convergence.json").write_text(
            json.dumps(
                {
                    "max_deviation": rep.max_deviation,
                    "converged": rep.converged,
                    "n_states": rep.n_states,
                    "n_trc": [rep.n_trc_lo, rep.n_trc_hi],
                    "tolerance": rep.tolerance,
                },
                indent=2,
            )
            + "\n"
        )
        outputs.append("convergence.json")
    manifest["outputs"] = sorted(outputs)
    _write_manifest(out, manifest)
    print(f"wrote {len(outputs)} file(s) to {out}")
    return 0


def cmd_ratio(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    settings = {"window_size": args.window_size, "stride": args.stride, "bins": args.bins}
    manifest = _manifest(out, "ratio", params.to_dict(), settings, [])
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0
    w = pipeline.eigenvalues_cached(params)
    eps = w / params.j
    sample = spacing_ratios(bulk_levels(eps))
    report = ratio_report(sample, bins=args.bins)
    with open(out / "ratios.csv", "w") as fh:
        fh.write("n,r\n")
        for n, r in enumerate(sample.ratios):
            fh.write(f"{n},{FLOAT_FMT % r}\n")
    with open(out / "ratio_hist.csv", "w") as fh:
        fh.write("bin_lo,bin_hi,density\n")
        for lo, hi, d in zip(report.bin_edges[:-1], report.bin_edges[1:], report.densities):
            fh.write(f"{FLOAT_FMT % lo},{FLOAT_FMT % hi},{FLOAT_FMT % d}\n")
    with open(out / "ratio_scan.csv", "w") as fh:
        fh.write("mean_epsilon,rescaled_mean_r\n")
        for me, rr in windowed_ratio_scan(eps, args.window_size, args.stride):
            fh.write(f"{FLOAT_FMT % me},{FLOAT_FMT % rr}\n")
    (out / "ratio_summary.json").write_text(
        json.dumps(
            {
                "mean_r": report.mean_r,
                "rescaled_mean_r": report.rescaled_mean_r,
                "ks_goe": report.ks_goe,
                "ks_poisson": report.ks_poisson,
            },
            indent=2,
        )
        + "\n"
    )
    manifest["outputs"] = ["ratio_hist.csv", "ratio_scan.csv", "ratio_summary.json", "ratios.csv"]
    _write_manifest(out, manifest)
    print(f"wrote 4 file(s) to {out}")
    return 0


def cmd_poincare(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    settings = {
        "energy": args.energy,
        "seeds": args.seeds,
        "crossings": args.crossings,
        "tol": args.tol,
    }
    manifest = _manifest(out, "poincare", params.to_dict(), settings, ["section.csv"])
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0
    seeds = accessible_seeds(args.energy, params, n=args.seeds)
    sec = poincare_section(args.energy, params, seeds, n_crossings=args.crossings, tol=args.tol)
    with open(out / "section.csv", "w") as fh:
        fh.write("seed_id,crossing_idx,q2,p2\n")
        counts: dict[int, int] = {}
        for sid, (q2, p2) in zip(sec.seed_ids, sec.points):
            k = counts.get(int(sid), 0)
            counts[int(sid)] = k + 1
            fh.write(f"{sid},{k},{FLOAT_FMT % q2},{FLOAT_FMT % p2}\n")
    _write_manifest(out, manifest)
    print(f"wrote section.csv ({sec.points.shape[0]} crossings) to {out}")
    return 0


def cmd_lyapunov(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = PolarGrid(args.grid, args.grid)
    settings = {"energy": args.energy, "grid": grid.spec(), "t_end": args.t_end}
    manifest = _manifest(
        out, "lyapunov", params.to_dict(), settings, ["lyapunov_field.csv", "lyapunov_avg.csv"]
    )
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0
    fld = pipeline.lyapunov_field_cached(params, args.energy, grid, t_end=args.t_end)
    _save_field_csv(out / "lyapunov_field.csv", fld, "lambda_max")
    with open(out / "lyapunov_avg.csv", "w") as fh:
        fh.write("lambda,energy,avg_lyapunov\n")
        fh.write(
            f"{FLOAT_FMT % params.coupling},{FLOAT_FMT % args.energy},"
            f"{FLOAT_FMT % averaged_lyapunov(fld)}\n"
        )
    _write_manifest(out, manifest)
    print(f"wrote lyapunov field ({fld.n_accessible} accessible cells) to {out}")
    return 0


def cmd_husimi(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = PolarGrid(args.grid, args.grid)
    settings = {"energy": args.energy, "delta_e": args.delta_e, "grid": grid.spec()}
    manifest = _manifest(out, "husimi", params.to_dict(), settings, [])
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0
    basis = build_even_parity_basis(params)
    spec = diagonalize(assemble_hamiltonian(params, basis), vectors=True)
    idx = select_window_states(spec, args.energy, args.delta_e)
    fields = poincare_husimi_batch(
        spec.eigenvectors[:, idx], args.energy, params, basis, grid, state_indices=list(idx)
    )
    outputs = []
    states_meta = []
    for n, fld in zip(idx, fields):
        name = f"husimi_{n:05d}.csv"
        _save_field_csv(out / name, fld, "Q")
        outputs.append(name)
        states_meta.append({"n": int(n), "epsilon": float(spec.epsilon[n])})
    (out / "states.json").write_text(
        json.dumps({"window_energy": args.energy, "states": states_meta}, indent=2) + "\n"
    )
    outputs.append("states.json")
    manifest["outputs"] = sorted(outputs)
    _write_manifest(out, manifest)
    print(f"wrote {len(fields)} Husimi field(s) to {out}")
    return 0


def cmd_overlap(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = PolarGrid(args.grid, args.grid)
    settings = {
        "energy": args.energy,
        "delta_e": args.delta_e,
        "grid": grid.spec(),
        "threshold": args.threshold,
        "t_end": args.t_end,
        "bins": args.bins,
    }
    manifest = _manifest(
        out, "overlap", params.to_dict(), settings, ["overlap.csv", "m_hist.csv"]
    )
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0
    mask = pipeline.chaos_mask_cached(params, args.energy, grid, args.threshold, args.t_end)
    recs = pipeline.overlap_records(params, args.energy, mask, args.delta_e)
    with open(out / "overlap.csv", "w") as fh:
        fh.write("N,n,epsilon,M\n")
        for n, eps, m in zip(recs.state_indices, recs.epsilon, recs.m_values):
            fh.write(f"{params.n_atoms},{n},{FLOAT_FMT % eps},{FLOAT_FMT % m}\n")
    edges, dens = index_distribution(recs.m_values, bins=args.bins)
    with open(out / "m_hist.csv", "w") as fh:
        fh.write("bin_lo,bin_hi,density\n")
        for lo, hi, d in zip(edges[:-1], edges[1:], dens):
            fh.write(f"{FLOAT_FMT % lo},{FLOAT_FMT % hi},{FLOAT_FMT % d}\n")
    _write_manifest(out, manifest)
    print(f"wrote {recs.m_values.size} overlap record(s) to {out}")
    return 0


def _parse_ensembles(text: str) -> list[list[int]]:
    out = []
    for part in text.split(","):
        lo, hi, step = (int(v) for v in part.split(":"))
        out.append(pipeline.ensemble_members(lo, hi, step))
    return out


def cmd_scan(args) -> int:
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ensembles = _parse_ensembles(args.ensembles)
    grid = PolarGrid(args.grid, args.grid)
    settings = {
        "energy": args.energy,
        "ensembles": args.ensembles,
        "mc": args.mc,
        "mc_sweep": args.mc_sweep,
        "delta_e": args.delta_e,
        "grid": grid.spec(),
        "threshold": args.threshold,
        "t_end": args.t_end,
    }
    manifest = _manifest(out, "scan", params.to_dict(), settings, [])
    if _is_cache_hit(out, manifest):
        print(f"cache hit: {out / 'manifest.json'}")
        return 0

    def scan_at(m_c):
        return pipeline.ensemble_scan(
            ensembles,
            params.coupling,
            args.energy,
            m_c=m_c,
            omega=params.omega,
            omega0=params.omega0,
            n_trc=params.n_trc,
            grid=grid,
            delta_e=args.delta_e,
            threshold=args.threshold,
            t_end=args.t_end,
        )

    records = scan_at(args.mc)
    outputs = ["scan.csv", "fit.json"]
    with open(out / "scan.csv", "w") as fh:
        fh.write("ensemble,avg_N,avg_Rm,Mc\n")
        for i, rec in enumerate(records):
            fh.write(
                f"{i},{FLOAT_FMT % rec.avg_n},{FLOAT_FMT % rec.avg_r_m},{FLOAT_FMT % args.mc}\n"
            )
    points = [(r.avg_n, r.avg_r_m) for r in records]
    gamma, pref, r2 = powerlaw_fit(points)
    (out / "fit.json").write_text(
        json.dumps(
            {
                "gamma": gamma,
                "prefactor": pref,
                "r_squared": r2,
                "points": points,
                "mc": args.mc,
            },
            indent=2,
        )
        + "\n"
    )
    if args.mc_sweep:
        lo, hi, step = (float(v) for v in args.mc_sweep.split(":"))
        mcs = list(np.arange(lo, hi + step / 2, step))
        sweep = pipeline.cutoff_sweep(scan_at, mcs)
        with open(out / "mc_sweep.csv", "w") as fh:
            fh.write("Mc,gamma,prefactor,r_squared\n")
            for m_c, g, pf, rr in sweep:
                fh.write(
                    f"{FLOAT_FMT % m_c},{FLOAT_FMT % g},{FLOAT_FMT % pf},{FLOAT_FMT % rr}\n"
                )
        outputs.append("mc_sweep.csv")
    manifest["outputs"] = sorted(outputs)
    _write_manifest(out, manifest)
    print(f"wrote scan results (gamma = {gamma:.4f}) to {out}")
    return 0


def _add_params(sub):
    sub.add_argument("--config", help="flat JSON config file; flags override")
    sub.add_argument("--omega", type=float)
    sub.add_argument("--omega0", type=float)
    sub.add_argument("--coupling", "--lambda", dest="coupling", type=float)
    sub.add_argument("--n-atoms", dest="n_atoms", type=int)
    sub.add_argument("--n-trc", dest="n_trc", type=int)
    sub.add_argument("--out", required=True, help="output/run directory")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dicke", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"dicke-chaos {__version__}")
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("spectrum", help="diagonalize and persist the even-parity spectrum")
    _add_params(s)
    s.add_argument("--no-vectors", action="store_true")
    s.add_argument("--convergence-window", nargs=2, type=float, metavar=("LO", "HI"))
    s.add_argument("--n-trc-step", type=int, default=20)
    s.set_defaults(func=cmd_spectrum)

    s = subs.add_parser("ratio", help="level-spacing-ratio statistics")
    _add_params(s)
    s.add_argument("--window-size", type=int, default=150)
    s.add_argument("--stride", type=int, default=50)
    s.add_argument("--bins", type=int, default=25)
    s.set_defaults(func=cmd_ratio)

    s = subs.add_parser("poincare", help="classical Poincare section")
    _add_params(s)
    s.add_argument("--energy", type=float, required=True)
    s.add_argument("--seeds", type=int, default=8, help="seed grid resolution per axis")
    s.add_argument("--crossings", type=int, default=200)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_poincare)

    s = subs.add_parser("lyapunov", help="maximal-Lyapunov field over the section")
    _add_params(s)
    s.add_argument("--energy", type=float, required=True)
    s.add_argument("--grid", type=int, default=150)
    s.add_argument("--t-end", type=float, default=1000.0)
    s.set_defaults(func=cmd_lyapunov)

    s = subs.add_parser("husimi", help="Poincare-Husimi fields of window states")
    _add_params(s)
    s.add_argument("--energy", type=float, required=True)
    s.add_argument("--delta-e", type=float, default=0.04)
    s.add_argument("--grid", type=int, default=150)
    s.set_defaults(func=cmd_husimi)

    s = subs.add_parser("overlap", help="phase-space overlap index M per window state")
    _add_params(s)
    s.add_argument("--energy", type=float, required=True)
    s.add_argument("--delta-e", type=float, default=0.04)
    s.add_argument("--grid", type=int, default=150)
    s.add_argument("--threshold", type=float, default=0.005)
    s.add_argument("--t-end", type=float, default=1000.0)
    s.add_argument("--bins", type=int, default=20)
    s.set_defaults(func=cmd_overlap)

    s = subs.add_parser("scan", help="mixed-fraction ensemble scan and power-law fit")
    _add_params(s)
    s.add_argument("--energy", type=float, required=True)
    s.add_argument("--ensembles", default="72:88:4,92:108:4,112:128:4")
    s.add_argument("--mc", type=float, default=0.8)
    s.add_argument("--mc-sweep", help="lo:hi:step sweep of M_c")
    s.add_argument("--delta-e", type=float, default=0.04)
    s.add_argument("--grid", type=int, default=150)
    s.add_argument("--threshold", type=float, default=0.005)
    s.add_argument("--t-end", type=float, default=1000.0)
    s.set_defaults(func=cmd_scan)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
