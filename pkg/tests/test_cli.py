import json

import numpy as np
import pytest

from dicke_chaos.cli import main


@pytest.fixture(autouse=True)
def tmp_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("DICKE_CACHE_DIR", str(tmp_path / "cache"))


def base_args(out, **extra):
    args = ["--omega", "1.0", "--omega0", "1.0", "--out", str(out)]
    for k, v in extra.items():
        args += [f"--{k.replace('_', '-')}", str(v)]
    return args


class TestSpectrumCommand:
    def test_writes_outputs_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "run"
        rc = main(["spectrum", *base_args(out, coupling=0.5, n_atoms=6, n_trc=12)])
        assert rc == 0
        assert (out / "eigenvalues.csv").exists()
        assert (out / "eigenvectors.npz").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "spectrum"
        assert manifest["params"]["coupling"] == 0.5
        assert set(manifest["outputs"]) == {"eigenvalues.csv", "eigenvectors.npz"}
        rows = (out / "eigenvalues.csv").read_text().strip().split("\n")
        assert rows[0] == "n,E,epsilon"
        e = np.array([float(r.split(",")[1]) for r in rows[1:]])
        assert np.all(np.diff(e) >= 0)  # ascending spectrum

    def test_rerun_is_cache_hit(self, tmp_path, capsys):
        out = tmp_path / "run"
        argv = ["spectrum", *base_args(out, coupling=0.5, n_atoms=6, n_trc=12)]
        main(argv)
        capsys.readouterr()
        assert main(argv) == 0
        assert "cache hit" in capsys.readouterr().out

    def test_param_change_invalidates_manifest(self, tmp_path, capsys):
        out = tmp_path / "run"
        main(["spectrum", *base_args(out, coupling=0.5, n_atoms=6, n_trc=12)])
        capsys.readouterr()
        main(["spectrum", *base_args(out, coupling=0.6, n_atoms=6, n_trc=12)])
        assert "cache hit" not in capsys.readouterr().out

    def test_no_vectors(self, tmp_path):
        out = tmp_path / "run"
        main(["spectrum", "--no-vectors", *base_args(out, coupling=0.5, n_atoms=6, n_trc=12)])
        assert not (out / "eigenvectors.npz").exists()

    def test_convergence_report(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "spectrum",
                "--convergence-window", "-1.2", "-0.8",
                "--n-trc-step", "8",
                *base_args(out, coupling=0.3, n_atoms=6, n_trc=16),
            ]
        )
        assert rc == 0
        rep = json.loads((out / "convergence.json").read_text())
        assert {"max_deviation", "converged", "n_states", "n_trc", "tolerance"} <= set(rep)

    def test_odd_atom_count_is_config_error(self, tmp_path, capsys):
        out = tmp_path / "run"
        rc = main(["spectrum", *base_args(out, coupling=0.5, n_atoms=7, n_trc=12)])
        assert rc == 2
        assert "invalid configuration" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"coupling": 0.5, "n_atoms": 6, "n_trc": 12}))
        out = tmp_path / "run"
        rc = main(["spectrum", "--config", str(cfg), "--coupling", "0.7", "--out", str(out)])
        assert rc == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["params"]["coupling"] == 0.7
        assert manifest["params"]["n_atoms"] == 6


class TestRatioCommand:
    def test_outputs(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "ratio",
                "--window-size", "40",
                "--stride", "20",
                *base_args(out, coupling=1.0, n_atoms=10, n_trc=40),
            ]
        )
        assert rc == 0
        summary = json.loads((out / "ratio_summary.json").read_text())
        assert 0.0 < summary["mean_r"] < 1.0
        assert 0.0 < summary["rescaled_mean_r"] < 1.5
        hist = (out / "ratio_hist.csv").read_text().strip().split("\n")[1:]
        dens = np.array([float(r.split(",")[2]) for r in hist])
        edges = np.array([float(r.split(",")[0]) for r in hist] + [float(hist[-1].split(",")[1])])
        assert np.sum(dens * np.diff(edges)) == pytest.approx(1.0, abs=1e-9)


class TestClassicalCommands:
    def test_poincare(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "poincare",
                "--energy", "-0.4",
                "--seeds", "3",
                "--crossings", "5",
                *base_args(out, coupling=0.5, n_atoms=2, n_trc=2),
            ]
        )
        assert rc == 0
        rows = (out / "section.csv").read_text().strip().split("\n")
        assert rows[0] == "seed_id,crossing_idx,q2,p2"
        assert len(rows) > 1
        for row in rows[1:]:
            _, _, q2, p2 = row.split(",")
            assert float(q2) ** 2 + float(p2) ** 2 < 4.0

    def test_lyapunov(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "lyapunov",
                "--energy", "-0.4",
                "--grid", "8",
                "--t-end", "20",
                *base_args(out, coupling=0.5, n_atoms=2, n_trc=2),
            ]
        )
        assert rc == 0
        rows = (out / "lyapunov_field.csv").read_text().strip().split("\n")
        assert rows[0] == "r_idx,theta_idx,q2,p2,lambda_max,accessible"
        assert len(rows) == 1 + 8 * 8
        avg_rows = (out / "lyapunov_avg.csv").read_text().strip().split("\n")
        assert float(avg_rows[1].split(",")[2]) >= 0.0
        # inaccessible rows carry nan
        for row in rows[1:]:
            parts = row.split(",")
            if parts[5] == "0":
                assert parts[4] == "nan"

    def test_empty_shell_is_runtime_error(self, tmp_path, capsys):
        out = tmp_path / "run"
        rc = main(
            [
                "lyapunov",
                "--energy", "-3.0",
                "--grid", "4",
                "--t-end", "5",
                *base_args(out, coupling=0.5, n_atoms=2, n_trc=2),
            ]
        )
        assert rc == 1
        assert "error" in capsys.readouterr().err


class TestQuantumClassicalCommands:
    def test_husimi(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "husimi",
                "--energy", "-0.4",
                "--delta-e", "0.2",
                "--grid", "8",
                *base_args(out, coupling=0.5, n_atoms=6, n_trc=12),
            ]
        )
        assert rc == 0
        states = json.loads((out / "states.json").read_text())
        assert states["states"]
        first = states["states"][0]["n"]
        assert (out / f"husimi_{first:05d}.csv").exists()

    def test_overlap(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "overlap",
                "--energy", "-0.4",
                "--delta-e", "0.2",
                "--grid", "8",
                "--t-end", "20",
                *base_args(out, coupling=0.5, n_atoms=6, n_trc=12),
            ]
        )
        assert rc == 0
        rows = (out / "overlap.csv").read_text().strip().split("\n")
        assert rows[0] == "N,n,epsilon,M"
        ms = np.array([float(r.split(",")[3]) for r in rows[1:]])
        assert np.all(np.abs(ms) <= 1.0 + 1e-12)
        assert (out / "m_hist.csv").exists()

    # the toy ensemble yields R_m = 0 at some cutoffs; the fit rightly warns
    @pytest.mark.filterwarnings("ignore:powerlaw_fit. excluded:UserWarning")
    def test_scan_with_sweep(self, tmp_path):
        out = tmp_path / "run"
        rc = main(
            [
                "scan",
                "--energy", "-0.4",
                "--ensembles", "6:8:2,10:12:2,14:16:2",
                "--delta-e", "0.25",
                "--grid", "8",
                "--t-end", "20",
                "--mc", "0.9",
                "--mc-sweep", "0.7:0.9:0.1",
                *base_args(out, coupling=0.5, n_atoms=6, n_trc=16),
            ]
        )
        assert rc == 0
        fit = json.loads((out / "fit.json").read_text())
        assert np.isfinite(fit["gamma"]) and fit["r_squared"] <= 1.0
        assert len(fit["points"]) == 3
        sweep_rows = (out / "mc_sweep.csv").read_text().strip().split("\n")
        assert sweep_rows[0] == "Mc,gamma,prefactor,r_squared"


class TestTopLevel:
    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        assert "dicke-chaos" in capsys.readouterr().out

    def test_missing_subcommand(self, capsys):
        assert main([]) == 2

    def test_missing_required_flag(self, capsys):
        # poincare requires --energy
        assert main(["poincare", "--out", "/tmp/x"]) == 2
