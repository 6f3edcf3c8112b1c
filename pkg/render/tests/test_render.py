import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from dicke_render import FigureSpec, SchemaError, render
from dicke_render.cli import main
from dicke_render.io import check_manifest_consistency, load_csv, load_json

FIXTURES = Path(__file__).parent / "fixtures"

KIND_INPUTS = {
    "section": ["section.csv"],
    "heatmap": ["lyapunov_field.csv"],
    "ratio-hist": ["ratio_hist.csv"],
    "m-hist": ["m_hist.csv"],
    "scan": ["ratio_scan.csv"],
    "powerlaw": ["fit.json"],
}


def spec_for(kind, out, inputs=None):
    inputs = inputs or [str(FIXTURES / f) for f in KIND_INPUTS[kind]]
    return FigureSpec(kind=kind, inputs=inputs, out=str(out))


class TestLoaders:
    def test_load_csv_columns(self):
        cols = load_csv(FIXTURES / "section.csv", ["seed_id", "q2", "p2"])
        assert cols["q2"].shape == cols["p2"].shape
        assert cols["q2"].size > 0

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError, match="'q2'"):
            load_csv(bad, ["q2"])

    def test_empty_file(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SchemaError, match="empty"):
            load_csv(empty, ["q2"])

    def test_header_only(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text("q2,p2\n")
        with pytest.raises(SchemaError, match="no data rows"):
            load_csv(p, ["q2"])

    def test_non_numeric(self, tmp_path):
        p = tmp_path / "n.csv"
        p.write_text("q2\nfoo\n")
        with pytest.raises(SchemaError, match="non-numeric"):
            load_csv(p, ["q2"])

    def test_load_json_missing_key(self, tmp_path):
        p = tmp_path / "f.json"
        p.write_text("{}")
        with pytest.raises(SchemaError, match="'gamma'"):
            load_json(p, ["gamma"])


class TestManifestConsistency:
    def make_run(self, tmp_path, name, coupling):
        d = tmp_path / name
        d.mkdir()
        shutil.copy(FIXTURES / "section.csv", d / "section.csv")
        (d / "manifest.json").write_text(
            json.dumps({"params": {"coupling": coupling, "n_atoms": 2}})
        )
        return d / "section.csv"

    def test_matching_manifests_pass(self, tmp_path):
        a = self.make_run(tmp_path, "a", 0.5)
        b = self.make_run(tmp_path, "b", 0.5)
        check_manifest_consistency([a, b])

    def test_mismatched_manifests_rejected(self, tmp_path):
        a = self.make_run(tmp_path, "a", 0.5)
        b = self.make_run(tmp_path, "b", 0.8)
        with pytest.raises(SchemaError, match="inconsistent"):
            check_manifest_consistency([a, b])

    def test_render_refuses_mismatch(self, tmp_path):
        a = self.make_run(tmp_path, "a", 0.5)
        b = self.make_run(tmp_path, "b", 0.8)
        with pytest.raises(SchemaError):
            render(spec_for("section", tmp_path / "o.png", inputs=[str(a), str(b)]))


class TestRenderKinds:
    @pytest.mark.parametrize("kind", sorted(KIND_INPUTS))
    def test_renders_png(self, tmp_path, kind):
        out = render(spec_for(kind, tmp_path / f"{kind}.png"))
        assert out.exists() and out.stat().st_size > 1000

    @pytest.mark.parametrize("kind", sorted(KIND_INPUTS))
    def test_renders_svg(self, tmp_path, kind):
        out = render(spec_for(kind, tmp_path / f"{kind}.svg"))
        assert out.read_text().lstrip().startswith("<?xml")

    def test_idempotent_bytes(self, tmp_path):
        a = render(spec_for("ratio-hist", tmp_path / "a.png"))
        b = render(spec_for("ratio-hist", tmp_path / "b.png"))
        assert a.read_bytes() == b.read_bytes()

    def test_inputs_not_mutated(self, tmp_path):
        src = FIXTURES / "section.csv"
        before = src.read_bytes()
        render(spec_for("section", tmp_path / "s.png"))
        assert src.read_bytes() == before

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SchemaError, match="unknown figure kind"):
            render(FigureSpec(kind="pie", inputs=["x"], out=str(tmp_path / "x.png")))

    def test_no_inputs(self, tmp_path):
        with pytest.raises(SchemaError, match="no input"):
            render(FigureSpec(kind="section", inputs=[], out=str(tmp_path / "x.png")))

    def test_heatmap_husimi_field(self, tmp_path):
        out = render(
            spec_for(
                "heatmap", tmp_path / "q.png", inputs=[str(FIXTURES / "husimi_field.csv")]
            )
        )
        assert out.exists()

    def test_ratio_hist_overlays_reference_curves(self, tmp_path):
        out = render(spec_for("ratio-hist", tmp_path / "r.svg"))
        text = out.read_text()
        assert "GOE" in text and "Poisson" in text

    def test_powerlaw_annotates_gamma_to_4_decimals(self, tmp_path):
        fit = json.loads((FIXTURES / "fit.json").read_text())
        out = render(spec_for("powerlaw", tmp_path / "p.svg"))
        # the annotation must match the fit-results JSON to 4 decimals;
        # matplotlib renders text as glyph paths, so assert via the figure API
        from dicke_render.figures import render_powerlaw

        fig = render_powerlaw(spec_for("powerlaw", tmp_path / "q.svg"))
        texts = [t.get_text() for ax in fig.axes for t in ax.texts]
        assert any(f"{fit['gamma']:.4f}" in t for t in texts), texts
        assert out.exists()


class TestCli:
    def test_happy_path(self, tmp_path, capsys):
        rc = main(
            [
                "--kind", "m-hist",
                "--in", str(FIXTURES / "m_hist.csv"),
                "--out", str(tmp_path / "m.png"),
            ]
        )
        assert rc == 0
        assert (tmp_path / "m.png").exists()
        assert "wrote" in capsys.readouterr().out

    def test_empty_csv_exits_2(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        rc = main(
            ["--kind", "m-hist", "--in", str(empty), "--out", str(tmp_path / "m.png")]
        )
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path):
        rc = main(
            [
                "--kind", "m-hist",
                "--in", str(tmp_path / "nope.csv"),
                "--out", str(tmp_path / "m.png"),
            ]
        )
        assert rc == 1

    def test_bad_kind_exits_2(self, tmp_path):
        rc = main(
            ["--kind", "pie", "--in", "x", "--out", str(tmp_path / "m.png")]
        )
        assert rc == 2

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "dicke-render" in capsys.readouterr().out
