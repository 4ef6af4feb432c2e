"""Render every figure family from the shipped sample CSVs."""

import json
import os
import shutil

import pytest
from PIL import Image

import plotkit
from plotkit import PlotSpec, SchemaError, render

DATA = os.path.join(os.path.dirname(__file__), "data")


def _sample(name):
    return os.path.join(DATA, name)


def _digest_of(name):
    with open(_sample(name).rsplit(".", 1)[0] + ".json") as fh:
        return json.load(fh)["config_digest"]


CASES = [
    ("entropy_trace", "scan.csv"),
    ("heatmap", "wigner_t228.csv"),
    ("heatmap", "husimi_t77.csv"),
    ("surface", "husimi_t77.csv"),
    ("surface", "wigner_t228.csv"),
    ("polar", "polar_t77.csv"),
    ("sweep", "sweep.csv"),
]


@pytest.mark.parametrize("kind,name", CASES)
def test_render_family(tmp_path, kind, name):
    out = tmp_path / f"{kind}_{name}.png"
    spec = PlotSpec(inputs=(_sample(name),), kind=kind, output=str(out))
    assert render(spec) == str(out)
    assert out.exists() and out.stat().st_size > 5_000
    # provenance digest propagates into the image metadata
    meta = Image.open(out).text
    assert meta.get("provenance") == _digest_of(name)


def test_render_deterministic(tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(PlotSpec(inputs=(_sample("polar_t77.csv"),), kind="polar", output=str(a)))
    render(PlotSpec(inputs=(_sample("polar_t77.csv"),), kind="polar", output=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_schema_mismatch_rejected(tmp_path):
    out = tmp_path / "x.png"
    with pytest.raises(SchemaError):
        render(PlotSpec(inputs=(_sample("scan.csv"),), kind="polar", output=str(out)))
    with pytest.raises(SchemaError):
        render(PlotSpec(inputs=(_sample("polar_t77.csv"),), kind="heatmap", output=str(out)))


def test_missing_sidecar_rejected(tmp_path):
    orphan = tmp_path / "orphan.csv"
    shutil.copyfile(_sample("scan.csv"), orphan)
    with pytest.raises(SchemaError):
        render(PlotSpec(inputs=(str(orphan),), kind="entropy_trace",
                        output=str(tmp_path / "y.png")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError):
        PlotSpec(inputs=(_sample("scan.csv"),), kind="pie", output=str(tmp_path / "z.png"))


def test_entropy_trace_column_selection(tmp_path):
    out = tmp_path / "cols.png"
    render(PlotSpec(inputs=(_sample("scan.csv"),), kind="entropy_trace",
                    output=str(out), options={"columns": ["wehrl"]}))
    assert out.exists()
    with pytest.raises(SchemaError):
        render(PlotSpec(inputs=(_sample("scan.csv"),), kind="entropy_trace",
                        output=str(out), options={"columns": ["nope"]}))


def test_cli_entrypoints(tmp_path):
    from plotkit import entropy_trace, heatmap, polar_plot, surface, sweep
    assert entropy_trace.main([_sample("scan.csv"), "-o", str(tmp_path / "t.png")]) == 0
    assert heatmap.main([_sample("wigner_t228.csv"), "-o", str(tmp_path / "h.png")]) == 0
    assert surface.main([_sample("husimi_t77.csv"), "-o", str(tmp_path / "s.png")]) == 0
    assert polar_plot.main([_sample("polar_t77.csv"), "-o", str(tmp_path / "p.png")]) == 0
    assert sweep.main([_sample("sweep.csv"), "-o", str(tmp_path / "w.png")]) == 0


def test_svg_output_supported(tmp_path):
    out = tmp_path / "trace.svg"
    render(PlotSpec(inputs=(_sample("scan.csv"),), kind="entropy_trace", output=str(out)))
    body = out.read_text()
    assert "provenance:" + _digest_of("scan.csv") in body
