import pytest

from dsasim.harness import CurvePoint
from dsasim.report import (
    CSV_COLUMNS,
    MalformedCSVError,
    RunManifest,
    csv_text,
    emit_plot_scripts,
    plot_script,
    read_curve_csv,
    render_script,
    write_csv,
)


def point(sweep="eta", x=0.1, n=500, **kw):
    base = dict(sweep=sweep, x=x, ps=0.5, ps_stderr=0.05, rho_mean=0.9, rho_stderr=0.01, trials=100, n=n,
                delta=10.0, epsilon=160, eta=x if sweep == "eta" else 0.3)
    base.update(kw)
    return CurvePoint(**base)


def test_csv_format():
    text = csv_text([point(rho_mean=1 / 3)])
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "eta,0.1,0.5,0.05,0.333333333,100,500,10,160,0.1"
    assert text.endswith("\n")


def test_csv_round_trip(tmp_path):
    path = write_csv([point(), point(x=0.2)], tmp_path / "eta.csv")
    rows = read_curve_csv(path)
    assert [r["x"] for r in rows] == [0.1, 0.2]
    assert rows[0]["n"] == 500


def test_empty_body_is_malformed(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text(",".join(CSV_COLUMNS) + "\n")
    with pytest.raises(MalformedCSVError):
        read_curve_csv(path)


@pytest.mark.parametrize("body", ["a,b,c\n1,2,3\n", ",".join(CSV_COLUMNS) + "\neta,x,1,1,1,1,1,1,1,1\n", ""])
def test_bad_csv(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(MalformedCSVError):
        read_curve_csv(path)


def test_script_declares_one_series_per_n(tmp_path):
    rows = read_curve_csv(write_csv([point(n=500), point(n=1000), point(n=500, x=0.2)], tmp_path / "e.csv"))
    script = plot_script(rows, "eta")
    assert script.count("# series:") == 2
    compile(script, "plot_eta.py", "exec")


def test_radio_axis_label(tmp_path):
    rows = read_curve_csv(write_csv([point(sweep="radio", x=0.2, delta=20.0)], tmp_path / "r.csv"))
    assert r"\delta/L" in plot_script(rows, "radio")


def test_render_writes_png(tmp_path):
    rows = read_curve_csv(write_csv([point(), point(x=0.5, ps=0.9)], tmp_path / "e.csv"))
    (script,) = emit_plot_scripts(rows, tmp_path)
    png = render_script(script)
    assert png.exists() and png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_manifest_round_trip(tmp_path):
    m = RunManifest(config={"trials": 3}, tool_version="0", base_seed=5, outputs=["a.csv"], duration_s=1.5)
    assert RunManifest.read(m.write(tmp_path / "manifest.json")) == m
