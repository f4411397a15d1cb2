"""CSV output, run manifests, and plot scripts / figures for sweep curves."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from dsasim.harness import CurvePoint

CSV_COLUMNS = ("sweep", "x", "ps", "ps_stderr", "rho_mean", "trials", "n", "delta", "epsilon", "eta")

AXIS_LABELS = {
    "eta": r"query ratio $\eta = h/n'$",
    "radio": r"radio range $\delta/L$",
    "n": r"total nodes $n$",
}


class MalformedCSVError(ValueError):
    pass


def fmt(value: float) -> str:
    return format(value, ".9g")


def csv_text(points: Iterable[CurvePoint]) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for p in points:
        row = (
            p.sweep,
            fmt(p.x),
            fmt(p.ps),
            fmt(p.ps_stderr),
            fmt(p.rho_mean),
            str(p.trials),
            str(p.n),
            fmt(p.delta),
            str(p.epsilon),
            fmt(p.eta),
        )
        out.write(",".join(row) + "\n")
    return out.getvalue()


def write_csv(points: Iterable[CurvePoint], path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(points))
    return path


def read_curve_csv(path: str | Path) -> list[dict]:
    """Parse a sweep CSV back into typed rows."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedCSVError(f"cannot read {path}: {exc.strerror}") from None
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise MalformedCSVError(f"{path}: expected header {','.join(CSV_COLUMNS)}")
    rows = []
    for lineno, raw in enumerate(reader, 2):
        if not raw or all(not c.strip() for c in raw):
            continue
        if len(raw) != len(CSV_COLUMNS):
            raise MalformedCSVError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields, got {len(raw)}")
        rec = dict(zip(CSV_COLUMNS, (c.strip() for c in raw)))
        try:
            row = {
                "sweep": rec["sweep"],
                "x": float(rec["x"]),
                "ps": float(rec["ps"]),
                "ps_stderr": float(rec["ps_stderr"]),
                "rho_mean": float(rec["rho_mean"]),
                "trials": int(rec["trials"]),
                "n": int(rec["n"]),
                "delta": float(rec["delta"]),
                "epsilon": int(rec["epsilon"]),
                "eta": float(rec["eta"]),
            }
        except ValueError as exc:
            raise MalformedCSVError(f"{path}:{lineno}: {exc}") from None
        if row["sweep"] not in AXIS_LABELS:
            raise MalformedCSVError(f"{path}:{lineno}: unknown sweep {row['sweep']!r}")
        rows.append(row)
    if not rows:
        raise MalformedCSVError(f"{path}: no data rows")
    return rows


def series_for(rows: Sequence[dict], sweep: str) -> list[dict]:
    """Group the rows of one sweep into plot series.

    Eta and radio sweeps get one series per node count (and per radio range
    for eta sweeps with several); node-count sweeps get one per radio range.
    """
    groups: dict[tuple, dict] = {}
    for r in rows:
        if r["sweep"] != sweep:
            continue
        if sweep == "eta":
            key = (r["n"], r["delta"], r["epsilon"])
            label = f"n={r['n']}, delta={r['delta']:g}, eps={r['epsilon']}"
        elif sweep == "radio":
            key = (r["n"], r["eta"], r["epsilon"])
            label = f"n={r['n']}, eta={r['eta']:g}, eps={r['epsilon']}"
        else:
            key = (r["delta"], r["eta"], r["epsilon"])
            label = f"delta={r['delta']:g}, eta={r['eta']:g}, eps={r['epsilon']}"
        g = groups.setdefault(key, {"label": label, "x": [], "ps": [], "ps_stderr": [], "rho_mean": []})
        for col in ("x", "ps", "ps_stderr", "rho_mean"):
            g[col].append(r[col])
    return list(groups.values())


_SCRIPT = '''\
#!/usr/bin/env python3
"""Successful decoding probability over {title}.

Generated from {source}.  Run with any Python that has matplotlib; the
figure is written next to this script as {png}.
"""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

XLABEL = {xlabel!r}
SERIES = [
{series}]

fig, (ax_ps, ax_rho) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
for s in SERIES:
    ax_ps.errorbar(s["x"], s["ps"], yerr=s["ps_stderr"], marker="o", ms=4, capsize=3, label=s["label"])
    ax_rho.plot(s["x"], s["rho_mean"], marker="s", ms=4, label=s["label"])
ax_ps.set_xlabel(XLABEL)
ax_ps.set_ylabel("successful decoding probability $P_s$")
ax_rho.set_xlabel(XLABEL)
ax_rho.set_ylabel(r"revealed sensors ratio $\\rho$")
for ax in (ax_ps, ax_rho):
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
ax_ps.legend(fontsize=8)
fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), {png!r}), dpi=150)
'''


def _series_literal(series: Sequence[dict]) -> str:
    lines = []
    for s in series:
        body = ", ".join(f"{k!r}: {_num_list(s[k])}" for k in ("x", "ps", "ps_stderr", "rho_mean"))
        lines.append(f"    # series: {s['label']}\n    {{'label': {s['label']!r}, {body}}},\n")
    return "".join(lines)


def _num_list(values: Sequence[float]) -> str:
    return "[" + ", ".join(fmt(v) for v in values) + "]"


def plot_script(rows: Sequence[dict], sweep: str, source: str = "a sweep CSV") -> str:
    series = series_for(rows, sweep)
    if not series:
        raise MalformedCSVError(f"no rows for sweep {sweep!r}")
    return _SCRIPT.format(
        title={"eta": "query ratio", "radio": "radio range", "n": "node count"}[sweep],
        source=source,
        png=f"plot_{sweep}.png",
        xlabel=AXIS_LABELS[sweep],
        series=_series_literal(series),
    )


def emit_plot_scripts(rows: Sequence[dict], outdir: str | Path, source: str = "a sweep CSV") -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for sweep in dict.fromkeys(r["sweep"] for r in rows):
        path = outdir / f"plot_{sweep}.py"
        path.write_text(plot_script(rows, sweep, source))
        paths.append(path)
    return paths


def render_script(script_path: str | Path) -> Path:
    """Execute an emitted plot script in-process; returns the figure path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    script_path = Path(script_path).resolve()
    code = compile(script_path.read_text(), str(script_path), "exec")
    try:
        exec(code, {"__name__": "__main__", "__file__": str(script_path)})
    finally:
        plt.close("all")
    return script_path.with_suffix(".png")


@dataclass
class RunManifest:
    config: dict
    tool_version: str
    base_seed: int
    outputs: list[str] = field(default_factory=list)
    duration_s: float = 0.0
    config_file: str = "config.cfg"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def read(cls, path: str | Path) -> RunManifest:
        return cls(**json.loads(Path(path).read_text()))
