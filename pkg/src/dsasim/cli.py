"""Command-line front end.

    dsasim simulate CONFIG [--seed N] [--trials N] [--set KEY=VALUE ...] [--out DIR] [--figures]
    dsasim analyze --n N --k K --delta D --L L --epsilon E [--x X --y Y | --a A]
    dsasim emit-plots CSV [--out DIR] [--render]
    dsasim dump [--n N] [--delta D] [--epsilon E] [--seed S] [--out FILE]
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from dsasim import __version__, analysis
from dsasim.config import ConfigError, ExperimentConfig, load_config, parse_config
from dsasim.deployment import InvalidFractionError, Position, RadioParams, Region, deploy
from dsasim.harness import run_sweep
from dsasim.protocol import run_dissemination
from dsasim.report import (
    MalformedCSVError,
    RunManifest,
    emit_plot_scripts,
    read_curve_csv,
    render_script,
    write_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _err(msg: str) -> None:
    print(f"dsasim: {msg}", file=sys.stderr)


def _parse_overrides(pairs) -> dict[str, str]:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--set expects KEY=VALUE, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value
    return out


def _config_from_manifest(path: Path) -> ExperimentConfig:
    try:
        manifest = RunManifest.read(path)
    except (OSError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in manifest.config.items()}
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"manifest {path}: {exc}") from None


def cmd_simulate(args) -> int:
    try:
        overrides = _parse_overrides(args.set)
        if args.seed is not None:
            overrides["base_seed"] = str(args.seed)
        if args.trials is not None:
            overrides["trials"] = str(args.trials)
        path = Path(args.config)
        if path.suffix == ".json":
            config = _config_from_manifest(path)
            if overrides:
                config = parse_config(config.to_text(), overrides)
        else:
            config = load_config(path, overrides)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG

    outdir = Path(args.out)
    started = time.perf_counter()
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        points = run_sweep(config)
        csv_path = write_csv(points, outdir / f"{config.sweep}.csv")
        (outdir / "config.cfg").write_text(config.to_text())
        outputs = [csv_path.name, "config.cfg"]
        if args.figures:
            for script in emit_plot_scripts(read_curve_csv(csv_path), outdir, source=csv_path.name):
                outputs += [script.name, render_script(script).name]
        RunManifest(
            config=config.to_dict(),
            tool_version=__version__,
            base_seed=config.base_seed,
            outputs=outputs,
            duration_s=round(time.perf_counter() - started, 3),
        ).write(outdir / "manifest.json")
    except Exception as exc:  # noqa: BLE001 - any failure of the run itself
        _err(f"run failed: {type(exc).__name__}: {exc}")
        return EXIT_RUNTIME
    print(csv_path)
    return EXIT_OK


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return format(value, ".6g")


def cmd_analyze(args) -> int:
    try:
        if args.a is not None and (args.x is not None or args.y is not None):
            raise ValueError("give either --a or a position (--x/--y), not both")
        if args.a is not None:
            params = analysis.AnalyticalParams(args.n, args.k, args.delta, args.L, args.epsilon, args.a)
        else:
            x = args.L / 2 if args.x is None else args.x
            y = args.L / 2 if args.y is None else args.y
            if not Region(args.L).contains(Position(x, y)):
                raise ValueError(f"position ({x}, {y}) lies outside the region")
            params = analysis.AnalyticalParams.at_position(
                args.n, args.k, args.delta, args.L, args.epsilon, Position(x, y)
            )
    except ValueError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    for key, value in analysis.summary(params).items():
        print(f"{key}={_fmt_value(value)}")
    return EXIT_OK


def cmd_emit_plots(args) -> int:
    csv_path = Path(args.csv)
    try:
        rows = read_curve_csv(csv_path)
    except MalformedCSVError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    outdir = Path(args.out) if args.out else csv_path.parent
    try:
        for script in emit_plot_scripts(rows, outdir, source=csv_path.name):
            print(script)
            if args.render:
                print(render_script(script))
    except Exception as exc:  # noqa: BLE001
        _err(f"plotting failed: {type(exc).__name__}: {exc}")
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_dump(args) -> int:
    try:
        d = deploy(args.n, args.storage_fraction, Region(args.L), args.seed)
        state = run_dissemination(d, RadioParams(args.delta), args.epsilon, args.payload_bits, args.seed)
    except (ValueError, InvalidFractionError) as exc:
        _err(str(exc))
        return EXIT_CONFIG
    text = json.dumps(state.to_dict(), indent=1) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsasim", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"dsasim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a sweep from a key=value config file (or a run manifest)")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="override base_seed")
    p.add_argument("--trials", type=int, help="override trials per point")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    p.add_argument("--out", default="dsasim-run", help="output directory (default: %(default)s)")
    p.add_argument("--figures", action="store_true", help="also write plot scripts and PNG figures")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="evaluate the closed-form coverage and buffer probabilities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--L", type=float, default=100.0)
    p.add_argument("--epsilon", type=int, required=True)
    p.add_argument("--x", type=float, help="storage node x (default: region centre)")
    p.add_argument("--y", type=float, help="storage node y (default: region centre)")
    p.add_argument("--a", type=float, help="radio area outside the region, instead of a position")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("emit-plots", help="write one plot script per sweep found in a CSV")
    p.add_argument("csv")
    p.add_argument("--out", help="output directory (default: next to the CSV)")
    p.add_argument("--render", action="store_true", help="run the scripts to produce PNG figures")
    p.set_defaults(func=cmd_emit_plots)

    p = sub.add_parser("dump", help="run one dissemination and print its network state as JSON")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--storage-fraction", type=float, default=0.2)
    p.add_argument("--L", type=float, default=100.0)
    p.add_argument("--delta", type=float, default=20.0)
    p.add_argument("--epsilon", type=int, default=10)
    p.add_argument("--payload-bits", type=int, default=64)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
