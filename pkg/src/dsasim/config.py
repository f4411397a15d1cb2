"""Experiment configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from dsasim.protocol import OVERFLOW_POLICIES

SWEEPS = ("eta", "radio", "n")


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


def _default_eta_grid() -> tuple[float, ...]:
    return (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep's worth of parameters.

    ``delta_ratio_list``, when given, replaces ``delta_list`` with
    ``ratio * L`` values.  ``eta`` is the fixed query ratio used by the radio
    and node-count sweeps; the eta sweep walks ``eta_grid`` instead.
    """

    L: float = 100.0
    n_list: tuple[int, ...] = (250, 500, 1000, 1500)
    storage_fraction: float = 0.2
    delta_list: tuple[float, ...] = (10.0,)
    epsilon: int = 160
    payload_bits: int = 64
    eta_grid: tuple[float, ...] = field(default_factory=_default_eta_grid)
    trials: int = 200
    base_seed: int = 1
    sweep: str = "eta"
    eta: float = 0.3
    delta_ratio_list: tuple[float, ...] | None = None
    overflow: str = "random"

    def __post_init__(self):
        if self.delta_ratio_list is not None:
            object.__setattr__(self, "delta_list", tuple(r * self.L for r in self.delta_ratio_list))
        self.validate()

    def validate(self) -> None:
        def bad(key, why):
            raise ConfigError(f"{key}: {why}", key)

        if not self.L > 0:
            bad("L", "must be positive")
        if not self.n_list:
            bad("n_list", "must not be empty")
        if any(n < 2 for n in self.n_list):
            bad("n_list", "every n must be at least 2")
        if not 0.0 < self.storage_fraction < 1.0:
            bad("storage_fraction", "must lie in (0, 1)")
        for n in self.n_list:
            s = int(n * self.storage_fraction)
            if s < 1 or n - s < 1:
                bad("storage_fraction", f"n={n} leaves no sensors or no storage nodes")
        if not self.delta_list:
            bad("delta_list", "must not be empty")
        if any(not d > 0 for d in self.delta_list):
            bad("delta_ratio_list" if self.delta_ratio_list is not None else "delta_list", "values must be positive")
        if self.epsilon < 1:
            bad("epsilon", "must be at least 1")
        if self.payload_bits < 1:
            bad("payload_bits", "must be at least 1")
        if not self.eta_grid:
            bad("eta_grid", "must not be empty")
        if any(not 0.0 < e <= 1.0 for e in self.eta_grid):
            bad("eta_grid", "values must lie in (0, 1]")
        if not 0.0 < self.eta <= 1.0:
            bad("eta", "must lie in (0, 1]")
        if self.trials < 1:
            bad("trials", "must be at least 1")
        if self.base_seed < 0:
            bad("base_seed", "must be non-negative")
        if self.sweep not in SWEEPS:
            bad("sweep", f"must be one of {', '.join(SWEEPS)}")
        if self.overflow not in OVERFLOW_POLICIES:
            bad("overflow", f"must be one of {', '.join(OVERFLOW_POLICIES)}")

    def replace(self, **changes) -> ExperimentConfig:
        if "delta_list" in changes and "delta_ratio_list" not in changes:
            changes["delta_ratio_list"] = None
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "delta_ratio_list":
                # already folded into delta_list
                continue
            lines.append(f"{f.name} = {_format(value)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("delta_ratio_list")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def _format(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_format(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _split(raw: str) -> list[str]:
    return [t for t in raw.replace(",", " ").split() if t]


def _int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        f = float(raw)
        if not f.is_integer():
            raise ValueError(f"{raw!r} is not an integer") from None
        return int(f)


_PARSERS = {
    "L": float,
    "n_list": lambda raw: tuple(_int(t) for t in _split(raw)),
    "storage_fraction": float,
    "delta_list": lambda raw: tuple(float(t) for t in _split(raw)),
    "delta_ratio_list": lambda raw: tuple(float(t) for t in _split(raw)),
    "epsilon": _int,
    "payload_bits": _int,
    "eta_grid": lambda raw: tuple(float(t) for t in _split(raw)),
    "trials": _int,
    "base_seed": _int,
    "sweep": str.strip,
    "eta": float,
    "overflow": str.strip,
}

KEYS = tuple(_PARSERS)


def parse_value(key: str, raw: str):
    if key not in _PARSERS:
        raise ConfigError(f"unknown key {key!r}", key)
    try:
        return _PARSERS[key](raw.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw.strip()!r} ({exc})", key) from None


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.  Later keys win,
    and ``overrides`` (raw strings) win over the file."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = parse_value(key, raw)
    for key, raw in (overrides or {}).items():
        values[key] = parse_value(key, raw)
        if key == "delta_list":
            values.pop("delta_ratio_list", None)
        elif key == "delta_ratio_list":
            values.pop("delta_list", None)
    if "delta_list" in values and "delta_ratio_list" in values:
        raise ConfigError("give only one of delta_list and delta_ratio_list", "delta_ratio_list")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, overrides)
