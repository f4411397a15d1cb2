"""Monte Carlo sweeps over query ratio, radio range and node count.

Every trial is a pure function of its seed.  Trial seeds are
``base_seed + trial * SEED_STRIDE + point``, where ``point`` numbers the
(n, delta) combinations of a sweep; within one trial of an eta sweep all
query ratios share the same deployment, buffers and query permutation, so
the query sets are nested.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dsasim.collector import TrialMetrics, evaluate_nested, select_query
from dsasim.config import ExperimentConfig
from dsasim.deployment import RadioParams, Region, deploy
from dsasim.protocol import run_dissemination

SEED_STRIDE = 0x9E3779B97F4A7C15
THREADS_ENV = "DSA_SIM_THREADS"


def trial_seed(base_seed: int, trial: int, point: int) -> int:
    if not 0 <= point < SEED_STRIDE:
        raise ValueError("point index out of range")
    return base_seed + trial * SEED_STRIDE + point


def stage_seeds(seed: int) -> tuple[int, int, int]:
    """Independent 64-bit seeds for deployment, dissemination and querying."""
    words = np.random.SeedSequence(seed).generate_state(3, np.uint64)
    return int(words[0]), int(words[1]), int(words[2])


@dataclass(frozen=True)
class TrialTask:
    n: int
    storage_fraction: float
    L: float
    delta: float
    epsilon: int
    payload_bits: int
    etas: tuple[float, ...]
    seed: int
    overflow: str = "random"


def run_trial(task: TrialTask) -> list[TrialMetrics]:
    """One deployment, one dissemination, nested queries at every eta."""
    deploy_seed, dissem_seed, query_seed = stage_seeds(task.seed)
    d = deploy(task.n, task.storage_fraction, Region(task.L), deploy_seed)
    state = run_dissemination(
        d, RadioParams(task.delta), task.epsilon, task.payload_bits, dissem_seed, overflow=task.overflow
    )
    plans = [select_query(d.n_storage, eta, query_seed) for eta in task.etas]
    return evaluate_nested(state, plans)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be non-negative, got {n}")
    return n or (os.cpu_count() or 1)


def run_tasks(tasks: Sequence[TrialTask], workers: int | None = None) -> list[list[TrialMetrics]]:
    """Run trials, possibly in worker processes; results stay in task order."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) < 2:
        return [run_trial(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_trial, tasks, chunksize=chunk))


@dataclass(frozen=True)
class CurvePoint:
    sweep: str
    x: float
    ps: float
    ps_stderr: float
    rho_mean: float
    rho_stderr: float
    trials: int
    n: int
    delta: float
    epsilon: int
    eta: float


def aggregate(
    metrics: Sequence[TrialMetrics], *, sweep: str, x: float, n: int, delta: float, epsilon: int, eta: float
) -> CurvePoint:
    t = len(metrics)
    ps = sum(m.all_recovered for m in metrics) / t
    rhos = np.array([m.rho for m in metrics])
    rho_se = float(rhos.std(ddof=1) / math.sqrt(t)) if t > 1 else 0.0
    return CurvePoint(
        sweep=sweep,
        x=x,
        ps=ps,
        ps_stderr=math.sqrt(ps * (1.0 - ps) / t),
        rho_mean=float(rhos.mean()),
        rho_stderr=rho_se,
        trials=t,
        n=n,
        delta=delta,
        epsilon=epsilon,
        eta=eta,
    )


def trial_matrix(
    config: ExperimentConfig,
    n: int,
    delta: float,
    etas: Sequence[float],
    point: int = 0,
    workers: int | None = None,
) -> list[list[TrialMetrics]]:
    """``config.trials`` rows of metrics, one column per eta."""
    tasks = [
        TrialTask(
            n,
            config.storage_fraction,
            config.L,
            delta,
            config.epsilon,
            config.payload_bits,
            tuple(etas),
            trial_seed(config.base_seed, t, point),
            config.overflow,
        )
        for t in range(config.trials)
    ]
    return run_tasks(tasks, workers)


def run_point(
    config: ExperimentConfig,
    n: int,
    delta: float,
    eta: float,
    point: int = 0,
    *,
    sweep: str = "point",
    x: float | None = None,
    workers: int | None = None,
) -> CurvePoint:
    rows = trial_matrix(config, n, delta, [eta], point, workers)
    return aggregate(
        [r[0] for r in rows],
        sweep=sweep,
        x=eta if x is None else x,
        n=n,
        delta=delta,
        epsilon=config.epsilon,
        eta=eta,
    )


def sweep_eta(config: ExperimentConfig, workers: int | None = None) -> list[CurvePoint]:
    points = []
    curve = 0
    for n in config.n_list:
        for delta in config.delta_list:
            rows = trial_matrix(config, n, delta, config.eta_grid, curve, workers)
            for col, eta in enumerate(config.eta_grid):
                points.append(
                    aggregate(
                        [r[col] for r in rows],
                        sweep="eta",
                        x=eta,
                        n=n,
                        delta=delta,
                        epsilon=config.epsilon,
                        eta=eta,
                    )
                )
            curve += 1
    return points


def sweep_radio(config: ExperimentConfig, workers: int | None = None) -> list[CurvePoint]:
    points = []
    point = 0
    for n in config.n_list:
        for delta in config.delta_list:
            points.append(
                run_point(config, n, delta, config.eta, point, sweep="radio", x=delta / config.L, workers=workers)
            )
            point += 1
    return points


def sweep_n(config: ExperimentConfig, workers: int | None = None) -> list[CurvePoint]:
    points = []
    point = 0
    for delta in config.delta_list:
        for n in config.n_list:
            points.append(run_point(config, n, delta, config.eta, point, sweep="n", x=float(n), workers=workers))
            point += 1
    return points


SWEEP_FUNCTIONS = {"eta": sweep_eta, "radio": sweep_radio, "n": sweep_n}


def run_sweep(config: ExperimentConfig, workers: int | None = None) -> list[CurvePoint]:
    return SWEEP_FUNCTIONS[config.sweep](config, workers)
