"""Paired-trial Monte Carlo harness.

Trial ``t`` of an experiment seeded with ``root_seed`` uses the shared string
``("r", t)`` and the two independent samples ``("data", t, 1)`` and
``("data", t, 2)``.  Each trial reduces to integer counters and a few floats;
they are combined in trial order, so results do not depend on how trials were
scheduled across workers.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np
from sklearn.base import clone

from .base import Learner
from .core.data import DrawnSample
from .core.metrics import classification_distance, excess_error, opt_error
from .core.randomness import SharedRandomness

Z95 = 1.959963984540054
QUANTITIES = frozenset({"pointwise", "approx_distance", "exact_equality", "excess_error"})
MIN_TRIALS = 100


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= successes <= n:
        raise ValueError("successes must lie in [0, n]")
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return lo, hi


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


@dataclass(frozen=True)
class Estimate:
    successes: int
    n: int

    @property
    def value(self) -> float:
        return self.successes / self.n

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.n)

    @property
    def se(self) -> float:
        return binomial_se(self.value, self.n)


@dataclass(frozen=True)
class PairedTrialConfig:
    """What to run and what to measure.

    ``task`` is a fixed task, or ``task_sampler(stream)`` draws one per trial
    from the ``("task", t)`` substream (both runs of a trial see the same task).
    """

    learner: Learner
    task: Any = None
    n_trials: int = 200
    root_seed: int = 0
    measure: frozenset = frozenset({"exact_equality"})
    points: tuple = ()
    gamma: float | None = None
    alpha: float | None = None
    task_sampler: Callable | None = None
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "measure", frozenset(self.measure))
        bad = self.measure - QUANTITIES
        if bad:
            raise ValueError(f"unknown quantities {sorted(bad)}")
        if self.n_trials < MIN_TRIALS:
            raise ValueError(f"n_trials must be at least {MIN_TRIALS}")
        if (self.task is None) == (self.task_sampler is None):
            raise ValueError("give exactly one of task and task_sampler")
        if "pointwise" in self.measure and not self.points:
            raise ValueError("pointwise measurement needs tracked points")
        if "approx_distance" in self.measure and self.gamma is None:
            raise ValueError("approx_distance needs gamma")
        if "excess_error" in self.measure and self.alpha is None:
            raise ValueError("excess_error needs alpha")

    def task_for(self, t: int):
        if self.task is not None:
            return self.task
        return self.task_sampler(SharedRandomness(self.root_seed).substream("task", t))


class TrialError(RuntimeError):
    """A learner failure, tagged with the trial it happened in."""

    def __init__(self, trial: int, cause: BaseException):
        super().__init__(f"trial {trial}: {type(cause).__name__}: {cause}")
        self.trial = trial
        self.cause = cause

    def __reduce__(self):
        return (TrialError, (self.trial, self.cause))


@dataclass(frozen=True)
class TrialRecord:
    index: int
    disagree: tuple
    distance: float | None
    equal: bool
    excess: tuple
    samples: int
    shared_samples: int


def run_trial(config: PairedTrialConfig, t: int) -> TrialRecord:
    root = SharedRandomness(config.root_seed)
    task = config.task_for(t)
    learner = config.learner
    need = learner.sample_need()
    r = root.substream("r", t)
    try:
        h1 = learner.learn(DrawnSample(task, need, root.substream("data", t, 1)), r)
        h2 = learner.learn(DrawnSample(task, need, root.substream("data", t, 2)), r)
    except Exception as exc:
        raise TrialError(t, exc) from exc
    pts = np.asarray(config.points)
    disagree = tuple(bool(v) for v in (h1.predict(pts) != h2.predict(pts))) if pts.size else ()
    dist = classification_distance(task, h1, h2) if "approx_distance" in config.measure else None
    excess = (excess_error(task, h1), excess_error(task, h2)) if "excess_error" in config.measure else ()
    shared = int(getattr(learner, "m_u", 0) or 0)
    return TrialRecord(t, disagree, dist, h1 == h2, excess, 2 * need, shared)


def _run_chunk(args) -> list:
    fn, payload, indices = args
    return [fn(payload, t) for t in indices]


def map_trials(fn: Callable, payload: Any, n: int, workers: int = 1, chunk: int | None = None) -> list:
    """``[fn(payload, t) for t in range(n)]``, optionally across processes, in trial order."""
    workers = max(1, int(workers))
    if workers == 1 or n < 2:
        return [fn(payload, t) for t in range(n)]
    chunk = chunk or max(1, math.ceil(n / (4 * workers)))
    jobs = [(fn, payload, range(s, min(n, s + chunk))) for s in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, jobs))
    return [rec for part in parts for rec in part]


@dataclass
class ReplicabilityReport:
    label: str
    n_trials: int
    seed: int
    estimates: dict = field(default_factory=dict)
    excess_values: tuple = ()
    samples_labeled: int = 0
    samples_shared: int = 0
    opt: float | None = None

    def value(self, name: str) -> float | None:
        est = self.estimates.get(name)
        return None if est is None else est.value

    @property
    def pointwise_max(self) -> Estimate | None:
        pts = [e for k, e in self.estimates.items() if k.startswith("pointwise@")]
        return max(pts, key=lambda e: e.successes) if pts else None

    def excess_quantile(self, q: float) -> float | None:
        if not self.excess_values:
            return None
        return float(np.quantile(np.asarray(self.excess_values), q, method="inverted_cdf"))


def summarize(config: PairedTrialConfig, records: Sequence[TrialRecord]) -> ReplicabilityReport:
    n = len(records)
    rep = ReplicabilityReport(config.label, n, config.root_seed)
    rep.samples_labeled = sum(rec.samples for rec in records)
    rep.samples_shared = sum(rec.shared_samples for rec in records)
    if "pointwise" in config.measure:
        for i, x in enumerate(config.points):
            rep.estimates[f"pointwise@{x}"] = Estimate(sum(rec.disagree[i] for rec in records), n)
    if "exact_equality" in config.measure:
        rep.estimates["exact_repl"] = Estimate(sum(rec.equal for rec in records), n)
    if "approx_distance" in config.measure:
        close = sum(rec.distance <= config.gamma for rec in records)
        rep.estimates["approx_repl"] = Estimate(close, n)
        rep.estimates["distance_exceeds"] = Estimate(n - close, n)
    if "excess_error" in config.measure:
        rep.estimates["excess_exceeds"] = Estimate(sum(rec.excess[0] > config.alpha for rec in records), n)
        rep.excess_values = tuple(v for rec in records for v in rec.excess)
    if config.task is not None:
        rep.opt = opt_error(config.task)
    return rep


def run_paired(config: PairedTrialConfig, workers: int = 1) -> ReplicabilityReport:
    records = map_trials(run_trial, config, config.n_trials, workers)
    return summarize(config, records)


def cell_seed(root_seed: int, index: int) -> int:
    return SharedRandomness(root_seed).substream("cell", index).key[0]


def _apply(config: PairedTrialConfig, settings: dict) -> PairedTrialConfig:
    learner_keys = {k: v for k, v in settings.items() if k in config.learner.get_params(deep=True)}
    other = {k: v for k, v in settings.items() if k not in learner_keys}
    learner = clone(config.learner).set_params(**learner_keys) if learner_keys else config.learner
    return replace(config, learner=learner, **other)


def grid_cells(base: PairedTrialConfig, axes: dict) -> list[tuple[dict, PairedTrialConfig]]:
    if not axes or any(len(v) == 0 for v in axes.values()):
        raise ValueError("grid axes must be nonempty")
    names = list(axes)
    cells = []
    for i, combo in enumerate(itertools.product(*(axes[k] for k in names))):
        settings = dict(zip(names, combo))
        cfg = _apply(base, settings)
        cells.append((settings, replace(cfg, root_seed=cell_seed(base.root_seed, i))))
    return cells


def run_grid(base: PairedTrialConfig, axes: dict, workers: int = 1) -> list[ReplicabilityReport]:
    return [run_paired(cfg, workers) for _, cfg in grid_cells(base, axes)]


def default_workers() -> int:
    return os.cpu_count() or 1
