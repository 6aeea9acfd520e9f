"""Exact error, optimum and classification distance on the synthetic tasks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hypotheses import Hypothesis
from .tasks import FiniteLabeledDistribution, ThresholdTask


@dataclass(frozen=True)
class RealPartition:
    """Cells of the support interval on which a set of hypotheses is constant."""

    edges: np.ndarray
    reps: np.ndarray
    masses: np.ndarray
    truth: np.ndarray

    def labels(self, h: Hypothesis) -> np.ndarray:
        return h.predict(self.reps)


def real_partition(task: ThresholdTask, hyps: Sequence[Hypothesis] = (), extra: Sequence[float] = ()) -> RealPartition:
    lo, hi = task.lo, task.hi
    pts = [np.array([lo, hi, task.true_threshold]), np.asarray(extra, dtype=float)]
    for h in hyps:
        try:
            pts.append(h.breakpoints())
        except TypeError as exc:
            raise ValueError(f"{h.kind} hypothesis is not defined on a real-line task") from exc
    edges = np.unique(np.clip(np.concatenate(pts), lo, hi))
    reps = 0.5 * (edges[:-1] + edges[1:])
    masses = np.diff(task.cdf(edges))
    truth = np.where(reps > task.true_threshold, 1, -1).astype(np.int8)
    return RealPartition(edges, reps, masses, truth)


def _finite_labels(task: FiniteLabeledDistribution, h: Hypothesis) -> np.ndarray:
    try:
        return h.labels_on(task.d)
    except TypeError as exc:
        raise ValueError(f"{h.kind} hypothesis is not defined on a finite task") from exc


def true_error(task, h: Hypothesis) -> float:
    if isinstance(task, FiniteLabeledDistribution):
        lab = _finite_labels(task, h)
        p, w = task.biases, task.marginal
        return float(np.sum(w * np.where(lab == -1, (1 + p) / 2, (1 - p) / 2)))
    if isinstance(task, ThresholdTask):
        part = real_partition(task, [h])
        agree = part.labels(h) == part.truth
        eta = task.noise
        return float(np.sum(part.masses * np.where(agree, eta, 1.0 - eta)))
    raise TypeError(f"unsupported task {type(task).__name__}")


def opt_error(task) -> float:
    if isinstance(task, FiniteLabeledDistribution):
        return float(np.sum(task.marginal * (1 - np.abs(task.biases)) / 2))
    if isinstance(task, ThresholdTask):
        return float(task.noise)
    raise TypeError(f"unsupported task {type(task).__name__}")


def excess_error(task, h: Hypothesis) -> float:
    return true_error(task, h) - opt_error(task)


def classification_distance(task, h1: Hypothesis, h2: Hypothesis) -> float:
    if h1 == h2:
        return 0.0
    if isinstance(task, FiniteLabeledDistribution):
        diff = _finite_labels(task, h1) != _finite_labels(task, h2)
        return float(np.sum(task.marginal[diff]))
    if isinstance(task, ThresholdTask):
        part = real_partition(task, [h1, h2])
        return float(np.sum(part.masses[part.labels(h1) != part.labels(h2)]))
    raise TypeError(f"unsupported task {type(task).__name__}")


def distance_matrix(task, hyps: Sequence[Hypothesis]) -> np.ndarray:
    """Pairwise exact classification distances."""
    if isinstance(task, FiniteLabeledDistribution):
        lab = np.stack([_finite_labels(task, h) for h in hyps])
        cell_mass = task.marginal
    else:
        part = real_partition(task, hyps)
        lab = np.stack([part.labels(h) for h in hyps])
        cell_mass = part.masses
    return label_distance_matrix(lab, cell_mass)


def label_distance_matrix(lab: np.ndarray, cell_weight: np.ndarray) -> np.ndarray:
    plus = (lab == 1).astype(np.float64)
    w = np.asarray(cell_weight, dtype=np.float64)
    total = w.sum()
    pw = plus @ w
    both = (plus * w) @ plus.T
    # mass where exactly one of the pair votes +1
    out = pw[:, None] + pw[None, :] - 2.0 * both
    np.fill_diagonal(out, 0.0)
    return np.clip(out, 0.0, total)


def empirical_error(S, h: Hypothesis) -> float:
    return float(S.empirical_errors([h])[0])


def empirical_distance(S, h1: Hypothesis, h2: Hypothesis) -> float:
    return float(S.distance_matrix([h1, h2])[0, 1])
