"""Replicable hypothesis selection via the exponential mechanism and correlated sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .base import check_unit, require_samples
from .constants import CONSTANTS
from .core.hypotheses import Hypothesis
from .core.randomness import SharedRandomness, keys_of, words_for_keys, words_to_uniform

MAX_PAIRS = 1 << 26


def _chunks(n: int):
    """(start, size) pair windows; the first accepted pair does not depend on the chunking."""
    start, size = 0, max(16, min(256, 2 * n))
    while start < MAX_PAIRS:
        yield start, size
        start += size
        size = min(size * 2, 4096)


def _normalize(weights: np.ndarray) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim == 0 or w.shape[-1] == 0:
        raise ValueError("weights must be a nonempty vector")
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and nonnegative")
    total = w.sum(axis=-1, keepdims=True)
    if np.any(total <= 0):
        raise ValueError("weights must not all be zero")
    return w / total


def _accept_chunk(P: np.ndarray, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Candidate indices and acceptance flags for interleaved (u, v) words."""
    n = P.shape[-1]
    u = np.minimum((words_to_uniform(words[..., 0::2]) * n).astype(np.int64), n - 1)
    v = words_to_uniform(words[..., 1::2])
    bound = np.take_along_axis(P, u, axis=-1) if P.ndim == 2 else P[u]
    return u, v < bound


def correlated_sample(weights: Sequence[float], shared: SharedRandomness) -> int:
    """Sample an index with probability proportional to ``weights``.

    Pair k of the shared stream proposes (u_k, v_k) uniform on [n] x [0, 1) and
    the first pair with v_k < P(u_k) wins.  Two callers holding the same stream
    disagree with probability at most 2 TV / (1 + TV).
    """
    P = _normalize(weights)
    stream = shared.substream("corrsamp")
    key = stream.key_array()[None, :]
    for start, size in _chunks(P.size):
        words = words_for_keys(key, 2 * start, 2 * size)[0]
        u, ok = _accept_chunk(P, words)
        hit = np.flatnonzero(ok)
        if hit.size:
            return int(u[hit[0]])
    raise RuntimeError("correlated sampling did not terminate")


def correlated_sample_batch(weights: np.ndarray, streams: Sequence[SharedRandomness]) -> np.ndarray:
    """Vectorized ``correlated_sample`` over many streams; rows of ``weights`` pair with streams."""
    W = np.asarray(weights, dtype=np.float64)
    if W.ndim == 1:
        W = np.broadcast_to(W, (len(streams), W.size))
    P = _normalize(W)
    keys = keys_of([s.substream("corrsamp") for s in streams])
    out = np.full(len(streams), -1, dtype=np.int64)
    active = np.arange(len(streams))
    for start, size in _chunks(P.shape[-1]):
        if active.size == 0:
            return out
        words = words_for_keys(keys[active], 2 * start, 2 * size)
        u, ok = _accept_chunk(np.ascontiguousarray(P[active]), words)
        any_ok = ok.any(axis=1)
        first = ok.argmax(axis=1)
        done = active[any_ok]
        out[done] = u[any_ok, first[any_ok]]
        active = active[~any_ok]
    raise RuntimeError("correlated sampling did not terminate")


def selection_temperature(n: int, alpha: float, beta: float) -> float:
    return 2.0 * math.log(2.0 * n / beta) / alpha


def selection_sample_size(n: int, beta: float, tau: float, c: float | None = None) -> int:
    c = CONSTANTS.c_sel if c is None else c
    return int(math.ceil(c * math.log(max(n, 1) / beta) / tau**2))


def robustness_radius(n: int, alpha: float, beta: float, rho: float) -> float:
    """Largest tau for which the selection is rho-replicable under tau-close hypothesis lists."""
    return rho * alpha / (CONSTANTS.c_rob * math.log(n / beta))


def exponential_weights(errors: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Unnormalized exp(-t err), shifted by min err for numerical range."""
    errors = np.asarray(errors, dtype=np.float64)
    t = selection_temperature(errors.shape[-1], alpha, beta)
    return np.exp(-t * (errors - errors.min(axis=-1, keepdims=True)))


def exponential_tail_mass(errors: np.ndarray, alpha: float, beta: float) -> float:
    """Probability the mechanism puts on indices more than alpha/2 above the minimum."""
    errors = np.asarray(errors, dtype=np.float64)
    P = _normalize(exponential_weights(errors, alpha, beta))
    return float(P[errors > errors.min() + alpha / 2.0].sum())


@dataclass(frozen=True)
class SelectionOutcome:
    index: int
    errors: np.ndarray
    probabilities: np.ndarray
    temperature: float


@dataclass(frozen=True)
class HypothesisSelection:
    """Select among ``n`` candidates with error within alpha of the best, w.p. 1 - beta."""

    alpha: float
    beta: float
    rho: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "rho", "tau"):
            check_unit(name, getattr(self, name), closed_right=True)
        if self.tau > self.alpha:
            raise ValueError("tau must not exceed alpha")

    def sample_need(self, n: int) -> int:
        return selection_sample_size(n, self.beta, self.tau)

    def robust(self, n: int) -> bool:
        return self.tau <= robustness_radius(n, self.alpha, self.beta, self.rho) + 1e-15

    def select(self, hyps: Sequence[Hypothesis], data, shared: SharedRandomness) -> SelectionOutcome:
        n = len(hyps)
        if n == 0:
            raise ValueError("no hypotheses to select from")
        require_samples(data, self.sample_need(n), "HypothesisSelection")
        errors = np.asarray(data.empirical_errors(list(hyps)), dtype=np.float64)
        w = exponential_weights(errors, self.alpha, self.beta)
        idx = correlated_sample(w, shared.substream("hypsel"))
        return SelectionOutcome(idx, errors, _normalize(w), selection_temperature(n, self.alpha, self.beta))


def hypothesis_selection(hyps: Sequence[Hypothesis], data, alpha: float, beta: float, rho: float,
                         tau: float, shared: SharedRandomness) -> int:
    return HypothesisSelection(alpha, beta, rho, tau).select(hyps, data, shared).index
