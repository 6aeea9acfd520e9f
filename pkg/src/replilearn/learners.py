"""Non-replicable base learners: empirical risk minimization."""

from __future__ import annotations

import math

import numpy as np

from .base import Learner, check_unit, require_samples
from .constants import CONSTANTS
from .core.data import InsufficientData
from .core.hypotheses import ConstantMinus, ConstantPlus, FiniteLabeling, Hypothesis, Threshold
from .core.randomness import SharedRandomness
from .core.tasks import FiniteDomain, IntervalDomain


def sample_need_agnostic(d: int, alpha: float, beta: float, c: float | None = None) -> int:
    """ceil(C (d + ln 1/beta) / alpha^2)."""
    check_unit("alpha", alpha, closed_right=True)
    check_unit("beta", beta, closed_right=True)
    c = CONSTANTS.agnostic if c is None else c
    return int(math.ceil(c * (d + math.log(1.0 / beta)) / alpha**2))


def erm_finite(S, d: int) -> FiniteLabeling:
    """Per-point majority; ties and unseen points get +1."""
    pos, neg = S.counts()
    if pos.size != d:
        raise ValueError("sample domain does not match d")
    return FiniteLabeling(np.where(pos >= neg, 1, -1))


def threshold_cut_errors(x: np.ndarray, y: np.ndarray, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Candidate cuts (lo, midpoints of distinct values, hi) and their error counts."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    vals, start = np.unique(xs, return_index=True)
    pos_per = np.add.reduceat((ys == 1).astype(np.int64), start)
    neg_per = np.add.reduceat((ys == -1).astype(np.int64), start)
    pos_le = np.concatenate([[0], np.cumsum(pos_per)])
    neg_le = np.concatenate([[0], np.cumsum(neg_per)])
    errors = pos_le + (neg_le[-1] - neg_le)
    cuts = np.concatenate([[lo], 0.5 * (vals[:-1] + vals[1:]), [hi]])
    return cuts, errors


def erm_threshold(S, lo: float = 0.0, hi: float = 1.0) -> Threshold:
    """Cut-scan ERM over thresholds x -> +1 iff x > t; ties go to the smallest t."""
    data = S.materialize()
    if data.n == 0:
        raise InsufficientData("threshold ERM needs at least one point")
    cuts, errors = threshold_cut_errors(data.x, data.y, lo, hi)
    return Threshold(cuts[int(np.argmin(errors))])


class ERMFinite(Learner):
    """Majority vote per point on a d-point domain."""

    deterministic = True

    def __init__(self, d: int = 4, alpha: float = 0.1, beta: float = 0.1, m: int | None = None):
        self.d = d
        self.alpha = alpha
        self.beta = beta
        self.m = m

    @property
    def domain(self) -> FiniteDomain:
        return FiniteDomain(self.d)

    def sample_need(self) -> int:
        if self.m is not None:
            return int(self.m)
        return sample_need_agnostic(self.d, self.alpha, self.beta)

    def learn(self, data, shared: SharedRandomness | None = None) -> FiniteLabeling:
        need = self.sample_need()
        require_samples(data, need, "ERMFinite")
        part = data if len(data) == need else data.split([need])[0]
        return erm_finite(part, self.d)

    def learn_batch(self, data, k: int, shared: SharedRandomness | None = None):
        return data.block_signs(k, self.sample_need()).labels()

    def draw(self, data, count: int, shared: SharedRandomness | None = None):
        from .core.hypotheses import Draws

        stack = self.learn_batch(data, count, shared)
        if stack.codes is None:
            return Draws.constant(FiniteLabeling(stack.rows[0]), count)
        return Draws.from_indices([FiniteLabeling(r) for r in stack.rows], np.asarray(stack.codes))


class ERMThreshold(Learner):
    """Proper ERM over thresholds on [lo, hi]."""

    deterministic = True

    def __init__(self, lo: float = 0.0, hi: float = 1.0, alpha: float = 0.1, beta: float = 0.1, m: int | None = None):
        self.lo = lo
        self.hi = hi
        self.alpha = alpha
        self.beta = beta
        self.m = m

    @property
    def domain(self) -> IntervalDomain:
        return IntervalDomain(self.lo, self.hi)

    def sample_need(self) -> int:
        if self.m is not None:
            return int(self.m)
        return sample_need_agnostic(1, self.alpha, self.beta)

    def learn(self, data, shared: SharedRandomness | None = None) -> Threshold:
        need = self.sample_need()
        require_samples(data, need, "ERMThreshold")
        part = data if len(data) == need else data.split([need])[0]
        return erm_threshold(part, self.lo, self.hi)


class ConstantLearner(Learner):
    """Ignores its data and always outputs the same constant."""

    deterministic = True

    def __init__(self, label: int = 1, d: int | None = None, alpha: float = 0.1, beta: float = 0.1):
        self.label = label
        self.d = d
        self.alpha = alpha
        self.beta = beta

    @property
    def domain(self):
        return FiniteDomain(self.d) if self.d is not None else IntervalDomain(0.0, 1.0)

    def sample_need(self) -> int:
        return 0

    def learn(self, data=None, shared: SharedRandomness | None = None) -> Hypothesis:
        return ConstantPlus() if self.label > 0 else ConstantMinus()

    def learn_batch(self, data, k: int, shared: SharedRandomness | None = None):
        return [self.learn()] * k

    def draw(self, data, count: int, shared: SharedRandomness | None = None):
        from .core.hypotheses import Draws

        return Draws.constant(self.learn(), count)
