"""Pointwise-replicable transforms: the averaged predictor and its confidence booster."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import Learner, check_unit, require_samples
from .constants import CONSTANTS
from .core.hypotheses import Aggregate, Draws, LabelingStack
from .core.randomness import SharedRandomness


@dataclass(frozen=True)
class PointwiseParams:
    alpha: float
    beta: float
    rho: float
    c_T: float = CONSTANTS.c_T

    def __post_init__(self) -> None:
        check_unit("alpha", self.alpha, closed_right=True)
        check_unit("beta", self.beta, closed_right=True)
        check_unit("rho", self.rho, closed_right=True)
        if self.c_T <= 0:
            raise ValueError("c_T must be positive")

    @property
    def T(self) -> int:
        return n_blocks(self.rho, self.c_T)


def n_blocks(rho: float, c_T: float | None = None) -> int:
    c_T = CONSTANTS.c_T if c_T is None else c_T
    return max(1, int(math.ceil(c_T / rho**2)))


class BasicPointwise(Learner):
    """Average T base runs on disjoint blocks and threshold the vote at a shared uniform cut."""

    def __init__(self, base: Learner, alpha: float = 0.1, beta: float = 0.1, rho: float = 0.2,
                 c_T: float | None = None):
        self.base = base
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.c_T = c_T

    @property
    def params(self) -> PointwiseParams:
        return PointwiseParams(self.alpha, self.beta, self.rho, CONSTANTS.c_T if self.c_T is None else self.c_T)

    @property
    def T(self) -> int:
        return self.params.T

    def inner(self) -> Learner:
        ab = self.alpha * self.beta / 2.0
        return self.base.with_accuracy(ab, ab)

    def sample_need(self) -> int:
        return self.T * self.inner().sample_need()

    def oracle_calls(self) -> float:
        return self.T * self.inner().oracle_calls()

    def learn(self, data, shared: SharedRandomness) -> Aggregate:
        need = self.sample_need()
        require_samples(data, need, "BasicPointwise")
        inner = self.inner()
        subs = inner.learn_batch(data, self.T, shared.substream("alg1", "block"))
        cut = shared.substream("alg1", "cut").uniform()
        return Aggregate(subs, cut)

    def draw(self, data, count: int, shared: SharedRandomness) -> Draws:
        inner = self.inner()
        if not getattr(inner, "deterministic", False):
            return super().draw(data, count, shared)
        require_samples(data, count * self.sample_need(), "BasicPointwise.draw")
        T = self.T
        cut = shared.substream("alg1", "cut").uniform()
        stack = inner.learn_batch(data, count * T, shared.substream("alg1", "block"))
        if isinstance(stack, LabelingStack):
            if stack.codes is None:
                h = Aggregate(LabelingStack.constant(stack.rows[0], T), cut)
                return Draws.constant(h, count)
            codes = np.asarray(stack.codes).reshape(count, T)
            return Draws.from_list([Aggregate(LabelingStack(stack.rows, c), cut) for c in codes])
        subs = list(stack)
        return Draws.from_list([Aggregate(subs[j * T:(j + 1) * T], cut) for j in range(count)])


def first_within(errors: np.ndarray, slack: float) -> int:
    """Lowest index whose error is at most min(errors) + slack / 2."""
    errors = np.asarray(errors, dtype=np.float64)
    bound = errors.min() + slack / 2.0
    return int(np.flatnonzero(errors <= bound + 1e-12)[0])


class BoostPointwiseError(Learner):
    """Run a replicable learner K times, test on a holdout, keep the first near-best run."""

    def __init__(self, base: Learner, alpha: float = 0.1, beta: float = 0.01, rho: float = 0.2):
        self.base = base
        self.alpha = alpha
        self.beta = beta
        self.rho = rho

    @property
    def K(self) -> int:
        check_unit("beta", self.beta)
        return max(1, int(math.ceil(CONSTANTS.k_boost * math.log(1.0 / self.beta))))

    @property
    def m_test(self) -> int:
        return int(math.ceil(CONSTANTS.c_test * math.log(2 * self.K / self.beta) / self.alpha**2))

    def sample_need(self) -> int:
        return self.K * self.base.sample_need() + self.m_test

    def oracle_calls(self) -> float:
        return self.K * self.base.oracle_calls()

    def runs(self, data, shared: SharedRandomness):
        require_samples(data, self.sample_need(), "BoostPointwiseError")
        nb = self.base.sample_need()
        parts = data.split([nb] * self.K + [self.m_test])
        hyps = [self.base.learn(parts[k], shared.substream("alg2", "run", k)) for k in range(self.K)]
        return hyps, parts[-1].empirical_errors(hyps)

    def learn(self, data, shared: SharedRandomness):
        hyps, errors = self.runs(data, shared)
        return hyps[first_within(errors, self.alpha)]


def pointwise_learner(base: Learner, alpha: float, beta: float, rho: float, c_T: float | None = None) -> BoostPointwiseError:
    """The composed pipeline: an (alpha/2, rho)-accurate averaged predictor, boosted to confidence beta."""
    basic = BasicPointwise(base, alpha=alpha / 2.0, beta=rho, rho=rho, c_T=c_T)
    return BoostPointwiseError(basic, alpha=alpha / 2.0, beta=beta, rho=rho)
