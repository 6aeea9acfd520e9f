"""Proper threshold learning with approximate replicability, and the realizable OPT gate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import Learner, check_unit, require_samples
from .constants import CONSTANTS
from .core.data import InsufficientData
from .core.hypotheses import ConstantMinus, ConstantPlus, Hypothesis, Threshold
from .core.randomness import SharedRandomness
from .core.tasks import FiniteDomain, IntervalDomain
from .learners import erm_finite, erm_threshold, threshold_cut_errors
from .selection import HypothesisSelection

BRUTE_FORCE_MAX_D = 20


def dkw_quantiles(S, K: int, lo: float = 0.0) -> np.ndarray:
    """(lo, x_(m/K), x_(2m/K), ..., x_(m)) with m = |S| rounded down to a multiple of K."""
    if K < 1:
        raise ValueError("K must be positive")
    m = (S.n // K) * K
    if m < K:
        raise InsufficientData(f"need at least K={K} points, got {S.n}")
    step = m // K
    ranks = step * np.arange(1, K + 1, dtype=np.int64)
    return np.concatenate([[float(lo)], S.order_statistics(ranks)])


def n_quantiles(alpha: float) -> int:
    # guard against 3/0.1 = 30.000000000000004
    return max(1, int(math.ceil(3.0 / alpha - 1e-9)))


class ThresholdLearner(Learner):
    """Empirical quantiles as candidates, then robust replicable selection."""

    deterministic = False

    def __init__(self, lo: float = 0.0, hi: float = 1.0, alpha: float = 0.1, beta: float = 0.05,
                 rho: float = 0.3, gamma: float = 0.15):
        self.lo = lo
        self.hi = hi
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.gamma = gamma

    @property
    def domain(self) -> IntervalDomain:
        return IntervalDomain(self.lo, self.hi)

    def _check(self) -> None:
        for name in ("alpha", "beta", "rho", "gamma"):
            check_unit(name, getattr(self, name))
        if self.beta >= self.rho:
            raise ValueError("the threshold learner needs beta < rho")

    @property
    def K(self) -> int:
        return n_quantiles(self.alpha)

    @property
    def tau(self) -> float:
        r = self.rho * self.alpha / (CONSTANTS.c_rob * math.log(self.K / self.beta))
        return min(self.gamma, r) / 2.0

    @property
    def m_quantile(self) -> int:
        return int(math.ceil(CONSTANTS.c_dkw * math.log(1.0 / self.beta) / self.tau**2))

    def selection(self) -> HypothesisSelection:
        return HypothesisSelection(self.alpha / 2, self.beta / 2, self.rho / 3, self.tau)

    def sample_need(self) -> int:
        self._check()
        return self.m_quantile + self.selection().sample_need(self.K + 3)

    def candidates(self, S) -> list[Hypothesis]:
        qs = dkw_quantiles(S, self.K, self.lo)
        return [ConstantMinus(), *(Threshold(float(t)) for t in qs), ConstantPlus()]

    def learn(self, data, shared: SharedRandomness) -> Hypothesis:
        require_samples(data, self.sample_need(), "ThresholdLearner")
        sel = self.selection()
        qpart, spart = data.split([self.m_quantile, sel.sample_need(self.K + 3)])
        cands = self.candidates(qpart)
        return cands[sel.select(cands, spart, shared).index]


# realizable OPT gate


def brute_force_min_error(S, d: int) -> float:
    """Minimum empirical error over all 2^d labelings, by enumeration."""
    if d > BRUTE_FORCE_MAX_D:
        raise ValueError(f"brute force is capped at d={BRUTE_FORCE_MAX_D}")
    pos, neg = S.counts()
    best = None
    chunk = 1 << min(d, 16)
    for start in range(0, 1 << d, chunk):
        codes = np.arange(start, min(start + chunk, 1 << d), dtype=np.int64)
        plus = ((codes[:, None] >> np.arange(d)) & 1).astype(bool)
        errs = np.where(plus, neg[None, :], pos[None, :]).sum(axis=1)
        low = int(errs.min())
        best = low if best is None else min(best, low)
    return best / S.n


def threshold_min_error(S, lo: float, hi: float) -> float:
    data = S.materialize()
    _, errors = threshold_cut_errors(data.x, data.y, lo, hi)
    return float(errors.min()) / data.n


def opt_gate(opt_hat: float, r: float) -> bool:
    """True when the gate passes and the ERM hypothesis is released."""
    return not opt_hat > r


@dataclass(frozen=True)
class GateTrace:
    opt_hat: float
    cut: float
    passed: bool


class RealizableApproxRepl(Learner):
    """Replicably decide whether the data look realizable, then release ERM or a constant."""

    def __init__(self, hclass: str = "threshold", d: int = 1, lo: float = 0.0, hi: float = 1.0,
                 alpha: float = 0.1, beta: float = 0.05, rho: float = 0.2, gamma: float = 0.1):
        self.hclass = hclass
        self.d = d
        self.lo = lo
        self.hi = hi
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.gamma = gamma

    @property
    def domain(self):
        return FiniteDomain(self.d) if self.hclass == "finite" else IntervalDomain(self.lo, self.hi)

    @property
    def d_eff(self) -> int:
        if self.hclass == "finite":
            return int(self.d)
        if self.hclass == "threshold":
            return 1
        raise ValueError(f"unknown class {self.hclass!r}")

    @property
    def radius(self) -> float:
        return max(self.gamma, 4.0 * self.alpha)

    def sample_need(self) -> int:
        for name in ("alpha", "beta", "rho", "gamma"):
            check_unit(name, getattr(self, name))
        if self.hclass == "finite" and self.d > BRUTE_FORCE_MAX_D:
            raise ValueError(f"brute force is capped at d={BRUTE_FORCE_MAX_D}")
        num = CONSTANTS.c_realizable * (self.d_eff + math.log(1.0 / min(self.rho, self.beta)))
        return int(math.ceil(num / (self.rho**2 * min(self.alpha, self.gamma))))

    def learn_with_trace(self, data, shared: SharedRandomness) -> tuple[Hypothesis, GateTrace]:
        need = self.sample_need()
        require_samples(data, need, "RealizableApproxRepl")
        S = data if data.n == need else data.split([need])[0]
        if self.hclass == "finite":
            opt_hat = brute_force_min_error(S, self.d)
        else:
            opt_hat = threshold_min_error(S, self.lo, self.hi)
        r = shared.substream("alg9", "cut").uniform(0.1 * self.alpha, 0.2 * self.alpha)
        passed = opt_gate(opt_hat, r)
        if not passed:
            h: Hypothesis = ConstantPlus()
        elif self.hclass == "finite":
            h = erm_finite(S, self.d)
        else:
            h = erm_threshold(S, self.lo, self.hi)
        return h, GateTrace(opt_hat, r, passed)

    def learn(self, data, shared: SharedRandomness) -> Hypothesis:
        return self.learn_with_trace(data, shared)[0]
