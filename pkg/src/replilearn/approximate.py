"""Approximate replicability: error boosting, stable-string testing, cluster detection,
replicability boosting and the two composed learners."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .base import Learner, check_unit, require_samples
from .constants import CONSTANTS
from .core.hypotheses import Draws, Hypothesis, PairTable
from .core.randomness import SharedRandomness
from .pointwise import BasicPointwise
from .selection import HypothesisSelection


@dataclass(frozen=True)
class ClusterParams:
    v: float
    gamma: float
    eps: float
    beta: float

    def __post_init__(self) -> None:
        check_unit("gamma", self.gamma, closed_right=True)
        check_unit("eps", self.eps)
        check_unit("beta", self.beta)
        if not (0.0 < self.v - 2 * self.eps and self.v + 2 * self.eps < 1.0):
            raise ValueError("need v - 2 eps > 0 and v + 2 eps < 1")


# hypothesis samplers


class LearnerSampler:
    """Draws A(S; r) for a fixed string r, each on a fresh block of the data it is handed."""

    def __init__(self, learner: Learner, string: SharedRandomness):
        self.learner = learner
        self.string = string

    def need(self, count: int) -> int:
        return count * self.learner.sample_need()

    def draw(self, data, count: int, tag: tuple = ()) -> Draws:
        return self.learner.draw(data, count, self.string)


class FiniteSupportSampler:
    """I.i.d. draws from an explicit distribution over hypotheses; uses no data."""

    def __init__(self, hyps: Sequence[Hypothesis], probs: Sequence[float], stream: SharedRandomness):
        self.hyps = tuple(hyps)
        p = np.asarray(probs, dtype=np.float64)
        self.probs = p / p.sum()
        self.stream = stream

    def need(self, count: int) -> int:
        return 0

    def draw(self, data, count: int, tag: tuple = ()) -> Draws:
        gen = self.stream.substream(*tag).generator() if tag else self.stream.generator()
        return Draws.from_indices(self.hyps, gen.choice(len(self.hyps), size=count, p=self.probs))


# stable-string tester


@dataclass(frozen=True)
class TesterResult:
    accept: bool
    v_hat: float
    v_prime: float
    m1: int
    m2: int


def tester_sizes(params: ClusterParams, rho: float) -> tuple[int, int]:
    eps = params.eps
    m1 = int(math.ceil(CONSTANTS.c1 * (1.0 / (rho**2 * eps**2) + math.log(1.0 / params.beta) / eps**2)))
    m2 = int(math.ceil(CONSTANTS.c2 * math.log(m1 / params.beta) / params.gamma**2))
    return m1, m2


def tester_sample_need(sampler, params: ClusterParams, rho: float) -> int:
    m1, m2 = tester_sizes(params, rho)
    return sampler.need(2 * m1) + m1 * m2


def tester_decision(v_hat: float, v_prime: float) -> bool:
    return v_hat > v_prime


def replicable_stable_tester(sampler, data, params: ClusterParams, rho: float,
                             shared: SharedRandomness) -> TesterResult:
    """Accept when a large fraction of independent draw pairs land within gamma of each other.

    Only the cut v' comes from ``shared``; the draws and distance blocks are
    taken from ``data`` so two runs see independent pairs.
    """
    check_unit("rho", rho)
    m1, m2 = tester_sizes(params, rho)
    require_samples(data, tester_sample_need(sampler, params, rho), "replicable_stable_tester")
    draw_part, dist_part = data.split([sampler.need(2 * m1), m1 * m2])
    draws = sampler.draw(draw_part, 2 * m1, ("tester", "draws"))
    table = PairTable.from_draws(draws.slice(0, m1), draws.slice(m1, 2 * m1))
    v_hat = dist_part.close_pair_count(table, m2, params.gamma) / m1
    v_prime = shared.substream("tester", "cut").uniform(params.v - params.eps, params.v + params.eps)
    return TesterResult(tester_decision(v_hat, v_prime), v_hat, v_prime, m1, m2)


# cluster detection


def cluster_sizes(params: ClusterParams) -> tuple[int, int]:
    n = int(math.ceil(CONSTANTS.c_cluster_n * math.log(1.0 / params.beta) / params.eps**2))
    m = int(math.ceil(CONSTANTS.c_cluster_m * math.log(n / params.beta) / params.gamma**2))
    return n, m


def cluster_sample_need(sampler, params: ClusterParams) -> int:
    n, m = cluster_sizes(params)
    return sampler.need(n) + m


def greedy_clusters(dist: np.ndarray, counts: np.ndarray, n: int, gamma: float, v: float) -> list[int]:
    """Greedy pass over distinct draws in first-appearance order.

    Visiting each distinct hypothesis once (weighted by multiplicity) matches the
    pass over all n draws: the candidate pool only shrinks, so a repeat of a
    failed draw fails again, and a repeat of a kept draw finds an empty pool.
    """
    remaining = np.asarray(counts, dtype=np.int64).copy()
    kept = []
    for j in range(len(remaining)):
        near = dist[j] < 2.0 * gamma
        if remaining[near].sum() >= v * n:
            kept.append(j)
            remaining[near] = 0
    return kept


def cluster_detection(sampler, data, params: ClusterParams) -> list[Hypothesis]:
    n, m = cluster_sizes(params)
    require_samples(data, cluster_sample_need(sampler, params), "cluster_detection")
    draw_part, dist_part = data.split([sampler.need(n), m])
    draws = sampler.draw(draw_part, n, ("cluster", "draws"))
    order, counts = draws.first_appearance()
    hyps = [draws.support[i] for i in order]
    dist = dist_part.distance_matrix(hyps)
    return [hyps[j] for j in greedy_clusters(dist, counts, n, params.gamma, params.v)]


# error booster


class BoostErrorApprox(Learner):
    """D runs of an approximately replicable learner, then robust hypothesis selection."""

    def __init__(self, base: Learner, alpha: float = 0.2, beta: float = 0.05, rho: float = 0.3,
                 gamma: float | None = None):
        self.base = base
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.gamma = gamma

    @property
    def D(self) -> int:
        check_unit("beta", self.beta)
        return max(1, int(math.ceil(CONSTANTS.d_runs * math.log(1.0 / self.beta))))

    @property
    def internal_radius(self) -> float:
        r = self.rho * self.alpha / (CONSTANTS.c_rob * math.log(self.D / self.beta))
        return r if self.gamma is None else min(self.gamma, r)

    def selection(self) -> HypothesisSelection:
        return HypothesisSelection(self.alpha / 2, self.beta / 2, self.rho / 2, self.internal_radius)

    def sample_need(self) -> int:
        return self.D * self.base.sample_need() + self.selection().sample_need(self.D)

    def oracle_calls(self) -> float:
        return self.D * self.base.oracle_calls()

    def learn(self, data, shared: SharedRandomness) -> Hypothesis:
        require_samples(data, self.sample_need(), "BoostErrorApprox")
        sel = self.selection()
        nb = self.base.sample_need()
        parts = data.split([nb] * self.D + [sel.sample_need(self.D)])
        hyps = [self.base.learn(parts[i], shared.substream("alg3", "run", i)) for i in range(self.D)]
        return hyps[sel.select(hyps, parts[-1], shared).index]


# replicability booster


def beta1(beta: float, rho: float, R: int) -> float:
    """Failure budget for the inner learner."""
    return CONSTANTS.beta1_mult * (beta * rho**2 / R + beta / (R * math.log(R / beta)))


def n_strings(rho: float) -> int:
    return max(1, int(math.ceil(CONSTANTS.r_mult * math.log(1.0 / rho))))


@dataclass
class BoostTrace:
    accepted_at: int | None = None
    fallback: bool = False
    testers: list = field(default_factory=list)


class BoostReplicability(Learner):
    """Find a stable random string with the tester, then return a cluster center under it."""

    def __init__(self, base: Learner, alpha: float = 0.2, beta: float = 0.05, rho: float = 0.1,
                 gamma: float = 0.25):
        self.base = base
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.gamma = gamma

    @property
    def R(self) -> int:
        check_unit("rho", self.rho)
        return n_strings(self.rho)

    def tester_params(self) -> tuple[ClusterParams, float]:
        R = self.R
        return ClusterParams(0.8, self.gamma / 6, 0.01, self.beta / (3 * R)), self.rho / (2 * R)

    def cluster_params(self) -> ClusterParams:
        return ClusterParams(0.75, self.gamma / 3, 0.01, self.beta / (3 * self.R))

    def _round_sizes(self) -> tuple[int, int]:
        probe = LearnerSampler(self.base, None)
        tp, trho = self.tester_params()
        return tester_sample_need(probe, tp, trho), cluster_sample_need(probe, self.cluster_params())

    def sample_need(self) -> int:
        t, c = self._round_sizes()
        return self.R * (t + c) + self.base.sample_need()

    def oracle_calls(self) -> float:
        tp, trho = self.tester_params()
        m1, _ = tester_sizes(tp, trho)
        n, _ = cluster_sizes(self.cluster_params())
        return self.R * (2 * m1 + n) + 1

    def learn_with_trace(self, data, shared: SharedRandomness) -> tuple[Hypothesis, BoostTrace]:
        require_samples(data, self.sample_need(), "BoostReplicability")
        t, c = self._round_sizes()
        R = self.R
        parts = data.split([t, c] * R + [self.base.sample_need()])
        tp, trho = self.tester_params()
        trace = BoostTrace()
        for i in range(R):
            sampler = LearnerSampler(self.base, shared.substream("alg5", "strings", i))
            res = replicable_stable_tester(sampler, parts[2 * i], tp, trho, shared.substream("alg5", "test", i))
            trace.testers.append(res)
            if res.accept:
                trace.accepted_at = i
                found = cluster_detection(sampler, parts[2 * i + 1], self.cluster_params())
                if found:
                    return found[0], trace
                break
        trace.fallback = True
        return self.base.learn(parts[-1], shared.substream("alg5", "fallback")), trace

    def learn(self, data, shared: SharedRandomness) -> Hypothesis:
        return self.learn_with_trace(data, shared)[0]


def build_approx_learner(mode: str, base: Learner, alpha: float, beta: float, rho: float, gamma: float) -> Learner:
    """Wire one of the two composed pipelines.

    ``const_alpha``: averaged predictor at pointwise level rho * gamma, then the error booster.
    ``const_gamma``: averaged predictor at pointwise level 0.01 * gamma / 12, then the
    replicability booster.
    """
    for name, val in (("alpha", alpha), ("beta", beta), ("rho", rho), ("gamma", gamma)):
        check_unit(name, val)
    if mode == "const_alpha":
        inner = BasicPointwise(base, alpha=alpha / 2, beta=0.01, rho=rho * gamma)
        return BoostErrorApprox(inner, alpha=alpha, beta=beta, rho=rho, gamma=gamma)
    if mode == "const_gamma":
        b1 = beta1(beta, rho, n_strings(rho))
        inner = BasicPointwise(base, alpha=alpha, beta=b1, rho=0.01 * gamma / 12)
        return BoostReplicability(inner, alpha=alpha, beta=beta, rho=rho, gamma=gamma)
    raise ValueError(f"unknown mode {mode!r}; expected 'const_alpha' or 'const_gamma'")
