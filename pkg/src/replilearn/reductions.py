"""Lower-bound reductions run forward as experiments: bias planting, hardness
amplification and sign-one-way marginals from a learner."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .base import Learner, check_unit
from .constants import CONSTANTS
from .core.data import NEGLIGIBLE, DrawnSample, InsufficientData
from .core.hypotheses import Hypothesis
from .core.metrics import excess_error
from .core.randomness import SharedRandomness
from .core.tasks import FiniteLabeledDistribution


def cap_exceeded(S: DrawnSample, point: int, cap: float, strict: bool = True) -> bool:
    """Whether the draw count at ``point`` passes ``cap`` (``>`` if strict, else ``>=``).

    Small samples are counted directly.  For large ones the count is never
    materialized: if the exact binomial tail is below NEGLIGIBLE the event is
    treated as absent, which changes the sample law by at most that much.
    """
    if S.small:
        pos, neg = S.materialize().counts()
        c = int(pos[point] + neg[point])
        return c > cap if strict else c >= cap
    w = float(S.task.marginal[point])
    k = math.floor(cap) if strict else math.ceil(cap) - 1
    tail = float(stats.binom.sf(k, S.n, w))
    if tail < NEGLIGIBLE:
        return False
    raise InsufficientData("cap event is not negligible for a sample too large to list")


# bias estimation through a pointwise-replicable learner


@dataclass(frozen=True)
class PlantedDraw:
    answer: int
    planted: int
    plus_block: tuple
    minus_block: tuple
    capped: bool


def planting(d: int, shared: SharedRandomness) -> tuple[int, np.ndarray, np.ndarray]:
    """Shared choice of the planted point r in [2d+1] and the split of the rest into B+ and B-."""
    gen = shared.substream("reduce", "plant").generator()
    r = int(gen.integers(2 * d + 1))
    rest = np.delete(np.arange(2 * d + 1), r)
    perm = gen.permutation(rest)
    return r, np.sort(perm[:d]), np.sort(perm[d:])


def planted_task(d: int, alpha: float, p: float, r: int, plus: np.ndarray, minus: np.ndarray) -> FiniteLabeledDistribution:
    biases = np.zeros(2 * d + 1)
    biases[plus] = alpha
    biases[minus] = -alpha
    biases[r] = p
    return FiniteLabeledDistribution(biases)


def bias_estimator_pointwise(A: Learner, d: int, alpha: float, rho: float, p: float,
                             shared: SharedRandomness, data: SharedRandomness) -> PlantedDraw:
    """Estimate sign(p) by hiding the coin among 2d dummy points and asking A about it.

    ``shared`` carries the algorithm's randomness (identical in paired runs);
    ``data`` drives the coin flips and the dummy points' samples.
    """
    check_unit("alpha", alpha)
    check_unit("rho", rho)
    r, plus, minus = planting(d, shared)
    task = planted_task(d, alpha, p, r, plus, minus)
    m = A.sample_need()
    S = DrawnSample(task, m, data)
    cap = 2.0 * (m / d) * math.sqrt(math.log(1.0 / rho))
    if cap_exceeded(S, r, cap, strict=True):
        return PlantedDraw(1, r, tuple(plus), tuple(minus), True)
    h = A.learn(S, shared.substream("reduce", "learner"))
    return PlantedDraw(int(h.predict(np.array([r]))[0]), r, tuple(plus), tuple(minus), False)


# hardness amplification for approximate replicability


@dataclass(frozen=True)
class AmplifiedDraw:
    answer: int
    planted: int
    capped: bool
    err: float


def amplification_error(answer: int, p: float) -> float:
    """err_r = |p| when the answer misses sign(p), else 0."""
    truth = 1 if p >= 0 else -1
    return abs(p) if answer != truth else 0.0


def apx_repl_hardness_amplification(A0: Learner, d: int, alpha: float, rho: float, p: float,
                                    shared: SharedRandomness, data: SharedRandomness) -> AmplifiedDraw:
    """Plant the target coin at a shared random point among d - 1 dummy coins with biases from U[-alpha, alpha]."""
    check_unit("alpha", alpha)
    check_unit("rho", rho)
    gen = shared.substream("alg10", "plant").generator()
    r = int(gen.integers(d))
    biases = gen.uniform(-alpha, alpha, size=d)
    biases[r] = p
    task = FiniteLabeledDistribution(biases)
    m = A0.sample_need()
    S = DrawnSample(task, m, data)
    cap = 10.0 * (m / d) * math.sqrt(math.log(1.0 / rho))
    if cap_exceeded(S, r, cap, strict=False):
        return AmplifiedDraw(1, r, True, amplification_error(1, p))
    h = A0.learn(S, shared.substream("alg10", "learner"))
    ans = int(h.predict(np.array([r]))[0])
    return AmplifiedDraw(ans, r, False, amplification_error(ans, p))


# sign-one-way marginals


def sign_one_way_error(v: np.ndarray, p: np.ndarray) -> float:
    """(1/d) sum |p_i| - (1/d) sum v_i p_i."""
    v = np.asarray(v, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    return float(np.mean(np.abs(p)) - np.mean(v * p))


def sign_mismatch_mass(v: np.ndarray, p: np.ndarray) -> float:
    """(1/d) sum over v_i != sign(p_i) of 2|p_i|, with sign(0) taken as +1."""
    p = np.asarray(p, dtype=np.float64)
    wrong = np.asarray(v) != np.where(p >= 0, 1, -1)
    return float(np.sum(2.0 * np.abs(p[wrong])) / p.size)


def sign_identity_gap(h: Hypothesis, p: np.ndarray) -> float:
    """2 * excess error minus the mismatch mass on the uniform-marginal task; zero up to rounding."""
    task = FiniteLabeledDistribution(np.asarray(p, dtype=np.float64))
    return 2.0 * excess_error(task, h) - sign_mismatch_mass(h.labels_on(task.d), p)


@dataclass(frozen=True)
class SignOneWayDraw:
    v: np.ndarray | None
    discarded: bool
    error: float | None


def sign_one_way_from_learner(A: Learner, p: np.ndarray, shared: SharedRandomness,
                              data: SharedRandomness) -> SignOneWayDraw:
    """Feed A a uniform-marginal sample assembled from product samples of Rad(p); read off v.

    Each coordinate may supply at most C m / d labels; a trial that needs more
    is discarded.
    """
    p = np.asarray(p, dtype=np.float64)
    d = p.size
    task = FiniteLabeledDistribution(p)
    m = A.sample_need()
    S = DrawnSample(task, m, data)
    cap = CONSTANTS.c_sign_cap * m / d
    if any(cap_exceeded(S, j, cap, strict=True) for j in range(d)):
        return SignOneWayDraw(None, True, None)
    h = A.learn(S, shared)
    v = h.labels_on(d).astype(np.int64)
    return SignOneWayDraw(v, False, sign_one_way_error(v, p))
