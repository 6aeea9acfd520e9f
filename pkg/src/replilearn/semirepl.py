"""Semi-replicable learning: a cover built from a shared unlabeled pool, then replicable selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .base import Learner, check_unit, require_samples
from .constants import CONSTANTS
from .core.data import Dataset, unlabeled_sample
from .core.hypotheses import Hypothesis
from .core.randomness import SharedRandomness
from .core.tasks import FiniteDomain, IntervalDomain
from .learners import erm_finite, erm_threshold
from .selection import HypothesisSelection, selection_sample_size

FINITE_COVER_MAX_D = 12


def pool_size(d_eff: int, alpha: float, beta: float) -> int:
    return int(math.ceil(CONSTANTS.c_pool * (d_eff + math.log(2.0 / beta)) / alpha))


@dataclass(frozen=True)
class SharedPool:
    """Unlabeled points both runs hold; drawn from the ("semi", "pool") substream."""

    unlabeled: np.ndarray
    domain: object

    @classmethod
    def draw(cls, task, m_u: int, shared: SharedRandomness) -> "SharedPool":
        pts = unlabeled_sample(task, m_u, shared.substream("semi", "pool"))
        pts.setflags(write=False)
        return cls(pts, task.domain)

    def __len__(self) -> int:
        return int(self.unlabeled.size)


def _dedupe(hyps) -> list[Hypothesis]:
    seen, out = set(), []
    for h in hyps:
        if h not in seen:
            seen.add(h)
            out.append(h)
    return out


def build_cover(pool: SharedPool, hclass: str, lo: float = 0.0, hi: float = 1.0) -> list[Hypothesis]:
    """ERM outputs on every labeling of the pool that the class realizes, deduplicated."""
    U = np.asarray(pool.unlabeled)
    d = getattr(pool.domain, "d", 0)
    return list(_cover_cached(U.tobytes(), str(U.dtype), hclass, float(lo), float(hi), int(d)))


# both runs of a pair hold the same pool, so the second build is a cache hit
@lru_cache(maxsize=64)
def _cover_cached(raw: bytes, dtype: str, hclass: str, lo: float, hi: float, d: int) -> tuple:
    U = np.frombuffer(raw, dtype=dtype)
    return tuple(_build_cover(U, hclass, lo, hi, d))


def _build_cover(U: np.ndarray, hclass: str, lo: float, hi: float, d: int) -> list[Hypothesis]:
    if U.size == 0:
        raise ValueError("empty pool")
    if hclass == "threshold":
        vals = np.unique(U)
        out = []
        for j in range(vals.size + 1):
            # first j distinct values negative, the rest positive
            y = np.where(U > vals[j - 1], 1, -1) if j > 0 else np.ones(U.size, dtype=np.int64)
            out.append(erm_threshold(Dataset(U, y, IntervalDomain(lo, hi)), lo, hi))
        return _dedupe(out)
    if hclass == "finite":
        if d > FINITE_COVER_MAX_D:
            raise ValueError(f"finite cover enumeration is capped at d={FINITE_COVER_MAX_D}")
        present = np.unique(U.astype(np.int64))
        where = np.searchsorted(present, U.astype(np.int64))
        out = []
        for code in range(1 << present.size):
            bits = np.where((code >> np.arange(present.size)) & 1, -1, 1)
            out.append(erm_finite(Dataset(U, bits[where], FiniteDomain(d)), d))
        return _dedupe(out)
    raise ValueError(f"unknown class {hclass!r}")


class SemiReplicableLearner(Learner):
    """Selection over the shared cover with shared randomness, on fresh labeled data."""

    def __init__(self, hclass: str = "threshold", d: int = 1, lo: float = 0.0, hi: float = 1.0,
                 alpha: float = 0.1, beta: float = 0.05, rho: float = 0.2, m_s: int | None = None):
        self.hclass = hclass
        self.d = d
        self.lo = lo
        self.hi = hi
        self.alpha = alpha
        self.beta = beta
        self.rho = rho
        self.m_s = m_s

    @property
    def domain(self):
        return FiniteDomain(self.d) if self.hclass == "finite" else IntervalDomain(self.lo, self.hi)

    @property
    def d_eff(self) -> int:
        return int(self.d) if self.hclass == "finite" else 1

    @property
    def m_u(self) -> int:
        return pool_size(self.d_eff, self.alpha, self.beta)

    def max_cover(self) -> int:
        return self.m_u + 1 if self.hclass == "threshold" else 2 ** int(self.d)

    def tau_eff(self, n: int) -> float:
        return self.rho * (self.alpha / 2) / (CONSTANTS.c_rob * math.log(n / self.beta))

    def labeled_need(self, n: int) -> int:
        return selection_sample_size(n, self.beta / 2, self.tau_eff(n))

    def labeled_need_real(self, n: int) -> float:
        """The labeled budget before rounding up; quadratic in 1/rho at fixed cover size."""
        return CONSTANTS.c_sel * math.log(n / (self.beta / 2)) / self.tau_eff(n) ** 2

    def sample_need(self) -> int:
        for name in ("alpha", "beta", "rho"):
            check_unit(name, getattr(self, name))
        need = self.labeled_need(self.max_cover())
        return max(need, int(self.m_s)) if self.m_s is not None else need

    def selection(self, n: int) -> HypothesisSelection:
        return HypothesisSelection(self.alpha / 2, self.beta / 2, self.rho, self.tau_eff(n))

    def learn_from_pool(self, data, pool: SharedPool, shared: SharedRandomness) -> Hypothesis:
        require_samples(data, self.sample_need(), "SemiReplicableLearner")
        cover = build_cover(pool, self.hclass, self.lo, self.hi)
        if len(cover) == 1:
            return cover[0]
        sel = self.selection(len(cover))
        S = data.split([sel.sample_need(len(cover))])[0]
        return cover[sel.select(cover, S, shared).index]

    def learn(self, data, shared: SharedRandomness) -> Hypothesis:
        task = getattr(data, "task", None)
        if task is None:
            raise TypeError("semi-replicable learning needs data that carries its task for the shared pool")
        return self.learn_from_pool(data, SharedPool.draw(task, self.m_u, shared), shared)
