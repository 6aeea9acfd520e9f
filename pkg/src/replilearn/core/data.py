"""Labeled samples.

Three interchangeable sources share one query interface:

``Dataset``
    explicit points and labels.
``CountSample``
    explicit per-point label counts for a finite task (the order of the points
    is irrelevant to every learner here, so counts are a complete record).
``DrawnSample``
    ``n`` i.i.d. draws from a known task, realized lazily through sufficient
    statistics.  Small samples are materialized point by point; large ones
    answer each query by drawing the exact law of the requested statistic.

A lazily drawn sample is meant to be consumed once: each query type draws from
its own substream, so two different queries on the same large sample are not
coupled to a common underlying point list.  Learners honour this by splitting
their input into disjoint parts and asking one question per part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .hypotheses import Hypothesis, LabelingStack, PairTable
from .metrics import distance_matrix as exact_distance_matrix
from .metrics import real_partition
from .randomness import SharedRandomness
from .tasks import FiniteDomain, FiniteLabeledDistribution, IntervalDomain, ThresholdTask

MATERIALIZE_CAP = 1 << 20
HARD_CAP = 60_000_000
# total-variation budget for treating an overwhelmingly likely block statistic as certain
NEGLIGIBLE = 1e-18
_HYPERGEOM_LIMIT = 1_000_000_000
BLOCK_CAP = 10_000_000


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SignStack:
    """Per-block sign of (#positive - #negative) at every finite point."""

    rows: np.ndarray
    codes: np.ndarray | None
    size: int

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "SignStack":
        mat = np.ascontiguousarray(mat, dtype=np.int8)
        rows, codes = np.unique(mat, axis=0, return_inverse=True)
        if rows.shape[0] == 1:
            return cls(rows, None, mat.shape[0])
        return cls(rows, codes.ravel(), mat.shape[0])

    def labels(self) -> LabelingStack:
        """Majority labels with ties (and unseen points) sent to +1."""
        lab = np.where(self.rows >= 0, 1, -1).astype(np.int8)
        if self.codes is None:
            return LabelingStack.constant(lab[0], self.size)
        return LabelingStack(lab, self.codes)

    def matrix(self) -> np.ndarray:
        if self.codes is None:
            return np.repeat(self.rows, self.size, axis=0)
        return self.rows[self.codes]


def _domain(task_or_domain):
    return task_or_domain.domain if hasattr(task_or_domain, "domain") else task_or_domain


def _finite_label_matrix(hyps: Sequence[Hypothesis], d: int) -> np.ndarray:
    return np.stack([h.labels_on(d) for h in hyps]) if hyps else np.empty((0, d), dtype=np.int8)


def _count_errors(lab: np.ndarray, pos: np.ndarray, neg: np.ndarray, n: int) -> np.ndarray:
    if n <= 0:
        raise InsufficientData("empirical error of an empty sample")
    plus = lab == 1
    wrong = plus.astype(np.int64) @ neg.astype(np.int64) + (~plus).astype(np.int64) @ pos.astype(np.int64)
    return wrong / n


def _count_distances(lab: np.ndarray, cnt: np.ndarray, n: int) -> np.ndarray:
    if n <= 0:
        raise InsufficientData("empirical distance on an empty sample")
    plus = (lab == 1).astype(np.int64)
    cnt = cnt.astype(np.int64)
    pw = plus @ cnt
    both = (plus * cnt) @ plus.T
    out = pw[:, None] + pw[None, :] - 2 * both
    return out / n


def _kmax_below(gamma: float, m: int) -> int:
    # largest k with k / m < gamma
    return int(math.ceil(gamma * m)) - 1


def split_counts(cells: np.ndarray, sizes: Sequence[int], gen: np.random.Generator) -> np.ndarray:
    """Randomly allocate labeled items (grouped by cell) into parts of the given sizes.

    Returns an array of shape ``(len(sizes), n_cells)``; items beyond ``sum(sizes)``
    are dropped.  Exact: each cell is a multivariate hypergeometric draw over the
    parts' remaining capacities.
    """
    cells = np.asarray(cells, dtype=np.int64)
    total = int(cells.sum())
    need = int(sum(sizes))
    if need > total:
        raise InsufficientData(f"requested {need} items from {total}")
    if total >= _HYPERGEOM_LIMIT:
        raise InsufficientData("count splitting supports fewer than 1e9 items")
    caps = np.array(list(sizes) + [total - need], dtype=np.int64)
    out = np.zeros((caps.size, cells.size), dtype=np.int64)
    for c, nc in enumerate(cells):
        if nc == 0:
            continue
        x = gen.multivariate_hypergeometric(caps, int(nc), method="marginals")
        out[:, c] = x
        caps = caps - x
    return out[:-1]


class Dataset:
    """Explicit labeled points; ``x`` holds indices (finite) or reals (interval)."""

    def __init__(self, x, y, domain):
        self.domain = _domain(domain)
        if isinstance(self.domain, FiniteDomain):
            x = np.asarray(x, dtype=np.int64).ravel()
            if x.size and (x.min() < 0 or x.max() >= self.domain.d):
                raise ValueError("finite points outside the domain")
        else:
            x = np.asarray(x, dtype=np.float64).ravel()
        y = np.asarray(y, dtype=np.int8).ravel()
        if x.shape != y.shape:
            raise ValueError("x and y differ in length")
        if y.size and not np.all((y == 1) | (y == -1)):
            raise ValueError("labels must be +1 or -1")
        x.setflags(write=False)
        y.setflags(write=False)
        self.x, self.y = x, y

    @property
    def n(self) -> int:
        return int(self.x.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Dataset)
            and self.domain == other.domain
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
        )

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, domain={self.domain})"

    @property
    def finite(self) -> bool:
        return isinstance(self.domain, FiniteDomain)

    def _need_finite(self) -> int:
        if not self.finite:
            raise TypeError("query requires a finite domain")
        return self.domain.d

    def split(self, sizes: Sequence[int]) -> list["Dataset"]:
        if sum(sizes) > self.n:
            raise InsufficientData(f"split of {sum(sizes)} from {self.n} points")
        out, off = [], 0
        for s in sizes:
            out.append(Dataset(self.x[off:off + s], self.y[off:off + s], self.domain))
            off += s
        return out

    def counts(self) -> tuple[np.ndarray, np.ndarray]:
        d = self._need_finite()
        plus = self.y == 1
        return (np.bincount(self.x[plus], minlength=d), np.bincount(self.x[~plus], minlength=d))

    def block_signs(self, k: int, b: int) -> SignStack:
        d = self._need_finite()
        if k * b > self.n:
            raise InsufficientData(f"{k} blocks of {b} from {self.n} points")
        if b == 0:
            return SignStack(np.zeros((1, d), dtype=np.int8), None, k)
        xs = self.x[: k * b].reshape(k, b)
        ys = self.y[: k * b].reshape(k, b).astype(np.int64)
        flat = (np.arange(k)[:, None] * d + xs).ravel()
        s = np.bincount(flat, weights=ys.ravel(), minlength=k * d).reshape(k, d)
        return SignStack.from_matrix(np.sign(s).astype(np.int8))

    def empirical_errors(self, hyps: Sequence[Hypothesis]) -> np.ndarray:
        if self.n == 0:
            raise InsufficientData("empirical error of an empty sample")
        if self.finite:
            pos, neg = self.counts()
            return _count_errors(_finite_label_matrix(hyps, self.domain.d), pos, neg, self.n)
        return np.array([np.mean(h.predict(self.x) != self.y) for h in hyps])

    def unlabeled_counts_for(self, hyps: Sequence[Hypothesis]) -> tuple[np.ndarray, np.ndarray]:
        if self.finite:
            return _finite_label_matrix(hyps, self.domain.d), np.bincount(self.x, minlength=self.domain.d)
        lab = np.stack([h.predict(self.x) for h in hyps])
        return lab, np.ones(self.n, dtype=np.int64)

    def distance_matrix(self, hyps: Sequence[Hypothesis]) -> np.ndarray:
        lab, cnt = self.unlabeled_counts_for(hyps)
        return _count_distances(lab, cnt, self.n)

    def close_pair_count(self, table: PairTable, block: int, gamma: float) -> int:
        if table.total * block > self.n:
            raise InsufficientData("not enough points for the pair distance blocks")
        hits, off = 0, 0
        for a, b, c in zip(table.a, table.b, table.count):
            ha, hb = table.support[a], table.support[b]
            for _ in range(int(c)):
                xs = self.x[off:off + block]
                off += block
                hits += int(np.count_nonzero(ha.predict(xs) != hb.predict(xs)) < gamma * block)
        return hits

    def order_statistics(self, ranks: Sequence[int]) -> np.ndarray:
        r = np.asarray(ranks, dtype=np.int64)
        if r.size and (r.min() < 1 or r.max() > self.n):
            raise InsufficientData("rank outside the sample")
        return np.sort(self.x)[r - 1].astype(np.float64)

    def materialize(self) -> "Dataset":
        return self


class CountSample:
    """Per-point label counts on a finite domain, with a stream for random splits."""

    def __init__(self, domain, pos, neg, stream: SharedRandomness):
        self.domain = _domain(domain)
        if not isinstance(self.domain, FiniteDomain):
            raise TypeError("count samples need a finite domain")
        self.pos = np.asarray(pos, dtype=np.int64).copy()
        self.neg = np.asarray(neg, dtype=np.int64).copy()
        if self.pos.shape != (self.domain.d,) or self.neg.shape != (self.domain.d,):
            raise ValueError("count vectors must have one entry per point")
        if np.any(self.pos < 0) or np.any(self.neg < 0):
            raise ValueError("negative count")
        self.pos.setflags(write=False)
        self.neg.setflags(write=False)
        self.stream = stream

    @property
    def n(self) -> int:
        return int(self.pos.sum() + self.neg.sum())

    def __len__(self) -> int:
        return self.n

    def _cells(self) -> np.ndarray:
        return np.stack([self.pos, self.neg], axis=1).ravel()

    def counts(self) -> tuple[np.ndarray, np.ndarray]:
        return self.pos, self.neg

    def _parts(self, sizes: Sequence[int], tag: str) -> np.ndarray:
        gen = self.stream.substream(tag).generator()
        return split_counts(self._cells(), sizes, gen).reshape(len(sizes), self.domain.d, 2)

    def split(self, sizes: Sequence[int]) -> list["CountSample"]:
        parts = self._parts(sizes, "split")
        return [CountSample(self.domain, p[:, 0], p[:, 1], self.stream.substream("part", i))
                for i, p in enumerate(parts)]

    def block_signs(self, k: int, b: int) -> SignStack:
        parts = self._parts([b] * k, "blocks")
        return SignStack.from_matrix(np.sign(parts[:, :, 0] - parts[:, :, 1]).astype(np.int8))

    def empirical_errors(self, hyps: Sequence[Hypothesis]) -> np.ndarray:
        return _count_errors(_finite_label_matrix(hyps, self.domain.d), self.pos, self.neg, self.n)

    def distance_matrix(self, hyps: Sequence[Hypothesis]) -> np.ndarray:
        return _count_distances(_finite_label_matrix(hyps, self.domain.d), self.pos + self.neg, self.n)

    def materialize(self) -> Dataset:
        if self.n > HARD_CAP:
            raise InsufficientData("sample too large to list point by point")
        x = np.concatenate([np.repeat(np.arange(self.domain.d), self.pos), np.repeat(np.arange(self.domain.d), self.neg)])
        y = np.concatenate([np.ones(int(self.pos.sum()), np.int8), -np.ones(int(self.neg.sum()), np.int8)])
        perm = self.stream.substream("order").generator().permutation(x.size)
        return Dataset(x[perm], y[perm], self.domain)

    def close_pair_count(self, table: PairTable, block: int, gamma: float) -> int:
        return self.materialize().close_pair_count(table, block, gamma)

    def order_statistics(self, ranks):
        raise TypeError("order statistics need a real-line sample")


def draw_points(task, n: int, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``n`` i.i.d. labeled points from ``task``."""
    if isinstance(task, FiniteLabeledDistribution):
        x = gen.choice(task.d, size=n, p=task.marginal) if task.d > 1 else np.zeros(n, dtype=np.int64)
        q = (1.0 + task.biases[x]) / 2.0
        y = np.where(gen.random(n) < q, 1, -1).astype(np.int8)
        return x.astype(np.int64), y
    if isinstance(task, ThresholdTask):
        x = task.cdf.inverse(gen.random(n))
        y = np.where(x > task.true_threshold, 1, -1).astype(np.int8)
        if task.noise > 0:
            y = np.where(gen.random(n) < task.noise, -y, y).astype(np.int8)
        return np.asarray(x, dtype=np.float64), y
    raise TypeError(f"unsupported task {type(task).__name__}")


def draw_unlabeled(task, n: int, gen: np.random.Generator) -> np.ndarray:
    if isinstance(task, FiniteLabeledDistribution):
        return gen.choice(task.d, size=n, p=task.marginal).astype(np.int64)
    return np.asarray(task.cdf.inverse(gen.random(n)), dtype=np.float64)


def sample(task, n: int, rng: SharedRandomness) -> Dataset:
    """``n`` i.i.d. draws from ``task``, deterministic given ``rng``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    x, y = draw_points(task, int(n), rng.substream("points").generator())
    return Dataset(x, y, task.domain)


def _undecided_points(task: FiniteLabeledDistribution, k: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Split points into those whose block sign is certain up to NEGLIGIBLE and the rest.

    For a point of mass w and bias p != 0, the chance that a block of b draws
    shows a tie or the minority sign is at most (1 - w (1 - sqrt(1 - p^2)))^b
    (Chernoff with the optimal exponential tilt).  Points with w = 0 are never
    seen, so their sign is 0 with certainty.
    """
    w, p = task.marginal, task.biases
    fixed = np.zeros(task.d, dtype=np.int8)
    undecided = []
    log_budget = math.log(NEGLIGIBLE) - math.log(max(k, 1)) - math.log(task.d)
    for i in range(task.d):
        if w[i] == 0.0:
            continue
        if p[i] == 0.0:
            undecided.append(i)
            continue
        gap = p[i] * p[i] / (1.0 + math.sqrt(1.0 - p[i] * p[i]))
        log_tail = b * math.log1p(-w[i] * gap) if w[i] * gap < 1.0 else -math.inf
        if log_tail < log_budget:
            fixed[i] = 1 if p[i] > 0 else -1
        else:
            undecided.append(i)
    return fixed, np.array(undecided, dtype=np.int64)


class DrawnSample:
    """``n`` i.i.d. draws from ``task`` indexed by ``stream``; see the module notes."""

    def __init__(self, task, n: int, stream: SharedRandomness, cap: int = MATERIALIZE_CAP):
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.task = task
        self.domain = task.domain
        self.n = int(n)
        self.stream = stream
        self.cap = int(cap)
        self._data: Dataset | None = None

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"DrawnSample(n={self.n}, stream={self.stream.describe()!r})"

    @property
    def finite(self) -> bool:
        return isinstance(self.task, FiniteLabeledDistribution)

    @property
    def small(self) -> bool:
        return self.n <= self.cap

    def materialize(self) -> Dataset:
        if self._data is None:
            if self.n > HARD_CAP:
                raise InsufficientData(f"sample of {self.n} points is too large to list")
            self._data = sample(self.task, self.n, self.stream)
        return self._data

    def _gen(self, tag: str) -> np.random.Generator:
        return self.stream.substream(tag).generator()

    def split(self, sizes: Sequence[int]) -> list["DrawnSample"]:
        if sum(sizes) > self.n:
            raise InsufficientData(f"split of {sum(sizes)} from {self.n} draws")
        if self.small:
            data = self.materialize().split(sizes)
            return [_Materialized(self.task, part) for part in data]
        out, off = [], 0
        for s in sizes:
            out.append(DrawnSample(self.task, s, self.stream.substream("span", off), self.cap))
            off += s
        return out

    def counts(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.finite:
            raise TypeError("query requires a finite domain")
        if self.small:
            return self.materialize().counts()
        cells = self._gen("counts").multinomial(self.n, self.task.cell_probabilities().ravel())
        cells = cells.reshape(self.task.d, 2)
        return cells[:, 0].astype(np.int64), cells[:, 1].astype(np.int64)

    def block_counts(self, k: int, b: int) -> np.ndarray:
        """Full ``(k, d, 2)`` per-block label counts (no shortcuts)."""
        if k * b > self.n:
            raise InsufficientData(f"{k} blocks of {b} from {self.n} draws")
        probs = self.task.cell_probabilities().ravel()
        cells = self._gen("block-counts").multinomial(b, probs, size=k)
        return cells.reshape(k, self.task.d, 2)

    def block_signs(self, k: int, b: int) -> SignStack:
        if not self.finite:
            raise TypeError("query requires a finite domain")
        if k * b > self.n:
            raise InsufficientData(f"{k} blocks of {b} from {self.n} draws")
        if self.small:
            return self.materialize().block_signs(k, b)
        fixed, undecided = _undecided_points(self.task, k, b)
        if undecided.size == 0:
            return SignStack(fixed[None, :], None, k)
        if k > BLOCK_CAP:
            raise InsufficientData(f"{k} blocks with {undecided.size} uncertain points is beyond the simulation budget")
        gen = self._gen("blocks")
        probs = self.task.cell_probabilities()
        rem = np.full(k, b, dtype=np.int64)
        rem_prob = 1.0
        signs = np.repeat(fixed[None, :], k, axis=0)
        for i in undecided:
            pair = []
            for col in (0, 1):
                pi = probs[i, col]
                if rem_prob <= 0.0 or pi <= 0.0:
                    nc = np.zeros(k, dtype=np.int64)
                else:
                    nc = gen.binomial(rem, min(1.0, pi / rem_prob))
                rem = rem - nc
                rem_prob -= pi
                pair.append(nc)
            signs[:, i] = np.sign(pair[0] - pair[1])
        return SignStack.from_matrix(signs)

    def _real_cells(self, hyps: Sequence[Hypothesis], tag: str):
        part = real_partition(self.task, hyps)
        masses = np.clip(part.masses, 0.0, None)
        masses = masses / masses.sum()
        gen = self._gen(tag)
        cnt = gen.multinomial(self.n, masses)
        return part, cnt.astype(np.int64), gen

    def empirical_errors(self, hyps: Sequence[Hypothesis]) -> np.ndarray:
        if self.small:
            return self.materialize().empirical_errors(hyps)
        if self.finite:
            pos, neg = self.counts()
            return _count_errors(_finite_label_matrix(hyps, self.task.d), pos, neg, self.n)
        part, cnt, gen = self._real_cells(hyps, "cells")
        flips = gen.binomial(cnt, self.task.noise) if self.task.noise > 0 else np.zeros_like(cnt)
        pos = np.where(part.truth == 1, cnt - flips, flips)
        neg = cnt - pos
        lab = np.stack([part.labels(h) for h in hyps])
        return _count_errors(lab, pos, neg, self.n)

    def distance_matrix(self, hyps: Sequence[Hypothesis]) -> np.ndarray:
        if self.small:
            return self.materialize().distance_matrix(hyps)
        if self.finite:
            cnt = self._gen("unlabeled").multinomial(self.n, self.task.marginal)
            return _count_distances(_finite_label_matrix(hyps, self.task.d), cnt, self.n)
        part, cnt, _ = self._real_cells(hyps, "unlabeled")
        lab = np.stack([part.labels(h) for h in hyps])
        return _count_distances(lab, cnt, self.n)

    def close_pair_count(self, table: PairTable, block: int, gamma: float) -> int:
        """How many pairs have empirical distance below ``gamma`` on their own block."""
        if table.total * block > self.n:
            raise InsufficientData("not enough draws for the pair distance blocks")
        if self.small:
            return self.materialize().close_pair_count(table, block, gamma)
        dist = exact_distance_matrix(self.task, list(table.support))
        kmax = _kmax_below(gamma, block)
        gen = self._gen("pairs")
        hits = 0
        for a, b, c in zip(table.a, table.b, table.count):
            q = 1.0 if dist[a, b] <= 0.0 else float(stats.binom.cdf(kmax, block, min(1.0, dist[a, b])))
            hits += int(gen.binomial(int(c), q)) if 0.0 < q < 1.0 else (int(c) if q >= 1.0 else 0)
        return hits

    def order_statistics(self, ranks: Sequence[int]) -> np.ndarray:
        if self.finite:
            raise TypeError("order statistics need a real-line sample")
        r = np.asarray(ranks, dtype=np.int64)
        if r.size == 0:
            return np.empty(0)
        if np.any(np.diff(r) <= 0) or r[0] < 1 or r[-1] > self.n:
            raise InsufficientData("ranks must be increasing and within the sample")
        if self.small:
            return self.materialize().order_statistics(r)
        gen = self._gen("order")
        # uniform order statistics from normalized gamma partial sums
        gaps = np.diff(np.concatenate([[0], r])).astype(np.float64)
        g = gen.standard_gamma(np.concatenate([gaps, [self.n + 1 - r[-1]]]))
        u = np.cumsum(g)[:-1] / g.sum()
        return np.asarray(self.task.cdf.inverse(u), dtype=np.float64)


class _Materialized(Dataset):
    """A slice of a small drawn sample; keeps the task for callers that need it."""

    def __init__(self, task, data: Dataset):
        super().__init__(data.x, data.y, task.domain)
        self.task = task


def unlabeled_sample(task, n: int, rng: SharedRandomness) -> np.ndarray:
    return draw_unlabeled(task, int(n), rng.substream("points").generator())
