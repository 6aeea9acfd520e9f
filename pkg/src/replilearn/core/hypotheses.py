"""Hypothesis variants: finite labelings, thresholds, constants and aggregates.

All hypotheses are immutable, compare by canonical structure and hash
accordingly, so "identical output" in the replicability sense is ``h1 == h2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

import numpy as np


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Hypothesis:
    """Base class; subclasses define ``key``, ``predict`` and domain views."""

    kind: str = "hypothesis"

    def key(self) -> tuple:
        raise NotImplementedError

    def predict(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def labels_on(self, d: int) -> np.ndarray:
        """Labels at the finite domain points ``0..d-1``."""
        return self.predict(np.arange(d))

    def breakpoints(self) -> np.ndarray:
        """Points where the prediction on the real line may change."""
        raise TypeError(f"{self.kind} hypothesis has no real-line form")

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        out = self.predict(np.atleast_1d(np.asarray(x)))
        return int(out[0]) if scalar else out

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return isinstance(other, Hypothesis) and self.key() == other.key()

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.key())
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, eq=False)
class ConstantPlus(Hypothesis):
    kind = "const+"

    def key(self) -> tuple:
        return ("const", 1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.ones(np.shape(x), dtype=np.int8)

    def breakpoints(self) -> np.ndarray:
        return np.empty(0)


@dataclass(frozen=True, eq=False)
class ConstantMinus(Hypothesis):
    kind = "const-"

    def key(self) -> tuple:
        return ("const", -1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return -np.ones(np.shape(x), dtype=np.int8)

    def breakpoints(self) -> np.ndarray:
        return np.empty(0)


@dataclass(frozen=True, eq=False)
class FiniteLabeling(Hypothesis):
    labels: np.ndarray
    kind = "labeling"

    def __post_init__(self) -> None:
        lab = np.array(self.labels, dtype=np.int8).ravel()
        if not np.all((lab == 1) | (lab == -1)):
            raise ValueError("labels must be +1 or -1")
        object.__setattr__(self, "labels", _readonly(lab))

    @property
    def d(self) -> int:
        return int(self.labels.size)

    def key(self) -> tuple:
        return ("fin", self.labels.tobytes())

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.labels[np.asarray(x, dtype=np.int64)]

    def labels_on(self, d: int) -> np.ndarray:
        if d != self.labels.size:
            raise ValueError(f"labeling has {self.labels.size} points, domain has {d}")
        return self.labels

    def __repr__(self) -> str:
        return f"FiniteLabeling({self.labels.tolist()})"


@dataclass(frozen=True, eq=False)
class Threshold(Hypothesis):
    """x -> +1 iff x > t."""

    t: float
    kind = "threshold"

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", float(self.t))

    def key(self) -> tuple:
        return ("thr", self.t)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(x, dtype=np.float64) > self.t, 1, -1).astype(np.int8)

    def labels_on(self, d: int) -> np.ndarray:
        raise TypeError("threshold hypotheses act on the real line")

    def breakpoints(self) -> np.ndarray:
        return np.array([self.t])


class LabelingStack(Sequence[FiniteLabeling]):
    """T finite labelings stored as distinct rows plus a row index per member.

    ``codes=None`` means every member equals row 0, which keeps huge stacks of
    identical labelings at O(d) memory.
    """

    __slots__ = ("rows", "codes", "size", "_plus")

    def __init__(self, rows: np.ndarray, codes: np.ndarray | None, size: int | None = None):
        rows = np.asarray(rows, dtype=np.int8)
        if rows.ndim != 2:
            raise ValueError("rows must be a matrix")
        if codes is None:
            if rows.shape[0] != 1 or size is None:
                raise ValueError("a constant stack needs one row and an explicit size")
            self.rows, self.codes, self.size = _readonly(rows.copy()), None, int(size)
        else:
            codes = np.asarray(codes, dtype=np.int64).ravel()
            # canonical form: distinct used rows in sorted order
            used, inv = np.unique(codes, return_inverse=True)
            rows_u, inv2 = np.unique(rows[used], axis=0, return_inverse=True)
            codes = inv2.ravel()[inv.ravel()]
            if rows_u.shape[0] == 1:
                self.rows, self.codes, self.size = _readonly(rows_u.copy()), None, int(codes.size)
            else:
                self.rows, self.codes, self.size = _readonly(rows_u.copy()), _readonly(codes), int(codes.size)
        if self.size < 1:
            raise ValueError("empty stack")
        self._plus = None

    @classmethod
    def from_labelings(cls, subs: Iterable[FiniteLabeling]) -> "LabelingStack":
        mat = np.stack([s.labels for s in subs])
        return cls.from_matrix(mat)

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "LabelingStack":
        mat = np.ascontiguousarray(mat, dtype=np.int8)
        return cls(mat, np.arange(mat.shape[0]))

    @classmethod
    def constant(cls, row: np.ndarray, size: int) -> "LabelingStack":
        return cls(np.asarray(row, dtype=np.int8)[None, :], None, size)

    @property
    def d(self) -> int:
        return int(self.rows.shape[1])

    def multiplicities(self) -> np.ndarray:
        if self.codes is None:
            return np.array([self.size], dtype=np.int64)
        return np.bincount(self.codes, minlength=self.rows.shape[0])

    def plus_counts(self) -> np.ndarray:
        """Number of members labeling each point +1."""
        if self._plus is None:
            self._plus = _readonly(self.multiplicities() @ (self.rows == 1).astype(np.int64))
        return self._plus

    def key(self) -> tuple:
        codes = self.size if self.codes is None else self.codes.tobytes()
        return ("stack", self.rows.tobytes(), self.rows.shape[1], codes)

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self.size))]
        if i < 0:
            i += self.size
        if not 0 <= i < self.size:
            raise IndexError(i)
        row = 0 if self.codes is None else int(self.codes[i])
        return FiniteLabeling(self.rows[row])

    def __iter__(self) -> Iterator[FiniteLabeling]:
        for i in range(self.size):
            yield self[i]


class ThresholdStack(Sequence[Threshold]):
    __slots__ = ("ts", "_sorted")

    def __init__(self, ts: np.ndarray):
        ts = np.array(ts, dtype=np.float64).ravel()
        if ts.size < 1:
            raise ValueError("empty stack")
        self.ts = _readonly(ts)
        self._sorted = np.sort(ts)

    def plus_counts_at(self, x: np.ndarray) -> np.ndarray:
        # members with t < x vote +1
        return np.searchsorted(self._sorted, np.asarray(x, dtype=np.float64), side="left")

    def key(self) -> tuple:
        return ("tstack", self.ts.tobytes())

    def __len__(self) -> int:
        return int(self.ts.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [Threshold(t) for t in self.ts[i]]
        return Threshold(self.ts[i])


SubList = Union[LabelingStack, ThresholdStack, tuple]


def _as_stack(subs) -> SubList:
    if isinstance(subs, (LabelingStack, ThresholdStack)):
        return subs
    subs = tuple(subs)
    if not subs:
        raise ValueError("aggregate needs at least one sub-hypothesis")
    if all(isinstance(h, FiniteLabeling) for h in subs):
        return LabelingStack.from_labelings(subs)
    if all(isinstance(h, Threshold) for h in subs):
        return ThresholdStack(np.array([h.t for h in subs]))
    return subs


class Aggregate(Hypothesis):
    """x -> +1 iff the fraction of members voting +1 at x exceeds ``cut``."""

    kind = "aggregate"

    def __init__(self, subs, cut: float):
        cut = float(cut)
        if not 0.0 <= cut <= 1.0:
            raise ValueError("cut must lie in [0, 1]")
        object.__setattr__(self, "subs", _as_stack(subs))
        object.__setattr__(self, "cut", cut)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Aggregate is immutable")

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.key()))
        return self._hash

    def __len__(self) -> int:
        return len(self.subs)

    def key(self) -> tuple:
        if self._key is None:
            if isinstance(self.subs, tuple):
                inner = ("list",) + tuple(h.key() for h in self.subs)
            else:
                inner = self.subs.key()
            object.__setattr__(self, "_key", ("agg", self.cut, inner))
        return self._key

    def plus_fraction(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        subs = self.subs
        if isinstance(subs, LabelingStack):
            return subs.plus_counts()[x.astype(np.int64)] / subs.size
        if isinstance(subs, ThresholdStack):
            return subs.plus_counts_at(x) / len(subs)
        votes = np.zeros(x.shape, dtype=np.int64)
        for h in subs:
            votes += h.predict(x) == 1
        return votes / len(subs)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.where(self.plus_fraction(x) > self.cut, 1, -1).astype(np.int8)

    def labels_on(self, d: int) -> np.ndarray:
        if isinstance(self.subs, LabelingStack):
            if self.subs.d != d:
                raise ValueError("aggregate members live on a different domain")
            return np.where(self.subs.plus_counts() / self.subs.size > self.cut, 1, -1).astype(np.int8)
        if isinstance(self.subs, ThresholdStack):
            raise TypeError("threshold aggregate acts on the real line")
        return self.predict(np.arange(d))

    def breakpoints(self) -> np.ndarray:
        if isinstance(self.subs, ThresholdStack):
            return np.unique(self.subs.ts)
        if isinstance(self.subs, LabelingStack):
            raise TypeError("labeling aggregate acts on a finite domain")
        pts = [h.breakpoints() for h in self.subs]
        return np.unique(np.concatenate(pts)) if pts else np.empty(0)

    def __repr__(self) -> str:
        return f"Aggregate(n_subs={len(self.subs)}, cut={self.cut!r})"


def is_proper(h: Hypothesis) -> bool:
    """True for members of the base classes (no aggregates)."""
    return not isinstance(h, Aggregate)


@dataclass(frozen=True)
class Draws:
    """A sequence of hypothesis draws, run-length encoded over a distinct support.

    Run ``k`` repeats ``support[values[k]]`` ``lengths[k]`` times, so a
    billion identical draws cost one run.
    """

    support: tuple
    values: np.ndarray
    lengths: np.ndarray

    @classmethod
    def from_indices(cls, support: Sequence[Hypothesis], idx: np.ndarray) -> "Draws":
        idx = np.asarray(idx, dtype=np.int64)
        if idx.size == 0:
            return cls(tuple(support), idx, np.zeros(0, dtype=np.int64))
        starts = np.concatenate([[0], np.flatnonzero(np.diff(idx)) + 1])
        lengths = np.diff(np.concatenate([starts, [idx.size]]))
        return cls(tuple(support), idx[starts], lengths.astype(np.int64))

    @classmethod
    def constant(cls, h: Hypothesis, count: int) -> "Draws":
        return cls((h,), np.zeros(1, dtype=np.int64), np.array([count], dtype=np.int64))

    @classmethod
    def from_list(cls, hyps: Sequence[Hypothesis]) -> "Draws":
        seen: dict = {}
        support: list = []
        idx = np.empty(len(hyps), dtype=np.int64)
        for i, h in enumerate(hyps):
            j = seen.get(h)
            if j is None:
                j = seen[h] = len(support)
                support.append(h)
            idx[i] = j
        return cls.from_indices(support, idx)

    def __len__(self) -> int:
        return int(self.lengths.sum())

    @property
    def idx(self) -> np.ndarray:
        return np.repeat(self.values, self.lengths)

    def __getitem__(self, i: int) -> Hypothesis:
        ends = np.cumsum(self.lengths)
        return self.support[int(self.values[np.searchsorted(ends, i, side="right")])]

    def counts(self) -> np.ndarray:
        return np.bincount(self.values, weights=self.lengths, minlength=len(self.support)).astype(np.int64)

    def slice(self, start: int, stop: int) -> "Draws":
        ends = np.cumsum(self.lengths)
        begins = ends - self.lengths
        lo = np.maximum(begins, start)
        hi = np.minimum(ends, stop)
        keep = hi > lo
        return Draws(self.support, self.values[keep], (hi - lo)[keep])

    def first_appearance(self) -> tuple[np.ndarray, np.ndarray]:
        """Support indices in order of first draw, with their multiplicities."""
        uniq, first = np.unique(self.values, return_index=True)
        order = uniq[np.argsort(first, kind="stable")]
        return order, self.counts()[order]


@dataclass(frozen=True)
class PairTable:
    """Multiset of hypothesis pairs ``(support[a], support[b])`` with counts."""

    support: tuple
    a: np.ndarray
    b: np.ndarray
    count: np.ndarray

    @property
    def total(self) -> int:
        return int(self.count.sum())

    @classmethod
    def from_draws(cls, first: Draws, second: Draws) -> "PairTable":
        support = list(first.support)
        index = {h: i for i, h in enumerate(support)}
        remap = np.empty(len(second.support), dtype=np.int64)
        for j, h in enumerate(second.support):
            k = index.get(h)
            if k is None:
                k = index[h] = len(support)
                support.append(h)
            remap[j] = k
        if len(first) != len(second):
            raise ValueError("pairing draws of different lengths")
        # merge the two run structures into segments on which both are constant
        e1, e2 = np.cumsum(first.lengths), np.cumsum(second.lengths)
        cuts = np.union1d(e1, e2)
        seg_len = np.diff(np.concatenate([[0], cuts]))
        a = first.values[np.searchsorted(e1, cuts, side="left")]
        b = remap[second.values[np.searchsorted(e2, cuts, side="left")]]
        n = len(support)
        pairs, inv = np.unique(a * n + b, return_inverse=True)
        cnt = np.bincount(inv, weights=seg_len).astype(np.int64)
        return cls(tuple(support), pairs // n, pairs % n, cnt)
