"""Synthetic learning tasks with closed-form error and distance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class FiniteDomain:
    d: int


@dataclass(frozen=True)
class IntervalDomain:
    lo: float
    hi: float


Domain = Union[FiniteDomain, IntervalDomain]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteLabeledDistribution:
    """Points ``0..d-1`` drawn from ``marginal``; the label of point ``i`` is Rad(p_i)."""

    biases: np.ndarray
    marginal: np.ndarray | None = None

    def __post_init__(self) -> None:
        p = np.array(self.biases, dtype=np.float64).ravel()
        if p.size < 1:
            raise ValueError("need at least one point")
        if np.any(np.abs(p) > 1.0) or not np.all(np.isfinite(p)):
            raise ValueError("biases must lie in [-1, 1]")
        if self.marginal is None:
            w = np.full(p.size, 1.0 / p.size)
        else:
            w = np.array(self.marginal, dtype=np.float64).ravel()
            if w.shape != p.shape:
                raise ValueError("marginal and biases differ in length")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("marginal must be nonnegative and sum to 1")
        object.__setattr__(self, "biases", _readonly(p))
        object.__setattr__(self, "marginal", _readonly(w))

    @property
    def d(self) -> int:
        return int(self.biases.size)

    @property
    def domain(self) -> FiniteDomain:
        return FiniteDomain(self.d)

    def cell_probabilities(self) -> np.ndarray:
        """Joint law of (point, label) as a ``(d, 2)`` array: columns are +1 and -1."""
        w, p = self.marginal, self.biases
        return np.stack([w * (1 + p) / 2, w * (1 - p) / 2], axis=1)

    def optimal_labeling(self) -> np.ndarray:
        return np.where(self.biases >= 0, 1, -1).astype(np.int8)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FiniteLabeledDistribution)
            and np.array_equal(self.biases, other.biases)
            and np.array_equal(self.marginal, other.marginal)
        )

    def __hash__(self) -> int:
        return hash((self.biases.tobytes(), self.marginal.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteLabeledDistribution(biases={self.biases.tolist()}, marginal={self.marginal.tolist()})"


@dataclass(frozen=True, eq=False)
class PiecewiseLinearCDF:
    """Continuous CDF through the knots ``(xs[k], ps[k])``, with ps[0]=0 and ps[-1]=1."""

    xs: np.ndarray
    ps: np.ndarray

    def __post_init__(self) -> None:
        xs = np.array(self.xs, dtype=np.float64).ravel()
        ps = np.array(self.ps, dtype=np.float64).ravel()
        if xs.size < 2 or xs.shape != ps.shape:
            raise ValueError("need at least two knots of matching length")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("knot positions must be strictly increasing")
        if np.any(np.diff(ps) < 0) or ps[0] != 0.0 or ps[-1] != 1.0:
            raise ValueError("CDF values must rise from 0 to 1")
        object.__setattr__(self, "xs", _readonly(xs))
        object.__setattr__(self, "ps", _readonly(ps))

    @classmethod
    def uniform(cls, lo: float = 0.0, hi: float = 1.0) -> "PiecewiseLinearCDF":
        return cls(np.array([lo, hi]), np.array([0.0, 1.0]))

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    def __call__(self, x: np.ndarray | float) -> np.ndarray | float:
        return np.interp(x, self.xs, self.ps)

    def inverse(self, u: np.ndarray | float) -> np.ndarray | float:
        # flat stretches carry no mass, so any point inside them is a valid preimage
        return np.interp(u, self.ps, self.xs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PiecewiseLinearCDF)
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ps, other.ps)
        )

    def __hash__(self) -> int:
        return hash((self.xs.tobytes(), self.ps.tobytes()))


@dataclass(frozen=True)
class ThresholdTask:
    """Real-line task: x ~ F, label sign(x > t*) flipped with probability ``noise``."""

    cdf: PiecewiseLinearCDF = field(default_factory=PiecewiseLinearCDF.uniform)
    true_threshold: float = 0.5
    noise: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.noise < 0.5):
            raise ValueError("noise must lie in [0, 1/2)")
        if not (self.cdf.lo <= self.true_threshold <= self.cdf.hi):
            raise ValueError("true threshold outside the support interval")
        object.__setattr__(self, "true_threshold", float(self.true_threshold))
        object.__setattr__(self, "noise", float(self.noise))

    @classmethod
    def uniform(cls, true_threshold: float = 0.5, noise: float = 0.0,
                lo: float = 0.0, hi: float = 1.0) -> "ThresholdTask":
        return cls(PiecewiseLinearCDF.uniform(lo, hi), true_threshold, noise)

    @property
    def lo(self) -> float:
        return self.cdf.lo

    @property
    def hi(self) -> float:
        return self.cdf.hi

    @property
    def domain(self) -> IntervalDomain:
        return IntervalDomain(self.lo, self.hi)


Task = Union[FiniteLabeledDistribution, ThresholdTask]


def finite_task(biases: Sequence[float], marginal: Sequence[float] | None = None) -> FiniteLabeledDistribution:
    return FiniteLabeledDistribution(np.asarray(biases, dtype=float),
                                     None if marginal is None else np.asarray(marginal, dtype=float))


def domain_of(obj: object) -> Domain:
    if isinstance(obj, (FiniteDomain, IntervalDomain)):
        return obj
    dom = getattr(obj, "domain", None)
    if dom is None:
        raise TypeError(f"{type(obj).__name__} has no domain")
    return dom
