"""Estimator plumbing shared by base learners and transforms.

Every learner is a scikit-learn estimator whose constructor arguments are its
parameters.  The core contract is ``learn(data, shared) -> Hypothesis`` plus
``sample_need()``; ``fit``/``predict`` wrap it for the usual workflow.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone
from sklearn.utils.validation import check_is_fitted, check_X_y, column_or_1d

from .core.data import Dataset
from .core.hypotheses import Draws, Hypothesis
from .core.randomness import SharedRandomness
from .core.tasks import FiniteDomain


def check_unit(name: str, value: float, *, closed_right: bool = False) -> float:
    value = float(value)
    ok = 0.0 < value <= 1.0 if closed_right else 0.0 < value < 1.0
    if not ok:
        interval = "(0, 1]" if closed_right else "(0, 1)"
        raise ValueError(f"{name} must lie in {interval}, got {value}")
    return value


def require_samples(data, need: int, who: str) -> None:
    if data.n < need:
        from .core.data import InsufficientData

        raise InsufficientData(f"{who} needs {need} samples, got {data.n}")


class Learner(BaseEstimator, ClassifierMixin):
    """Abstract learner: deterministic given (data, shared randomness)."""

    # True when the output ignores the shared randomness entirely
    deterministic = False

    def learn(self, data, shared: SharedRandomness) -> Hypothesis:
        raise NotImplementedError

    def sample_need(self) -> int:
        raise NotImplementedError

    @property
    def domain(self):
        base = getattr(self, "base", None)
        if base is None:
            raise AttributeError(f"{type(self).__name__} does not declare a domain")
        return base.domain

    def with_accuracy(self, alpha: float, beta: float) -> "Learner":
        # cloning walks constructor signatures, so memoize per instance
        cache = self.__dict__.setdefault("_accuracy_cache", {})
        key = (float(alpha), float(beta))
        if key not in cache:
            cache[key] = clone(self).set_params(alpha=alpha, beta=beta)
        return cache[key]

    def set_params(self, **params):
        self.__dict__.pop("_accuracy_cache", None)
        return super().set_params(**params)

    def sample_need_at(self, alpha: float, beta: float) -> int:
        return self.with_accuracy(alpha, beta).sample_need()

    def oracle_calls(self) -> float:
        """Number of base-learner invocations one call of ``learn`` makes."""
        return 1.0

    def learn_batch(self, data, k: int, shared: SharedRandomness) -> Sequence[Hypothesis]:
        """Run on ``k`` disjoint consecutive blocks; block ``i`` uses substream ("block", i)."""
        b = self.sample_need()
        blocks = data.split([b] * k)
        return [self.learn(blk, shared.substream("block", i)) for i, blk in enumerate(blocks)]

    def draw(self, data, count: int, shared: SharedRandomness) -> Draws:
        """``count`` runs on fresh disjoint blocks, all with the same random string."""
        b = self.sample_need()
        blocks = data.split([b] * count)
        return Draws.from_list([self.learn(blk, shared) for blk in blocks])

    # scikit-learn surface

    def fit(self, X, y, shared: SharedRandomness | None = None):
        dom = self.domain
        X = np.asarray(X)
        if X.ndim == 2 and X.shape[1] == 1:
            X = X[:, 0]
        X = column_or_1d(X)
        X2, y = check_X_y(X.reshape(-1, 1), y, dtype=np.int64 if isinstance(dom, FiniteDomain) else np.float64)
        if shared is None:
            shared = SharedRandomness(int(getattr(self, "random_state", None) or 0))
        self.hypothesis_ = self.learn(Dataset(X2[:, 0], np.where(y > 0, 1, -1), dom), shared)
        self.classes_ = np.array([-1, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "hypothesis_")
        X = np.asarray(X)
        if X.ndim == 2 and X.shape[1] == 1:
            X = X[:, 0]
        return self.hypothesis_.predict(X).astype(np.int64)
