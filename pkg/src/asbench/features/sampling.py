from dataclasses import dataclass

import numpy as np

from .._validation import check_positive_int
from ..suite import LOWER, UPPER


@dataclass(frozen=True, eq=False)
class DesignSample:
    """Evaluated Latin hypercube sample of one instance."""

    key: tuple
    X: np.ndarray
    Y_raw: np.ndarray
    Y_scaled: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]


def minmax_scale(y):
    y = np.asarray(y, dtype=float)
    lo, hi = y.min(), y.max()
    if hi == lo:
        return np.zeros_like(y)
    # clip guards the endpoints against rounding in the division
    return np.clip((y - lo) / (hi - lo), 0.0, 1.0)


def latin_hypercube(n, dim, seed, low=LOWER, high=UPPER):
    """One point per stratum of ``[low, high]`` in every coordinate."""
    check_positive_int(n, "n", minimum=2)
    rng = np.random.default_rng(seed)
    X = np.empty((n, dim))
    for j in range(dim):
        strata = rng.permutation(n)
        X[:, j] = low + (high - low) * (strata + rng.random(n)) / n
    return X


def lhs_sample(instance, n, seed):
    X = latin_hypercube(n, instance.dim, seed)
    y = np.asarray(instance.evaluate(X), dtype=float)
    return DesignSample(key=instance.key, X=X, Y_raw=y, Y_scaled=minmax_scale(y))
