"""Random-forest regression built from scratch on numpy.

CART trees split on the threshold that maximises the reduction in squared
error.  Candidate thresholds are midpoints between consecutive distinct
feature values inside the node, a sample goes left when ``x <= threshold``,
and exact ties in the gain go to the lowest feature index and then the
lowest threshold.  Each tree has its own seed derived from
``(random_state, tree_index)``, so the fitted forest does not depend on
``n_jobs``.
"""

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_matrix, check_positive_int, check_vector

_LEAF = -1


class Tree:
    """Flat array representation of one fitted regression tree."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def n_leaves(self):
        return int((self.feature == _LEAF).sum())

    def depth(self):
        d = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] != _LEAF:
                d[self.left[i]] = d[self.right[i]] = d[i] + 1
        return int(d.max())

    def predict(self, X):
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            f = self.feature[node]
            inner = f != _LEAF
            if not inner.any():
                return self.value[node]
            go_left = X[rows, np.where(inner, f, 0)] <= self.threshold[node]
            node = np.where(inner, np.where(go_left, self.left[node], self.right[node]), node)

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])


def _best_split(XT, y, order, features, min_samples_leaf):
    """Best split of one node as (gain, feature, threshold), or None.

    ``order`` holds, for every feature, the node's sample ids sorted by that
    feature's value (shape ``(p, n_node)``).
    """
    n = order.shape[1]
    rows = order if len(features) == len(order) else order[features]
    xs = XT[features[:, None], rows]
    ys = y[rows]
    yc = ys - ys[0].sum() / n
    left_sum = np.cumsum(yc, axis=1)[:, :-1]
    n_left = np.arange(1, n)
    n_right = n - n_left
    right_sum = left_sum[:, -1:] + yc[:, -1:] - left_sum
    gain = left_sum**2 / n_left + right_sum**2 / n_right
    valid = xs[:, 1:] > xs[:, :-1]
    if min_samples_leaf > 1:
        valid &= (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    gain[~valid] = -np.inf
    # argmax scans feature-major so ties resolve to the lowest feature, then threshold
    flat = int(np.argmax(gain))
    j, pos = divmod(flat, n - 1)
    if not gain[j, pos] > 0:
        return None
    lo, hi = xs[j, pos], xs[j, pos + 1]
    threshold = 0.5 * (lo + hi)
    # rounding can push the midpoint onto the upper value
    if threshold >= hi:
        threshold = lo
    return gain[j, pos], int(features[j]), float(threshold)


def build_tree(X, y, rng, max_depth=None, min_samples_split=2, min_samples_leaf=1, n_sub_features=None):
    n, p = X.shape
    n_sub = p if n_sub_features is None else n_sub_features
    XT = np.ascontiguousarray(X.T)
    all_features = np.arange(p)
    feature, threshold, left, right, value = [], [], [], [], []
    in_left = np.zeros(n, dtype=bool)

    def new_node():
        for arr, v in ((feature, _LEAF), (threshold, 0.0), (left, _LEAF), (right, _LEAF), (value, 0.0)):
            arr.append(v)
        return len(feature) - 1

    stack = [(new_node(), np.argsort(XT, axis=1, kind="stable"), 0)]
    while stack:
        node, order, depth = stack.pop()
        idx = order[0]
        yn = y[idx]
        lo, hi = yn.min(), yn.max()
        value[node] = lo if lo == hi else min(max(yn.sum() / len(idx), lo), hi)
        if lo == hi or len(idx) < min_samples_split or (max_depth is not None and depth >= max_depth):
            continue
        features = all_features if n_sub >= p else np.sort(rng.choice(p, n_sub, replace=False))
        split = _best_split(XT, y, order, features, min_samples_leaf)
        if split is None:
            continue
        _, f, t = split
        in_left[idx] = XT[f, idx] <= t
        m = in_left[order]
        n_l = int(m[0].sum())
        left_order = order[m].reshape(p, n_l)
        right_order = order[~m].reshape(p, len(idx) - n_l)
        in_left[idx] = False
        feature[node], threshold[node] = f, t
        left[node], right[node] = new_node(), new_node()
        # push right first so the left subtree is numbered first
        stack.append((right[node], right_order, depth + 1))
        stack.append((left[node], left_order, depth + 1))
    return Tree(feature, threshold, left, right, value)


def _fit_tree(X, y, seed, t, params):
    rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
    n = X.shape[0]
    if params["bootstrap"]:
        idx = rng.integers(0, n, n)
        X, y = X[idx], y[idx]
    return build_tree(
        X,
        y,
        rng,
        max_depth=params["max_depth"],
        min_samples_split=params["min_samples_split"],
        min_samples_leaf=params["min_samples_leaf"],
        n_sub_features=params["n_sub_features"],
    )


class RandomForestRegressor(RegressorMixin, BaseEstimator):
    """Bagged CART regression trees with per-node feature subsampling."""

    def __init__(
        self,
        n_estimators=100,
        max_depth=None,
        min_samples_split=2,
        min_samples_leaf=1,
        max_features=1.0,
        bootstrap=True,
        random_state=0,
        n_jobs=1,
    ):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _check_params(self):
        check_positive_int(self.n_estimators, "n_estimators")
        check_positive_int(self.min_samples_split, "min_samples_split", minimum=2)
        check_positive_int(self.min_samples_leaf, "min_samples_leaf")
        if self.max_depth is not None:
            check_positive_int(self.max_depth, "max_depth")
        if not 0 < float(self.max_features) <= 1:
            raise ValueError(f"max_features must be in (0, 1], got {self.max_features}")

    def fit(self, X, y, feature_names=None):
        self._check_params()
        X = check_matrix(X, "X", min_rows=2)
        y = check_vector(y, "y", length=X.shape[0])
        p = X.shape[1]
        params = {
            "bootstrap": bool(self.bootstrap),
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "n_sub_features": max(1, int(np.ceil(float(self.max_features) * p - 1e-12))),
        }
        seed = int(self.random_state)
        if self.n_jobs == 1:
            trees = [_fit_tree(X, y, seed, t, params) for t in range(self.n_estimators)]
        else:
            trees = Parallel(n_jobs=self.n_jobs)(
                delayed(_fit_tree)(X, y, seed, t, params) for t in range(self.n_estimators)
            )
        self.estimators_ = trees
        self.n_features_in_ = p
        self.feature_names_in_ = None if feature_names is None else np.asarray(feature_names, dtype=object)
        self.y_range_ = (float(y.min()), float(y.max()))
        return self

    def _check_X(self, X):
        check_is_fitted(self, "estimators_")
        X = check_matrix(X, "X")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, the forest was fitted on {self.n_features_in_}")
        return X

    def predict_trees(self, X):
        X = self._check_X(X)
        return np.vstack([t.predict(X) for t in self.estimators_])

    def predict(self, X):
        per_tree = self.predict_trees(X)
        return np.clip(per_tree.mean(axis=0), per_tree.min(axis=0), per_tree.max(axis=0))

    def to_dict(self):
        check_is_fitted(self, "estimators_")
        return {
            "params": self.get_params(),
            "n_features_in": self.n_features_in_,
            "feature_names": None if self.feature_names_in_ is None else list(self.feature_names_in_),
            "y_range": list(self.y_range_),
            "trees": [t.to_dict() for t in self.estimators_],
        }

    @classmethod
    def from_dict(cls, d):
        forest = cls(**d["params"])
        forest.estimators_ = [Tree.from_dict(t) for t in d["trees"]]
        forest.n_features_in_ = d["n_features_in"]
        names = d.get("feature_names")
        forest.feature_names_in_ = None if names is None else np.asarray(names, dtype=object)
        forest.y_range_ = tuple(d["y_range"])
        return forest
