"""The nine named meta-models.

Every model maps an instance-level feature matrix to one predicted value per
algorithm (a mean rank or a mean precision).  Rankings are obtained from the
predictions with ``predict_ranks``: the lowest predicted value ranks first.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_matrix, derive_seed
from .forest import RandomForestRegressor
from .targets import rank_with_ties

# kind -> (feature set or None, target kind)
META_KINDS = {
    "random": (None, "rank"),
    "mean": (None, "rank"),
    "ela": ("ela", "rank"),
    "non-inf": ("noninf", "rank"),
    "class": ("class", "rank"),
    "mean-precision": (None, "precision"),
    "mean-rank": (None, "rank"),
    "rf-precision": ("scale", "precision"),
    "rf-rank": ("scale", "rank"),
}
_FEATURE_FREE = ("random", "mean", "mean-precision", "mean-rank")

FOREST_DEFAULTS = {
    "n_estimators": 100,
    "max_depth": None,
    "min_samples_split": 2,
    "min_samples_leaf": 1,
    "max_features": 1.0,
    "bootstrap": True,
}


class MetaModel(RegressorMixin, BaseEstimator):
    """Predicts one target per algorithm from instance features.

    ``Y`` passed to ``fit`` has one column per algorithm.  Feature-free kinds
    accept ``X=None`` (or any matrix, which they ignore).
    """

    def __init__(self, kind="mean", forest_params=None, seed=0, n_jobs=1):
        self.kind = kind
        self.forest_params = forest_params
        self.seed = seed
        self.n_jobs = n_jobs

    @property
    def uses_features(self):
        return self.kind not in _FEATURE_FREE

    def fit(self, X, Y):
        if self.kind not in META_KINDS:
            raise ValueError(f"unknown meta-model kind {self.kind!r}; choose from {list(META_KINDS)}")
        Y = check_matrix(Y, "Y", min_rows=1)
        self.n_outputs_ = Y.shape[1]
        if self.kind == "random":
            self.constant_ = None
        elif not self.uses_features:
            self.constant_ = Y.mean(axis=0)
        else:
            X = check_matrix(X, "X", min_rows=2)
            if X.shape[0] != Y.shape[0]:
                raise ValueError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
            params = {**FOREST_DEFAULTS, **(self.forest_params or {})}
            self.forests_ = [
                RandomForestRegressor(random_state=derive_seed(self.seed, a), n_jobs=self.n_jobs, **params).fit(
                    X, Y[:, a]
                )
                for a in range(self.n_outputs_)
            ]
            self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X=None, n_rows=None):
        check_is_fitted(self, "n_outputs_")
        if X is not None:
            n_rows = np.asarray(X).shape[0]
        if n_rows is None:
            raise ValueError("need X or n_rows")
        if self.kind == "random":
            rng = np.random.default_rng(derive_seed(self.seed, 99))
            return np.vstack([rng.permutation(self.n_outputs_) + 1.0 for _ in range(n_rows)])
        if not self.uses_features:
            return np.tile(self.constant_, (n_rows, 1))
        X = check_matrix(X, "X")
        return np.column_stack([f.predict(X) for f in self.forests_])

    def predict_ranks(self, X=None, n_rows=None):
        return rank_with_ties(self.predict(X, n_rows))

    def to_dict(self):
        check_is_fitted(self, "n_outputs_")
        out = {"params": self.get_params(), "n_outputs": self.n_outputs_}
        if hasattr(self, "forests_"):
            out["forests"] = [f.to_dict() for f in self.forests_]
        elif self.constant_ is not None:
            out["constant"] = self.constant_.tolist()
        return out

    @classmethod
    def from_dict(cls, d):
        model = cls(**d["params"])
        model.n_outputs_ = d["n_outputs"]
        model.constant_ = None
        if "forests" in d:
            model.forests_ = [RandomForestRegressor.from_dict(f) for f in d["forests"]]
            model.n_features_in_ = model.forests_[0].n_features_in_
        elif "constant" in d:
            model.constant_ = np.asarray(d["constant"])
        return model


def _design(kind, features, keys):
    fset = META_KINDS[kind][0]
    if kind in _FEATURE_FREE:
        return None
    if features is None or fset not in features:
        raise ValueError(f"meta-model {kind!r} needs the {fset!r} feature table")
    table = features[fset]
    missing = [k for k in keys if tuple(k) not in table._row]
    if missing:
        raise KeyError(f"feature table {fset!r} lacks instances {missing[:3]}")
    return table.rows(keys)


def fit_meta(kind, targets, features=None, keys=None, forest_params=None, seed=0, n_jobs=1):
    """Fit a meta-model on the instances ``keys`` (default: all target rows).

    ``features`` maps feature-set name to FeatureTable.
    """
    if kind not in META_KINDS:
        raise ValueError(f"unknown meta-model kind {kind!r}; choose from {list(META_KINDS)}")
    expected = META_KINDS[kind][1]
    if targets.kind != expected:
        raise ValueError(f"meta-model {kind!r} needs {expected} targets, got {targets.kind}")
    keys = targets.keys if keys is None else [tuple(k) for k in keys]
    missing = [k for k in keys if k not in targets._row]
    if missing:
        raise KeyError(f"target table lacks instances {missing[:3]}")
    model = MetaModel(kind, forest_params=forest_params, seed=seed, n_jobs=n_jobs)
    model.fit(_design(kind, features, keys), targets.rows(keys))
    model.algorithms_ = targets.algorithms
    return model


def predict_values(model, keys, features=None):
    X = _design(model.kind, features, keys)
    return model.predict(X, n_rows=len(keys))


def predict_ranks(model, keys, features=None):
    """One rank vector per instance; lowest predicted value ranks 1."""
    return rank_with_ties(predict_values(model, keys, features))


__all__ = ["META_KINDS", "MetaModel", "fit_meta", "predict_ranks", "predict_values"]
