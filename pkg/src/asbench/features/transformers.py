"""Scikit-learn style transformers over sequences of DesignSamples.

``transform`` maps a list of samples to a ``(n_samples, n_features)`` array,
so the transformers compose with sklearn pipelines and ``get_params``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ela import FEATURE_NAMES as ELA_NAMES
from .ela import ela_values
from .extract import N_ELA
from .noninf import noninf_spec, noninf_values
from .sampling import DesignSample


def _check_samples(samples):
    samples = list(samples)
    if not samples:
        raise ValueError("expected at least one DesignSample")
    for s in samples:
        if not isinstance(s, DesignSample):
            raise TypeError(f"expected DesignSample, got {type(s).__name__}")
    return samples


class _SampleTransformer(TransformerMixin, BaseEstimator):
    def fit(self, samples, y=None):
        _check_samples(samples)
        self.feature_names_out_ = np.asarray(self._names(), dtype=object)
        self.n_features_out_ = len(self.feature_names_out_)
        return self

    def transform(self, samples):
        check_is_fitted(self, "feature_names_out_")
        return np.vstack([self._row(s) for s in _check_samples(samples)])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return self.feature_names_out_


class ELAFeatures(_SampleTransformer):
    def __init__(self, seed=0):
        self.seed = seed

    def _names(self):
        return list(ELA_NAMES)

    def _row(self, s):
        return ela_values(s.X, s.Y_scaled, seed=self.seed)[0]


class NonInformativeFeatures(_SampleTransformer):
    """Draws the recipe list at fit time; defaults to as many features as ELA."""

    def __init__(self, n_features=None, seed=0):
        self.n_features = n_features
        self.seed = seed

    def fit(self, samples, y=None):
        self.spec_ = noninf_spec(self.n_features or N_ELA, self.seed)
        return super().fit(samples, y)

    def _names(self):
        return self.spec_.names()

    def _row(self, s):
        return noninf_values(s.Y_scaled, self.spec_)


class ClassFeature(_SampleTransformer):
    def _names(self):
        return ["class"]

    def _row(self, s):
        return np.array([float(s.key[0])])


class ScaleFeature(_SampleTransformer):
    def _names(self):
        return ["f_scale"]

    def _row(self, s):
        return np.array([float(s.Y_raw.max() - s.Y_raw.min())])
