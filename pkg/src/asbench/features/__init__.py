from .ela import FEATURE_NAMES as ELA_FEATURE_NAMES
from .ela import ela_values
from .extract import (
    FEATURE_SETS,
    N_ELA,
    SAMPLES_PER_DIM,
    FeatureTable,
    FeatureVector,
    class_feature,
    ela_features,
    extract_features,
    noninf_features,
    sample_seed,
    scale_feature,
)
from .noninf import GeneratorSpec, noninf_spec, noninf_values
from .sampling import DesignSample, latin_hypercube, lhs_sample, minmax_scale
from .transformers import ClassFeature, ELAFeatures, NonInformativeFeatures, ScaleFeature

__all__ = [
    "ClassFeature",
    "DesignSample",
    "ELAFeatures",
    "ELA_FEATURE_NAMES",
    "FEATURE_SETS",
    "FeatureTable",
    "FeatureVector",
    "GeneratorSpec",
    "N_ELA",
    "NonInformativeFeatures",
    "SAMPLES_PER_DIM",
    "ScaleFeature",
    "class_feature",
    "ela_features",
    "ela_values",
    "extract_features",
    "latin_hypercube",
    "lhs_sample",
    "minmax_scale",
    "noninf_features",
    "noninf_spec",
    "noninf_values",
    "sample_seed",
    "scale_feature",
]
