import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from asbench.features import (
    ELA_FEATURE_NAMES,
    N_ELA,
    ClassFeature,
    DesignSample,
    ELAFeatures,
    FeatureTable,
    FeatureVector,
    GeneratorSpec,
    NonInformativeFeatures,
    ScaleFeature,
    class_feature,
    ela_features,
    ela_values,
    extract_features,
    latin_hypercube,
    lhs_sample,
    minmax_scale,
    noninf_features,
    noninf_spec,
    noninf_values,
    scale_feature,
)
from asbench.features.noninf import AGGREGATES, SCALARS, TRANSFORMS
from asbench.suite import list_suite, make_instance, rescale


@given(st.integers(2, 300), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_lhs_one_point_per_stratum(n, dim, seed):
    X = latin_hypercube(n, dim, seed)
    assert X.shape == (n, dim)
    bins = np.floor((X + 5.0) / 10.0 * n).astype(int)
    for j in range(dim):
        assert sorted(bins[:, j]) == list(range(n))


def test_lhs_sample_shape_and_determinism():
    inst = make_instance(3, 1, 5)
    a = lhs_sample(inst, 250 * 5, seed=4)
    b = lhs_sample(inst, 250 * 5, seed=4)
    assert a.n == 1250 and a.dim == 5
    assert np.array_equal(a.X, b.X)
    assert np.array_equal(a.Y_raw, inst.evaluate(a.X))
    assert a.Y_scaled.min() == 0.0 and a.Y_scaled.max() == 1.0


def test_minmax_scale_constant_is_zero():
    assert np.array_equal(minmax_scale(np.full(7, 3.3)), np.zeros(7))


def test_noninf_template_example():
    spec = GeneratorSpec(triples=((2.0, "square", "mean"),), seed=0)
    assert noninf_values(np.array([1.0, 2.0]), spec)[0] == 10.0


def test_noninf_constant_std_is_zero():
    spec = GeneratorSpec(triples=((5.0, "log1p", "std"),), seed=0)
    assert noninf_features(np.zeros(50), spec).values == {spec.names()[0]: 0.0}


def test_noninf_spec_draws():
    spec = noninf_spec(85, 3)
    assert len(spec) == 85
    for sc, tr, agg in spec.triples:
        assert sc in SCALARS and tr in TRANSFORMS and agg in AGGREGATES
    assert noninf_spec(85, 3) == spec
    assert noninf_spec(85, 4) != spec


@given(st.lists(st.floats(0, 1), min_size=2, max_size=60), st.integers(0, 1000), st.integers(0, 1000))
def test_noninf_permutation_invariant(y, spec_seed, perm_seed):
    y = np.array(y)
    spec = noninf_spec(20, spec_seed)
    perm = np.random.default_rng(perm_seed).permutation(len(y))
    np.testing.assert_allclose(noninf_values(y, spec), noninf_values(y[perm], spec), rtol=1e-12, atol=1e-12)


@given(st.integers(1, 200), st.integers(0, 1000))
def test_noninf_defined_on_scaled_range(m, seed):
    y = np.linspace(0, 1, 33)
    assert np.all(np.isfinite(noninf_values(y, noninf_spec(m, seed))))


def test_ela_linear_fit_is_exact():
    X = latin_hypercube(1250, 5, seed=8)
    values, flags = ela_values(X, minmax_scale(X[:, 0]), seed=0)
    got = dict(zip(ELA_FEATURE_NAMES, values))
    assert abs(got["meta.lin_simple.adj_r2"] - 1.0) <= 1e-9
    assert "meta:lin_simple:singular" not in flags


def test_ela_catalog_size_and_determinism():
    s = lhs_sample(make_instance(17, 2, 5), 1250, 5)
    a, b = ela_features(s), ela_features(s)
    assert len(a.values) == N_ELA == 46
    assert a == b
    assert all(np.isfinite(list(a.values.values())))


def test_ela_needs_enough_points():
    s = lhs_sample(make_instance(1, 1, 5), 40, 1)
    with pytest.raises(ValueError):
        ela_features(s)


def test_ela_constant_fitness_is_flagged():
    X = latin_hypercube(100, 5, seed=1)
    values, flags = ela_values(X, np.zeros(100))
    assert "distr:constant" in flags and any(f.startswith("meta:") for f in flags)
    assert np.all(np.isfinite(values))


def test_rastrigin_has_more_peaks_than_sphere():
    peaks = {}
    idx = ELA_FEATURE_NAMES.index("distr.number_of_peaks")
    for c in (1, 3):
        counts = []
        for s in range(30):
            sample = lhs_sample(make_instance(c, 1 + s % 15, 5), 1250, s)
            counts.append(ela_values(sample.X, sample.Y_scaled)[0][idx])
        peaks[c] = np.median(counts)
    assert peaks[3] > peaks[1]


def test_class_feature_examples():
    assert class_feature(make_instance(7, 3, 5)).values == {"class": 7.0}
    vecs = {tuple(class_feature(make_instance(24, i, 5)).values.items()) for i in range(1, 16)}
    assert vecs == {(("class", 24.0),)}
    assert class_feature(rescale(make_instance(7, 3, 5), 1000)).values == {"class": 7.0}


def _sample(y):
    y = np.asarray(y, dtype=float)
    return DesignSample((1, 1), np.zeros((len(y), 2)), y, minmax_scale(y))


def test_scale_feature_examples():
    assert scale_feature(_sample([0.0, 10.0])).values == {"f_scale": 10.0}
    assert scale_feature(_sample([4.0, 4.0, 4.0])).values == {"f_scale": 0.0}


@given(st.integers(1, 24), st.floats(1e-3, 1e3))
def test_scale_feature_is_linear_and_others_invariant(c, factor):
    inst = make_instance(c, 1, 5)
    a = lhs_sample(inst, 300, 2)
    b = lhs_sample(rescale(inst, factor), 300, 2)
    fa, fb = scale_feature(a).values["f_scale"], scale_feature(b).values["f_scale"]
    assert fb == pytest.approx(factor * fa, rel=1e-9)
    spec = noninf_spec(46, 1)
    np.testing.assert_allclose(noninf_features(a, spec).to_array(), noninf_features(b, spec).to_array(), atol=1e-8)


@pytest.mark.parametrize("c", [1, 8, 15, 21])
def test_ela_invariant_to_rescaling(c):
    inst = make_instance(c, 1, 5)
    a = ela_features(lhs_sample(inst, 1250, 6)).to_array()
    b = ela_features(lhs_sample(rescale(inst, 1e2), 1250, 6)).to_array()
    np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-6)


def test_noninf_within_class_tighter_than_across():
    table = extract_features(list_suite(5, 15), "noninf", seed=1, samples_per_dim=50)
    V, cls = table.values, np.array([k[0] for k in table.keys])
    D = np.sqrt(((V[:, None, :] - V[None, :, :]) ** 2).sum(-1))
    same = cls[:, None] == cls[None, :]
    off = ~np.eye(len(cls), dtype=bool)
    assert np.median(D[same & off]) < np.median(D[~same])


def test_feature_vector_rejects_nonfinite():
    with pytest.raises(ValueError):
        FeatureVector({"a": float("nan")}, "ela")
    with pytest.raises(ValueError):
        FeatureVector({"a": 1.0}, "other")


def test_feature_table_round_trip(tmp_path):
    suite = list_suite(5, 1)[:4]
    for fs in ("ela", "noninf", "class", "scale"):
        table = extract_features(suite, fs, seed=3, samples_per_dim=20)
        table.to_csv(tmp_path / f"{fs}.csv", "digest=abc")
        back = FeatureTable.from_csv(tmp_path / f"{fs}.csv")
        assert back == table and back.tag == fs


def test_all_sets_share_one_sample_per_instance():
    suite = list_suite(5, 1)[:3]
    ela = extract_features(suite, "ela", seed=2, samples_per_dim=20)
    scale = extract_features(suite, "scale", seed=2, samples_per_dim=20)
    assert ela.keys == scale.keys
    assert np.all(scale.values > 0)


def test_transformers_follow_estimator_api():
    samples = [lhs_sample(make_instance(c, 1, 5), 100, c) for c in (1, 2, 3)]
    for est, width in ((ELAFeatures(seed=1), 46), (NonInformativeFeatures(), 46), (ClassFeature(), 1),
                       (ScaleFeature(), 1)):
        with pytest.raises(NotFittedError):
            est.transform(samples)
        out = clone(est).fit(samples).transform(samples)
        assert out.shape == (3, width)
        assert len(est.fit(samples).get_feature_names_out()) == width
    assert NonInformativeFeatures(n_features=12, seed=4).get_params() == {"n_features": 12, "seed": 4}
    assert np.array_equal(ClassFeature().fit_transform(samples)[:, 0], [1.0, 2.0, 3.0])
    with pytest.raises(TypeError):
        ELAFeatures().fit([np.zeros(3)])
