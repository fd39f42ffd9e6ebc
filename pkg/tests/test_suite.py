import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asbench.features import latin_hypercube
from asbench.suite import (
    BASE_FUNCTIONS,
    N_CLASSES,
    ProblemInstance,
    UnknownClassError,
    evaluate,
    list_suite,
    make_instance,
    rescale,
)

classes = st.integers(1, N_CLASSES)
instances = st.integers(1, 15)


@pytest.fixture(scope="module")
def suite():
    return list_suite(5, 15)


def test_make_instance_is_deterministic():
    a, b = make_instance(1, 1, 5), make_instance(1, 1, 5)
    assert a == b
    assert make_instance(1, 2, 5) != a


def test_unknown_class_raises():
    with pytest.raises(UnknownClassError):
        make_instance(25, 1, 5)
    with pytest.raises(UnknownClassError):
        make_instance(0, 1, 5)


def test_suite_size_and_order(suite):
    assert len(suite) == 360
    assert [i.key for i in suite] == sorted(i.key for i in suite)
    assert suite[0] == make_instance(1, 1, 5)
    one = list_suite(5, 1)
    assert len(one) == 24 and sorted({i.class_id for i in one}) == list(range(1, 25))


def test_x_opt_bounds_and_optimum_value(suite):
    for inst in suite:
        assert np.all(np.abs(inst.x_opt) <= 4.0)
        assert -100 <= inst.f_opt <= 100
        assert abs(evaluate(inst, inst.x_opt) - inst.f_opt) <= 1e-9


def test_rotations_are_orthogonal(suite):
    for inst in suite:
        for R in inst.rotations:
            assert np.max(np.abs(R.T @ R - np.eye(inst.dim))) <= 1e-10


def test_sphere_unit_vector():
    inst = ProblemInstance(class_id=1, instance_id=1, dim=5, x_opt=np.zeros(5), f_opt=0.0, base_id="sphere")
    assert evaluate(inst, np.array([1.0, 0, 0, 0, 0])) == 1.0


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        evaluate(make_instance(3, 1, 5), np.zeros(4))


def test_ellipsoid_range_exceeds_sphere_by_three_orders():
    X = latin_hypercube(10_000, 5, seed=11)
    r1 = np.ptp(make_instance(1, 1, 5).evaluate(X))
    r2 = np.ptp(make_instance(2, 1, 5).evaluate(X))
    assert r2 >= 1e3 * r1


def test_cross_class_ranges_span_six_orders():
    X = latin_hypercube(1250, 5, seed=3)
    ranges = [np.ptp(make_instance(c, 1, 5).evaluate(X)) for c in range(1, 25)]
    assert max(ranges) / min(ranges) >= 1e6


@given(classes, instances, st.integers(0, 2**31))
def test_objective_never_below_optimum(c, i, seed):
    inst = make_instance(c, i, 5)
    X = latin_hypercube(500, 5, seed=seed)
    assert np.all(inst.base_value(X) >= 0)
    assert np.all(inst.evaluate(X) >= inst.f_opt)


def test_nonnegativity_on_ten_thousand_points(suite):
    X = latin_hypercube(10_000, 5, seed=5)
    for inst in suite[::15]:
        assert inst.base_value(X).min() >= 0


@given(classes, instances, st.floats(1e-3, 1e3), st.integers(0, 1000))
def test_rescale_identity_holds(c, i, factor, seed):
    inst = make_instance(c, i, 5)
    scaled = rescale(inst, factor)
    x = np.random.default_rng(seed).uniform(-5, 5, size=(20, 5))
    lhs = evaluate(scaled, x) - factor * inst.f_opt
    rhs = factor * (evaluate(inst, x) - inst.f_opt)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * factor * max(1.0, abs(inst.f_opt)))
    assert np.array_equal(scaled.x_opt, inst.x_opt)
    assert scaled.evaluate(scaled.x_opt) == scaled.f_opt


def test_rescale_by_one_is_identity():
    inst = make_instance(7, 3, 5)
    X = latin_hypercube(200, 5, seed=1)
    assert np.array_equal(rescale(inst, 1.0).evaluate(X), inst.evaluate(X))


@pytest.mark.parametrize("factor", [0.0, -1.0, float("nan")])
def test_rescale_rejects_non_positive(factor):
    with pytest.raises(ValueError):
        rescale(make_instance(1, 1, 5), factor)


@given(classes, st.floats(1e-3, 1e3), st.integers(0, 1000))
def test_rescale_preserves_order_and_argmin(c, factor, seed):
    inst = make_instance(c, 1, 5)
    X = np.random.default_rng(seed).uniform(-5, 5, size=(50, 5))
    a, b = inst.precision(X), rescale(inst, factor).precision(X)
    assert np.argmin(a) == np.argmin(b)
    assert np.all(np.sign(a[:, None] - a[None, :]) * np.sign(b[:, None] - b[None, :]) >= 0)


def test_catalog_has_24_named_functions():
    assert sorted(BASE_FUNCTIONS) == list(range(1, 25))
    assert len({v[0] for v in BASE_FUNCTIONS.values()}) == 24
