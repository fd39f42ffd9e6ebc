import itertools
import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from asbench.evaluation import friedman, lio_splits, lpo_splits, mse, pre, wilcoxon_signed_rank
from asbench.evaluation.splits import SplitPlan

KEYS = [(c, i) for c in range(1, 25) for i in range(1, 16)]


def _pre_oracle(p, t):
    k = len(p)
    bad = sum(np.sign(p[i] - p[j]) != np.sign(t[i] - t[j]) for i in range(k) for j in range(k) if i != j)
    return bad / (k * (k - 1))


perms = st.permutations([1.0, 2.0, 3.0, 4.0, 5.0])
tied = st.lists(st.integers(1, 3).map(float), min_size=5, max_size=5)


def test_pre_examples():
    assert pre([1, 2, 3, 4, 5], [1, 2, 3, 4, 5]) == 0.0
    assert pre([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]) == 1.0
    assert pre([1, 2, 3], [1, 3, 2]) == pytest.approx(1 / 3)
    assert pre([1, 1, 3], [1, 2, 3]) == pytest.approx(2 / 6)


@given(st.one_of(perms, tied), st.one_of(perms, tied))
def test_pre_matches_pairwise_oracle(p, t):
    assert pre(p, t) == pytest.approx(_pre_oracle(p, t), abs=1e-15)
    assert pre(p, t) == pre(t, p)
    assert 0.0 <= pre(p, t) <= 1.0


@given(perms, perms)
def test_pre_values_on_grid(p, t):
    assert (pre(p, t) * 10) == pytest.approx(round(pre(p, t) * 10))


def test_pre_rowwise_and_shape_checks():
    a = np.array([[1, 2, 3], [3, 2, 1]], dtype=float)
    assert np.array_equal(pre(a, a[[0, 0]]), [0.0, 1.0])
    with pytest.raises(ValueError):
        pre([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        pre([1], [1])


def test_pre_random_expectation_over_all_permutations():
    allp = np.array(list(itertools.permutations(range(1, 6))), dtype=float)
    assert np.mean(pre(allp, np.tile(np.arange(1.0, 6.0), (len(allp), 1)))) == pytest.approx(0.5)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=20), st.floats(0.1, 10))
def test_mse_homogeneity(v, c):
    v = np.array(v)
    t = np.zeros_like(v)
    assert mse(c * v, c * t) == pytest.approx(c * c * mse(v, t), rel=1e-9, abs=1e-12)
    assert mse(v, v) == 0.0


def test_mse_errors():
    with pytest.raises(ValueError):
        mse([1, 2], [1])
    with pytest.raises(ValueError):
        mse([], [])


@given(st.lists(st.integers(-20, 20), min_size=8, max_size=40), st.integers(0, 1000))
def test_wilcoxon_matches_scipy(d, seed):
    d = np.array(d, dtype=float)
    if np.count_nonzero(d) < 6:
        return
    b = np.random.default_rng(seed).normal(size=d.size)
    ours = wilcoxon_signed_rank(b + d, b)
    ref = scipy.stats.wilcoxon(b + d, b, method="approx", correction=False, zero_method="wilcox")
    assert ours.statistic == pytest.approx(ref.statistic)
    assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-12)
    swapped = wilcoxon_signed_rank(b, b + d)
    assert swapped.statistic == ours.statistic and swapped.p_value == pytest.approx(ours.p_value)


def test_wilcoxon_hand_example():
    d = np.array([3.0, -1, 4, -2, 5, 6, 7, 8])
    res = wilcoxon_signed_rank(d, np.zeros(8))
    assert res.statistic == 3.0 and res.n == 8
    z = (3 - 18) / math.sqrt(8 * 9 * 17 / 24)
    assert res.p_value == pytest.approx(2 * scipy.stats.norm.cdf(z))


def test_wilcoxon_degenerate_cases():
    assert wilcoxon_signed_rank(np.ones(10), np.ones(10)).p_value == 1.0
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1, 2, 3], [0, 0, 0])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1, 2], [1, 2, 3])


@given(st.integers(0, 10_000), st.integers(3, 24), st.integers(2, 5), st.booleans())
def test_friedman_matches_scipy(seed, n, k, with_ties):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, 4, (n, k)).astype(float) if with_ties else rng.normal(size=(n, k))
    if k < 3 or np.all(M == M[:, :1]):
        return
    ours = friedman(M)
    ref = scipy.stats.friedmanchisquare(*M.T)
    assert ours.statistic == pytest.approx(ref.statistic, rel=1e-9)
    assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-15)


def test_friedman_hand_example_and_degenerate():
    ranks = np.array([[1, 2, 3, 4], [1, 3, 2, 4], [1, 2, 4, 3], [2, 1, 3, 4], [1, 2, 3, 4], [1, 3, 2, 4]], float)
    assert friedman(ranks).statistic == pytest.approx(13.6)
    assert friedman(np.ones((5, 4))).p_value == 1.0
    with pytest.raises(ValueError):
        friedman(np.ones((1, 4)))


def test_lio_default_split_sizes():
    plans = lio_splits(KEYS, seed=3)
    assert len(plans) == 10
    for plan in plans:
        assert len(plan.test) == 24 * 5 and len(plan.train) == 24 * 10
        assert set(plan.train) | set(plan.test) == set(KEYS)
    assert plans[0].test != plans[1].test
    assert [p.test for p in lio_splits(KEYS, seed=3)] == [p.test for p in plans]


@given(st.integers(0, 2**31), st.integers(2, 9), st.floats(0.05, 0.95))
def test_lio_every_class_on_both_sides(seed, m, frac):
    keys = [(c, i) for c in range(1, 5) for i in range(1, m + 1)]
    n_test = math.ceil(m * frac - 1e-9)
    if not 1 <= n_test < m:
        with pytest.raises(ValueError):
            lio_splits(keys, frac, 2, seed)
        return
    for plan in lio_splits(keys, frac, 3, seed):
        assert not set(plan.train) & set(plan.test)
        for c in range(1, 5):
            assert sum(k[0] == c for k in plan.test) == n_test
            assert sum(k[0] == c for k in plan.train) == m - n_test


def test_lpo_folds():
    plans = lpo_splits(KEYS)
    assert [p.fold_id for p in plans] == list(range(1, 25))
    for p in plans:
        assert {k[0] for k in p.test} == {p.fold_id}
        assert p.fold_id not in {k[0] for k in p.train}
        assert len(p.test) == 15 and len(p.train) == 345
    with pytest.raises(ValueError):
        lpo_splits([(1, 1), (1, 2)])


def test_plan_rejects_overlap():
    with pytest.raises(ValueError, match="overlap"):
        SplitPlan("LIO", 0, ((1, 1),), ((1, 1),))
