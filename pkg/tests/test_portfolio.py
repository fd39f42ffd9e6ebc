import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from asbench.portfolio import (
    ALGORITHMS,
    RunRecord,
    RunTable,
    population_size,
    run,
    run_batch,
    run_portfolio,
    run_seed,
    run_streams,
)
from asbench.suite import list_suite, make_instance, rescale

BUDGET = 5000
algorithms = st.sampled_from(ALGORITHMS)


@pytest.fixture(scope="module")
def sphere():
    return make_instance(1, 1, 5)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_same_seed_same_result(alg, sphere):
    a = run(alg, sphere, 1000, seed=123)
    b = run(alg, sphere, 1000, seed=123)
    assert a.best_f == b.best_f and a.precision == b.precision
    assert a.evals_used <= 1000


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_full_budget_respected(alg):
    rec = run(alg, make_instance(3, 2, 5), BUDGET, seed=9)
    assert rec.evals_used <= BUDGET
    assert rec.evals_used == (BUDGET // population_size(alg, 5)) * population_size(alg, 5)
    assert rec.best_f >= rec.best_f - rec.precision  # best_f is never below f_opt
    assert rec.precision >= 0


def test_population_sizes():
    assert [population_size(a, 5) for a in ALGORITHMS] == [100, 100, 25, 140, 8]


def test_budget_below_population_raises(sphere):
    with pytest.raises(ValueError):
        run("ES", sphere, 139, seed=0)
    with pytest.raises(ValueError):
        run("SA", sphere, 1000, seed=0)


def test_cmaes_solves_sphere(sphere):
    seeds = [run_seed(7, 1, 1, "CMAES", r) for r in range(30)]
    best, _ = run_batch("CMAES", sphere, BUDGET, seeds)
    assert np.all(best < 1e-6)


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_batch_equals_single_runs(alg):
    inst = make_instance(13, 1, 5)
    seeds = [11, 22, 33]
    best, _ = run_batch(alg, inst, 1000, seeds)
    singles = [run_batch(alg, inst, 1000, [s])[0][0] for s in seeds]
    assert np.array_equal(best, singles)


@pytest.mark.parametrize("alg", ALGORITHMS)
@pytest.mark.parametrize("factor", [1e-2, 1e-1, 10.0, 100.0])
def test_rescaled_runs_follow_identical_trajectories(alg, factor):
    inst = make_instance(10, 1, 5)
    seeds = [run_seed(1, 10, 1, alg, r) for r in range(5)]
    base, _ = run_batch(alg, inst, 2000, seeds)
    scaled, _ = run_batch(alg, rescale(inst, factor), 2000, seeds)
    np.testing.assert_allclose(scaled, factor * base, rtol=1e-9, atol=0)


@given(algorithms, st.integers(1, 24), st.integers(0, 2**32 - 1))
def test_best_so_far_is_monotone(alg, c, seed):
    _, _, hist = run_batch(alg, make_instance(c, 1, 5), 1500, [seed], return_history=True)
    assert np.all(np.diff(hist[0]) <= 0)


@given(st.sampled_from(("GA", "DE", "ES", "CMAES")), st.integers(1, 24), st.integers(0, 2**32 - 1),
       st.integers(150, 1500))
def test_truncated_budget_never_improves(alg, c, seed, small):
    inst = make_instance(c, 2, 5)
    short, _ = run_batch(alg, inst, small, [seed])
    full, _ = run_batch(alg, inst, 1500, [seed])
    assert short[0] >= full[0]


def test_portfolio_counts_and_seeds():
    suite = list_suite(5, 1)[:2]
    table = run_portfolio(suite, 500, 3, master_seed=5)
    assert len(table) == 2 * 5 * 3
    table.check_complete(3)
    rec = table.lookup(2, 1, "DE")[1]
    assert rec.seed == run_seed(5, 2, 1, "DE", 1)
    assert table.matrix((2, 1)).shape == (3, 5)


def test_worker_count_does_not_change_results():
    suite = list_suite(5, 1)[:2]
    assert run_portfolio(suite, 500, 2, 5, n_jobs=1) == run_portfolio(suite, 500, 2, 5, n_jobs=2)


def test_streams_match_separate_runs():
    suite = list_suite(5, 1)[20:21]
    both = run_streams(suite, 500, {"train": 2, "truth": 3}, 4)
    assert both["train"] == run_portfolio(suite, 500, 2, 4, stream="train")
    assert both["truth"] == run_portfolio(suite, 500, 3, 4, stream="truth")


def test_streams_use_disjoint_seeds():
    seeds = {s: {run_seed(1, 1, 1, "GA", r, s) for r in range(100)} for s in ("train", "truth", "audit")}
    assert not (seeds["train"] & seeds["truth"]) and not (seeds["truth"] & seeds["audit"])


def test_run_seed_is_independent_of_scale():
    inst = make_instance(4, 1, 5)
    a = run("GA", inst, 500, run_seed(1, 4, 1, "GA", 0))
    b = run("GA", rescale(inst, 100.0), 500, run_seed(1, 4, 1, "GA", 0))
    assert b.seed == a.seed and b.scale_factor == 100.0
    assert b.precision == pytest.approx(100 * a.precision, rel=1e-9)


def test_csv_round_trip(tmp_path):
    table = run_portfolio(list_suite(5, 1)[:1], 300, 2, 3, algorithms=("GA", "PSO"))
    path = tmp_path / "runs.csv"
    table.to_csv(path, "digest=x")
    assert RunTable.from_csv(path) == table
    assert path.read_text().splitlines()[1].startswith("class_id,instance_id,algorithm")


def test_unequal_repetitions_rejected():
    recs = [RunRecord(1, 1, a, r, 0, 0.0, 10) for a in ALGORITHMS for r in range(2)]
    recs.append(RunRecord(1, 1, "GA", 2, 0, 0.0, 10))
    with pytest.raises(ValueError):
        RunTable(recs).matrix((1, 1))
    with pytest.raises(ValueError):
        RunTable(recs).check_complete()
