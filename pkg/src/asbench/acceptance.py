"""Acceptance criteria 1-10.

Criteria 1-6 are read off a finished ``report.json``; criteria 7-10 are
self-contained property suites that run in seconds.
"""

from collections import namedtuple

import numpy as np

Criterion = namedtuple("Criterion", "number name passed detail")


def _get(report, *path):
    node = report
    for p in path:
        if not isinstance(node, dict) or p not in node:
            return None
        node = node[p]
    return node


def _missing(number, name, what):
    return Criterion(number, name, False, f"report has no {what} section")


def criterion_1(report):
    name = "random baseline PRE near 0.5"
    lio = _get(report, "leakage", "LIO", "median_pre", "random")
    lpo = _get(report, "leakage", "LPO", "median_pre", "random")
    if lio is None or lpo is None:
        return _missing(1, name, "leakage")
    ok = 0.45 <= lio <= 0.55 and 0.45 <= lpo <= 0.55
    return Criterion(1, name, ok, f"LIO {lio:.4f}, LPO {lpo:.4f} (need both in [0.45, 0.55])")


def criterion_2(report):
    name = "LIO leakage ordering"
    med = _get(report, "leakage", "LIO", "median_pre")
    if med is None:
        return _missing(2, name, "leakage")
    c, e, n, m, r = (med[k] for k in ("class", "ela", "non-inf", "mean", "random"))
    ok = c < min(e, n) and max(e, n) < m < r and c <= 0.15 and m - c >= 0.10
    detail = f"class {c:.4f}, ela {e:.4f}, non-inf {n:.4f}, mean {m:.4f}, random {r:.4f}"
    return Criterion(2, name, ok, detail)


def criterion_3(report):
    name = "LPO collapse"
    med = _get(report, "leakage", "LPO", "median_pre")
    tests = _get(report, "leakage", "LPO", "wilcoxon")
    if med is None or tests is None:
        return _missing(3, name, "leakage")
    gaps = {m: abs(med[m] - med["mean"]) for m in ("class", "non-inf")}
    ps = {m: tests[f"{m}_vs_mean"]["p_value"] for m in ("class", "non-inf")}
    ok = all(g <= 0.07 for g in gaps.values()) and all(p >= 0.05 for p in ps.values())
    detail = ", ".join(f"{m}: |gap| {gaps[m]:.4f}, p {ps[m]:.4f}" for m in gaps)
    return Criterion(3, name, ok, detail + " (need gap <= 0.07, p >= 0.05)")


def criterion_4(report):
    name = "scale-sensitive MSE advantage"
    sc = report.get("scale")
    if sc is None:
        return _missing(4, name, "scale")
    wins, ratio, p = sc["rf_wins"], sc["median_mse_ratio"], sc["wilcoxon_mse"]["p_value"]
    ratio = float(ratio)
    ok = wins >= 20 and ratio >= 10 and p < 0.05
    return Criterion(4, name, ok, f"rf wins {wins}/24, median MSE ratio {ratio:.3g}, Wilcoxon p {p:.3g}")


def criterion_5(report):
    name = "PRE equalisation (Friedman)"
    p = _get(report, "scale", "friedman_pre", "p_value")
    if p is None:
        return _missing(5, name, "scale")
    return Criterion(5, name, p >= 0.05, f"Friedman p {p:.4f} (need >= 0.05)")


def criterion_6(report):
    name = "rescaling dichotomy"
    checks = _get(report, "scale", "rescaling", "checks")
    if checks is None:
        return _missing(6, name, "scale")
    return Criterion(6, name, all(checks.values()), ", ".join(f"{k}={v}" for k, v in checks.items()))


def evaluate_report(report):
    return [f(report) for f in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6)]


# property suites -----------------------------------------------------------


def criterion_7(n_draws=100_000, seed=0):
    from .evaluation import pre

    checks = {
        "identical": pre([1, 2, 3, 4, 5], [1, 2, 3, 4, 5]) == 0.0,
        "reversed": pre([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]) == 1.0,
        "one swap": abs(pre([1, 2, 3], [1, 3, 2]) - 1 / 3) < 1e-12,
    }
    rng = np.random.default_rng(seed)
    a = np.argsort(rng.random((2000, 5)), axis=1) + 1.0
    b = np.argsort(rng.random((2000, 5)), axis=1) + 1.0
    checks["symmetry"] = np.array_equal(pre(a, b), pre(b, a))
    vals = pre(a, b) * 10
    checks["multiples of 2/(k(k-1))"] = bool(np.allclose(vals, np.round(vals), atol=1e-12))
    draws = np.argsort(rng.random((n_draws, 5)), axis=1) + 1.0
    mc = float(np.mean(pre(draws, np.tile([1.0, 2, 3, 4, 5], (n_draws, 1)))))
    checks["random expectation"] = abs(mc - 0.5) <= 0.01
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    return Criterion(7, "PRE unit suite", ok, f"MC mean {mc:.4f}" + (f"; failed {failed}" if failed else ""))


def criterion_8(seed=0):
    from .forest import RandomForestRegressor

    rng = np.random.default_rng(seed)
    checks = {}
    X = rng.normal(size=(60, 4))
    checks["constant target"] = bool(
        np.all(RandomForestRegressor(n_estimators=10).fit(X, np.full(60, 4.2)).predict(rng.normal(size=(20, 4))) == 4.2)
    )
    y = rng.normal(size=60)
    single = RandomForestRegressor(n_estimators=1, bootstrap=False).fit(X, y)
    checks["interpolation"] = float(np.mean((single.predict(X) - y) ** 2)) == 0.0
    Xs = rng.uniform(-1, 1, (200, 3))
    ys = (Xs[:, 0] > 0).astype(float)
    Xh = rng.uniform(-1, 1, (1000, 3))
    step_mse = float(np.mean((RandomForestRegressor(random_state=1).fit(Xs, ys).predict(Xh) - (Xh[:, 0] > 0)) ** 2))
    checks["step function"] = step_mse < 0.05
    forest = RandomForestRegressor(n_estimators=20, random_state=3).fit(X, y)
    pred = forest.predict(rng.normal(scale=5, size=(500, 4)))
    checks["within target range"] = bool(np.all((pred >= y.min()) & (pred <= y.max())))
    par = RandomForestRegressor(n_estimators=20, random_state=3, n_jobs=2).fit(X, y)
    Xt = rng.normal(size=(100, 4))
    checks["parallel determinism"] = np.array_equal(forest.predict(Xt), par.predict(Xt))
    failed = [k for k, v in checks.items() if not v]
    return Criterion(8, "forest oracle suite", not failed, f"step MSE {step_mse:.4g}" + (f"; failed {failed}" if failed else ""))


# hand-worked cases: differences +3 -1 +4 -2 +5 +6 +7 +8 give W- = 1 + 2 = 3;
# the 6x4 matrix below has column rank sums 7, 13, 17, 23, so
# chi2 = 12 / (6*4*5) * (49 + 169 + 289 + 529) - 3*6*5 = 13.6
WILCOXON_CASE = (np.array([3.0, -1.0, 4.0, -2.0, 5.0, 6.0, 7.0, 8.0]), 3.0)
FRIEDMAN_RANKS = np.array(
    [[1, 2, 3, 4], [1, 3, 2, 4], [1, 2, 4, 3], [2, 1, 3, 4], [1, 2, 3, 4], [1, 3, 2, 4]], dtype=float
)
FRIEDMAN_STAT = 13.6


def criterion_9():
    from .evaluation import friedman, wilcoxon_signed_rank

    d, w_expected = WILCOXON_CASE
    b = np.linspace(1.0, 2.0, d.size)
    w = wilcoxon_signed_rank(b + d, b)
    f = friedman(0.25 * FRIEDMAN_RANKS + np.arange(6)[:, None])
    ok = abs(w.statistic - w_expected) <= 1e-6 and abs(f.statistic - FRIEDMAN_STAT) <= 1e-6
    return Criterion(9, "statistical-test oracle suite", ok,
                     f"W {w.statistic:g} (expect 3), chi2 {f.statistic:.6f} (expect 13.6)")


def criterion_10(n_plans=1000, seed=0):
    from .evaluation import lio_splits, lpo_splits

    keys = [(c, i) for c in range(1, 25) for i in range(1, 16)]
    full = set(keys)
    bad = []
    for plan in lio_splits(keys, n_repeats=n_plans, seed=seed):
        tr, te = set(plan.train), set(plan.test)
        if tr & te or {k[0] for k in tr} != set(range(1, 25)) or {k[0] for k in te} != set(range(1, 25)):
            bad.append(("LIO", plan.fold_id))
        if tr | te != full:
            bad.append(("LIO-cover", plan.fold_id))
    lpo = lpo_splits(keys)
    for plan in lpo:
        tr, te = set(plan.train), set(plan.test)
        if tr & te or te != {(plan.fold_id, i) for i in range(1, 16)} or tr | te != full:
            bad.append(("LPO", plan.fold_id))
    ok = not bad and len(lpo) == 24
    return Criterion(10, "splitter soundness", ok, f"{n_plans} LIO + {len(lpo)} LPO plans, {len(bad)} violations")


def property_criteria():
    return [criterion_7(), criterion_8(), criterion_9(), criterion_10()]


def format_line(c):
    return f"criterion {c.number:2d} [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}"
