"""A documented ELA-like landscape feature set (46 features in six groups).

All groups are computed on ``(X, Y_scaled)``:

* ``distr``: skewness, excess kurtosis and number of density peaks of y
* ``meta``: adjusted R^2 and coefficient summaries of least-squares fits
* ``disp``: distance dispersion of the best 2/5/10/25 % of the sample
* ``ic``: information content along a nearest-neighbour tour
* ``nbc``: nearest-better clustering statistics
* ``pca``: explained-variance summaries of X and [X | y]

Degenerate computations (constant y, singular fits, zero variance) yield 0
for the affected features and are reported through ``flags``.
"""

import logging

import numpy as np
from scipy import stats
from scipy.spatial.distance import cdist, pdist

logger = logging.getLogger(__name__)

DISPERSION_QUANTILES = (0.02, 0.05, 0.10, 0.25)
KDE_GRID = 512
PEAK_THRESHOLD = 0.1
IC_EPSILONS = 10.0 ** np.linspace(-5, 15, 1001)
IC_SETTLING = 0.05

FEATURE_NAMES = (
    "distr.skewness",
    "distr.kurtosis",
    "distr.number_of_peaks",
    "meta.lin_simple.adj_r2",
    "meta.lin_simple.intercept",
    "meta.lin_simple.coef.min",
    "meta.lin_simple.coef.max",
    "meta.lin_simple.coef.max_by_min",
    "meta.lin_w_interact.adj_r2",
    "meta.quad_simple.adj_r2",
    "meta.quad_simple.cond",
    "meta.quad_w_interact.adj_r2",
    *(
        f"disp.{stat}_{agg}_{int(q * 100):02d}"
        for q in DISPERSION_QUANTILES
        for stat in ("ratio", "diff")
        for agg in ("mean", "median")
    ),
    "ic.h_max",
    "ic.eps_s",
    "ic.eps_max",
    "ic.eps_ratio",
    "ic.m0",
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
    "pca.expl_var.cov_x",
    "pca.expl_var.cor_x",
    "pca.expl_var.cov_init",
    "pca.expl_var.cor_init",
    "pca.expl_var_pc1.cov_x",
    "pca.expl_var_pc1.cor_x",
    "pca.expl_var_pc1.cov_init",
    "pca.expl_var_pc1.cor_init",
)


def _corr(a, b):
    if np.std(a) == 0 or np.std(b) == 0:
        return None
    return float(np.corrcoef(a, b)[0, 1])


def distribution_features(y, flags):
    if np.ptp(y) == 0:
        flags.append("distr:constant")
        return [0.0, 0.0, 0.0]
    skew = float(stats.skew(y))
    kurt = float(stats.kurtosis(y))
    kde = stats.gaussian_kde(y, bw_method="silverman")
    bw = float(np.sqrt(kde.covariance[0, 0]))
    grid = np.linspace(y.min() - 3 * bw, y.max() + 3 * bw, KDE_GRID)
    dens = kde(grid)
    inner = dens[1:-1]
    is_peak = (inner > dens[:-2]) & (inner >= dens[2:]) & (inner > PEAK_THRESHOLD * dens.max())
    return [skew, kurt, float(is_peak.sum())]


def _adj_r2(design, y, flags, label):
    n, p = design.shape
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < p or n - p <= 0:
        flags.append(f"meta:{label}:singular")
        return None, coef
    resid = y - design @ coef
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0:
        flags.append(f"meta:{label}:constant")
        return None, coef
    r2 = 1.0 - float(resid @ resid) / ss_tot
    return 1.0 - (1.0 - r2) * (n - 1) / (n - p), coef


def meta_model_features(X, y, flags):
    n, d = X.shape
    ones = np.ones((n, 1))
    iu = np.triu_indices(d, k=1)
    inter = X[:, iu[0]] * X[:, iu[1]]

    lin_r2, lin_coef = _adj_r2(np.hstack([ones, X]), y, flags, "lin_simple")
    if lin_r2 is None:
        lin = [0.0] * 5
    else:
        slopes = np.abs(lin_coef[1:])
        ratio = slopes.max() / slopes.min() if slopes.min() > 0 else 0.0
        lin = [lin_r2, float(lin_coef[0]), float(slopes.min()), float(slopes.max()), float(ratio)]

    li_r2, _ = _adj_r2(np.hstack([ones, X, inter]), y, flags, "lin_w_interact")
    qs_r2, qs_coef = _adj_r2(np.hstack([ones, X, X**2]), y, flags, "quad_simple")
    if qs_r2 is None:
        cond = 0.0
    else:
        quad = np.abs(qs_coef[1 + d :])
        cond = float(quad.max() / quad.min()) if quad.min() > 0 else 0.0
    qi_r2, _ = _adj_r2(np.hstack([ones, X, X**2, inter]), y, flags, "quad_w_interact")
    return lin + [li_r2 or 0.0, qs_r2 or 0.0, cond, qi_r2 or 0.0]


def dispersion_features(X, y, all_dists=None):
    if all_dists is None:
        all_dists = pdist(X)
    mean_all, median_all = all_dists.mean(), np.median(all_dists)
    order = np.argsort(y, kind="stable")
    out = []
    for q in DISPERSION_QUANTILES:
        k = max(2, int(np.ceil(q * len(y))))
        dq = pdist(X[order[:k]])
        mean_q, median_q = dq.mean(), np.median(dq)
        out += [mean_q / mean_all, median_q / median_all, mean_q - mean_all, median_q - median_all]
    return [float(v) for v in out]


def nearest_neighbour_tour(D, start):
    n = D.shape[0]
    visited = np.zeros(n, dtype=bool)
    tour = np.empty(n, dtype=np.int64)
    cur = start
    for k in range(n):
        tour[k] = cur
        visited[cur] = True
        if k == n - 1:
            break
        row = np.where(visited, np.inf, D[cur])
        cur = int(np.argmin(row))
    return tour


def _symbols(slopes, eps):
    eps = np.asarray(eps)[:, None]
    return (slopes[None, :] > eps).astype(np.int8) - (slopes[None, :] < -eps).astype(np.int8)


def _entropy(sym):
    a, b = sym[:, :-1] + 1, sym[:, 1:] + 1
    codes = a * 3 + b
    total = codes.shape[1]
    h = np.zeros(sym.shape[0])
    for code in range(9):
        if code // 3 == code % 3:
            continue
        p = (codes == code).sum(axis=1) / total
        with np.errstate(divide="ignore", invalid="ignore"):
            h -= np.where(p > 0, p * np.log(p) / np.log(6), 0.0)
    return h


def _partial_information(sym):
    n_rows, m = sym.shape
    pos = np.where(sym != 0, np.arange(m)[None, :], -1)
    last = np.maximum.accumulate(pos, axis=1)
    filled = np.where(last >= 0, np.take_along_axis(sym, np.maximum(last, 0), axis=1), 0)
    prev = np.concatenate([np.zeros((n_rows, 1), dtype=sym.dtype), filled[:, :-1]], axis=1)
    changes = ((sym != 0) & (prev != 0) & (prev != sym)).sum(axis=1)
    any_nonzero = (sym != 0).any(axis=1)
    return (any_nonzero + changes) / m


def information_content_features(X, y, D, seed):
    rng = np.random.default_rng(seed)
    tour = nearest_neighbour_tour(D, int(rng.integers(len(y))))
    step = D[tour[:-1], tour[1:]]
    slopes = (y[tour[1:]] - y[tour[:-1]]) / np.where(step > 0, step, np.inf)

    sym = _symbols(slopes, IC_EPSILONS)
    H = _entropy(sym)
    log_eps = np.log10(IC_EPSILONS)
    h_max = float(H.max())
    eps_max = float(log_eps[int(np.argmax(H))])
    settled = np.nonzero(H < IC_SETTLING)[0]
    eps_s = float(log_eps[settled[0]]) if settled.size else float(log_eps[-1])

    m0 = float(_partial_information(_symbols(slopes, [0.0]))[0])
    M = _partial_information(sym)
    half = np.nonzero(M <= 0.5 * m0)[0]
    eps_ratio = float(log_eps[half[0]]) if half.size else float(log_eps[-1])
    return [h_max, eps_s, eps_max, eps_ratio, m0]


def nbc_features(y, D, flags):
    Dm = D + np.diag(np.full(len(y), np.inf))
    nn = Dm.min(axis=1)
    better = y[None, :] < y[:, None]
    Db = np.where(better, Dm, np.inf)
    nb_idx = np.argmin(Db, axis=1)
    nb = Db[np.arange(len(y)), nb_idx]
    has = np.isfinite(nb)
    if has.sum() < 3:
        flags.append("nbc:too_few_better")
        return [0.0] * 5
    nn_h, nb_h = nn[has], nb[has]
    indegree = np.bincount(nb_idx[has], minlength=len(y)).astype(float)
    ratio = nn_h / nb_h
    out = [
        np.std(nn_h) / np.std(nb_h) if np.std(nb_h) > 0 else None,
        np.mean(nn_h) / np.mean(nb_h),
        _corr(nn_h, nb_h),
        np.std(ratio) / np.mean(ratio),
        _corr(indegree, y),
    ]
    if any(v is None for v in out):
        flags.append("nbc:zero_variance")
    return [0.0 if v is None else float(v) for v in out]


def _explained(M, use_cor):
    C = np.corrcoef(M, rowvar=False) if use_cor else np.cov(M, rowvar=False)
    ev = np.sort(np.linalg.eigvalsh(C))[::-1]
    ev = np.maximum(ev, 0.0)
    share = np.cumsum(ev) / ev.sum()
    n_needed = int(np.searchsorted(share, 0.9 - 1e-12) + 1)
    return n_needed / len(ev), float(ev[0] / ev.sum())


def pca_features(X, y, flags):
    Xy = np.hstack([X, y[:, None]])
    out = {}
    for label, M in (("x", X), ("init", Xy)):
        for kind in ("cov", "cor"):
            if kind == "cor" and np.any(np.std(M, axis=0) == 0):
                flags.append(f"pca:{kind}_{label}:zero_variance")
                out[(kind, label)] = (0.0, 0.0)
            else:
                out[(kind, label)] = _explained(M, kind == "cor")
    order = [("cov", "x"), ("cor", "x"), ("cov", "init"), ("cor", "init")]
    return [out[k][0] for k in order] + [out[k][1] for k in order]


def ela_values(X, y, seed=0):
    """Return (46 feature values, list of degeneracy flags)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if n < 10 * d:
        raise ValueError(f"ELA features need at least {10 * d} points, got {n}")
    flags = []
    D = cdist(X, X)
    values = (
        distribution_features(y, flags)
        + meta_model_features(X, y, flags)
        + dispersion_features(X, y, D[np.triu_indices(n, k=1)])
        + information_content_features(X, y, D, seed)
        + nbc_features(y, D, flags)
        + pca_features(X, y, flags)
    )
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        flags.append("nonfinite")
        values = np.where(np.isfinite(values), values, 0.0)
    if flags:
        logger.info("degenerate ELA computations: %s", ", ".join(flags))
    return values, flags
