"""Nonparametric tests with normal / chi-square approximations and tie corrections."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2, norm, rankdata


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n: int


def _tie_term(ranked_values):
    _, counts = np.unique(ranked_values, return_counts=True)
    return float((counts**3 - counts).sum())


def wilcoxon_signed_rank(a, b, min_pairs=6):
    """Two-sided signed-rank test; zero differences are dropped.

    The statistic is ``min(W+, W-)``; the p-value comes from the normal
    approximation with the tie-corrected variance and no continuity correction.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("wilcoxon needs two paired 1-D vectors of equal length")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return TestResult(0.0, 1.0, 0)
    if n < min_pairs:
        raise ValueError(f"wilcoxon needs at least {min_pairs} non-zero differences, got {n}")
    r = rankdata(np.abs(d))
    w_plus = float(r[d > 0].sum())
    w_minus = float(r[d < 0].sum())
    stat = min(w_plus, w_minus)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(np.abs(d)) / 48.0
    if var <= 0:
        return TestResult(stat, 1.0, n)
    z = (stat - mean) / np.sqrt(var)
    return TestResult(stat, float(min(1.0, 2.0 * norm.cdf(-abs(z)))), n)


def friedman(matrix):
    """Friedman test on a (blocks x treatments) matrix, lower values ranked first."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] < 2 or M.shape[1] < 2:
        raise ValueError(f"friedman needs at least 2 blocks and 2 treatments, got shape {M.shape}")
    n, k = M.shape
    R = rankdata(M, axis=1)
    col = R.sum(axis=0)
    stat = 12.0 / (n * k * (k + 1)) * float((col**2).sum()) - 3.0 * n * (k + 1)
    ties = sum(_tie_term(row) for row in M)
    c = 1.0 - ties / (n * k * (k * k - 1))
    if c <= 0:
        return TestResult(0.0, 1.0, n)
    stat /= c
    return TestResult(float(stat), float(chi2.sf(stat, k - 1)), n)
