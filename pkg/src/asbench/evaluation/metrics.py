import numpy as np


def pre(predicted, truth):
    """Pairwise ranking error: share of ordered pairs whose order signs disagree.

    Accepts two rank vectors, or two matrices with one ranking per row (then
    one error per row is returned).
    """
    p = np.asarray(predicted, dtype=float)
    t = np.asarray(truth, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"rank shapes differ: {p.shape} vs {t.shape}")
    k = p.shape[-1]
    if k < 2:
        raise ValueError("PRE needs at least two algorithms")
    sp = np.sign(p[..., :, None] - p[..., None, :])
    st = np.sign(t[..., :, None] - t[..., None, :])
    mismatches = (sp != st).sum(axis=(-2, -1))
    out = mismatches / (k * (k - 1))
    return float(out) if out.ndim == 0 else out


def mse(predicted, truth):
    p = np.asarray(predicted, dtype=float).ravel()
    t = np.asarray(truth, dtype=float).ravel()
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.size} vs {t.size}")
    if p.size == 0:
        raise ValueError("mse of empty vectors")
    return float(np.mean((p - t) ** 2))
