"""COCO-style benchmark suite: 24 problem classes, seeded instances, rescaling.

Every instance evaluates ``scale_factor * g(x) + f_opt`` where the base
function ``g`` is zero at ``x_opt`` and non-negative everywhere.  The base
functions follow the noiseless BBOB definitions, adapted where needed so
that the optimum sits exactly at the instance's shift vector.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_positive_float, check_positive_int

N_CLASSES = 24
LOWER, UPPER = -5.0, 5.0

_SUITE_TAG = 20240817


class UnknownClassError(ValueError):
    pass


# --------------------------------------------------------------------------
# transformations


def _matvec(M, Z):
    # row-wise M @ z without BLAS so results do not depend on batch size
    return (Z[:, None, :] * M[None, :, :]).sum(axis=-1)


def _lambda(alpha, dim):
    return alpha ** (0.5 * np.arange(dim) / (dim - 1))


def _t_osz(x):
    with np.errstate(divide="ignore"):
        xhat = np.where(x != 0, np.log(np.abs(x)), 0.0)
    c1 = np.where(x > 0, 10.0, 5.5)
    c2 = np.where(x > 0, 7.9, 3.1)
    return np.sign(x) * np.exp(xhat + 0.049 * (np.sin(c1 * xhat) + np.sin(c2 * xhat)))


def _t_asy(x, beta):
    dim = x.shape[-1]
    pos = np.maximum(x, 0.0)
    expo = 1.0 + beta * (np.arange(dim) / (dim - 1)) * np.sqrt(pos)
    return np.where(x > 0, pos**expo, x)


def _f_pen(X):
    return (np.maximum(0.0, np.abs(X) - 5.0) ** 2).sum(axis=-1)


def _rastrigin_core(z):
    dim = z.shape[-1]
    return 10.0 * (dim - np.cos(2 * np.pi * z).sum(axis=-1)) + (z * z).sum(axis=-1)


# --------------------------------------------------------------------------
# base functions: g(X, inst) -> (n,) array, zero at x_opt


def _sphere(X, inst):
    z = X - inst.x_opt
    return (z * z).sum(axis=-1)


def _ellipsoid(X, inst):
    dim = inst.dim
    z = _t_osz(X - inst.x_opt)
    return (10.0 ** (6.0 * np.arange(dim) / (dim - 1)) * z * z).sum(axis=-1)


def _rastrigin(X, inst):
    z = _lambda(10.0, inst.dim) * _t_asy(_t_osz(X - inst.x_opt), 0.2)
    return _rastrigin_core(z)


def _bueche_rastrigin(X, inst):
    dim = inst.dim
    z = _t_osz(X - inst.x_opt)
    base = 10.0 ** (0.5 * np.arange(dim) / (dim - 1))
    odd = (np.arange(dim) % 2) == 0  # 1-based odd coordinates
    s = np.where((z > 0) & odd, 10.0 * base, base)
    return _rastrigin_core(s * z) + 100.0 * _f_pen(X)


def _linear_slope(X, inst):
    # V-shaped slope so the optimum is interior
    dim = inst.dim
    s = 10.0 ** (np.arange(dim) / (dim - 1))
    return (s * np.abs(X - inst.x_opt)).sum(axis=-1)


def _attractive_sector(X, inst):
    R, Q = inst.rotations
    z = _matvec(Q, _lambda(10.0, inst.dim) * _matvec(R, X - inst.x_opt))
    s = np.where(z * inst.x_opt > 0, 100.0, 1.0)
    inner = ((s * z) ** 2).sum(axis=-1)
    return _t_osz(inner) ** 0.9


def _step_ellipsoid(X, inst):
    R, Q = inst.rotations
    dim = inst.dim
    zhat = _lambda(10.0, dim) * _matvec(R, X - inst.x_opt)
    ztil = np.where(
        np.abs(zhat) > 0.5, np.floor(0.5 + zhat), np.floor(0.5 + 10.0 * zhat) / 10.0
    )
    z = _matvec(Q, ztil)
    body = (10.0 ** (2.0 * np.arange(dim) / (dim - 1)) * z * z).sum(axis=-1)
    return 0.1 * np.maximum(np.abs(zhat[:, 0]) / 1e4, body) + _f_pen(X)


def _rosen(z):
    a, b = z[:, :-1], z[:, 1:]
    return (100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2).sum(axis=-1)


def _rosenbrock(X, inst):
    c = max(1.0, np.sqrt(inst.dim) / 8.0)
    return _rosen(c * (X - inst.x_opt) + 1.0)


def _rosenbrock_rotated(X, inst):
    (R,) = inst.rotations
    c = max(1.0, np.sqrt(inst.dim) / 8.0)
    return _rosen(c * _matvec(R, X - inst.x_opt) + 1.0)


def _ellipsoid_rotated(X, inst):
    (R,) = inst.rotations
    dim = inst.dim
    z = _t_osz(_matvec(R, X - inst.x_opt))
    return (10.0 ** (6.0 * np.arange(dim) / (dim - 1)) * z * z).sum(axis=-1)


def _discus(X, inst):
    (R,) = inst.rotations
    z = _t_osz(_matvec(R, X - inst.x_opt))
    zz = z * z
    return 1e6 * zz[:, 0] + zz[:, 1:].sum(axis=-1)


def _bent_cigar(X, inst):
    (R,) = inst.rotations
    z = _matvec(R, _t_asy(_matvec(R, X - inst.x_opt), 0.5))
    zz = z * z
    return zz[:, 0] + 1e6 * zz[:, 1:].sum(axis=-1)


def _sharp_ridge(X, inst):
    R, Q = inst.rotations
    z = _matvec(Q, _lambda(10.0, inst.dim) * _matvec(R, X - inst.x_opt))
    return z[:, 0] ** 2 + 100.0 * np.sqrt((z[:, 1:] ** 2).sum(axis=-1))


def _different_powers(X, inst):
    (R,) = inst.rotations
    dim = inst.dim
    z = _matvec(R, X - inst.x_opt)
    return np.sqrt((np.abs(z) ** (2.0 + 4.0 * np.arange(dim) / (dim - 1))).sum(axis=-1))


def _rastrigin_rotated(X, inst):
    R, Q = inst.rotations
    z = _t_asy(_t_osz(_matvec(R, X - inst.x_opt)), 0.2)
    z = _matvec(R, _lambda(10.0, inst.dim) * _matvec(Q, z))
    return _rastrigin_core(z)


_W_K = 0.5 ** np.arange(12)
_W_3K = 3.0 ** np.arange(12)


def _weierstrass(X, inst):
    R, Q = inst.rotations
    dim = inst.dim
    z = _t_osz(_matvec(R, X - inst.x_opt))
    z = _matvec(R, _lambda(0.01, dim) * _matvec(Q, z))
    # cos(pi * 3^k) == -1, so each term below is >= 0 and vanishes at z = 0
    terms = _W_K * (np.cos(2 * np.pi * _W_3K * (z[..., None] + 0.5)) + 1.0)
    inner = terms.sum(axis=(-1, -2)) / dim
    return 10.0 * inner**3 + 10.0 / dim * _f_pen(X)


def _schaffers(X, inst, cond):
    R, Q = inst.rotations
    z = _lambda(cond, inst.dim) * _matvec(Q, _t_asy(_matvec(R, X - inst.x_opt), 0.5))
    s = np.sqrt(z[:, :-1] ** 2 + z[:, 1:] ** 2)
    rs = np.sqrt(s)
    body = (rs + rs * np.sin(50.0 * s**0.2) ** 2).sum(axis=-1) / (inst.dim - 1)
    return body**2 + 10.0 * _f_pen(X)


def _schaffers_f7(X, inst):
    return _schaffers(X, inst, 10.0)


def _schaffers_f7_ill(X, inst):
    return _schaffers(X, inst, 1000.0)


def _griewank_rosenbrock(X, inst):
    (R,) = inst.rotations
    c = max(1.0, np.sqrt(inst.dim) / 8.0)
    z = c * _matvec(R, X - inst.x_opt) + 1.0
    a, b = z[:, :-1], z[:, 1:]
    s = 100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2
    # s/4000 - cos(s) + 1 >= 0 termwise
    return 10.0 * (s / 4000.0 - np.cos(s) + 1.0).sum(axis=-1) / (inst.dim - 1)


_SCHWEFEL_PEAK = 420.96874635998202


def _schwefel_term(w):
    inside = _SCHWEFEL_PEAK * np.sin(np.sqrt(_SCHWEFEL_PEAK)) - w * np.sin(np.sqrt(np.abs(w)))
    edge = np.clip(w, -500.0, 500.0)
    edge_val = _SCHWEFEL_PEAK * np.sin(np.sqrt(_SCHWEFEL_PEAK)) - edge * np.sin(
        np.sqrt(np.abs(edge))
    )
    outside = edge_val + (np.abs(w) - 500.0) ** 2 / 100.0
    return np.maximum(0.0, np.where(np.abs(w) <= 500.0, inside, outside))


def _schwefel(X, inst):
    dim = inst.dim
    signs = inst.params["signs"]
    w = _SCHWEFEL_PEAK + 25.0 * signs * _lambda(10.0, dim) * (X - inst.x_opt)
    return _schwefel_term(w).sum(axis=-1) / (100.0 * dim)


def _gallagher(X, inst):
    (R,) = inst.rotations
    peaks, cdiag, weights = inst.params["peaks"], inst.params["cdiag"], inst.params["weights"]
    dim = inst.dim
    rx = _matvec(R, X)
    rp = _matvec(R, peaks)
    diff = rx[:, None, :] - rp[None, :, :]
    quad = (cdiag[None, :, :] * diff * diff).sum(axis=-1)
    best = (weights[None, :] * np.exp(-quad / (2.0 * dim))).max(axis=-1)
    return _t_osz(10.0 - best) ** 2 + _f_pen(X)


def _katsuura(X, inst):
    R, Q = inst.rotations
    dim = inst.dim
    z = _matvec(Q, _lambda(100.0, dim) * _matvec(R, X - inst.x_opt))
    two = 2.0 ** np.arange(1, 33)
    tz = two * z[..., None]
    inner = (np.abs(tz - np.round(tz)) / two).sum(axis=-1)
    prod = np.prod((1.0 + np.arange(1, dim + 1) * inner) ** (10.0 / dim**1.2), axis=-1)
    return 10.0 / dim**2 * (prod - 1.0) + _f_pen(X)


def _lunacek(X, inst):
    R, Q = inst.rotations
    dim = inst.dim
    mu0, d = 2.5, 1.0
    s = 1.0 - 1.0 / (2.0 * np.sqrt(dim + 20.0) - 8.2)
    mu1 = -np.sqrt((mu0**2 - d) / s)
    xhat = mu0 + 2.0 * inst.params["signs"] * (X - inst.x_opt)
    z = _matvec(Q, _lambda(100.0, dim) * _matvec(R, xhat - mu0))
    a = ((xhat - mu0) ** 2).sum(axis=-1)
    b = d * dim + s * ((xhat - mu1) ** 2).sum(axis=-1)
    return (
        np.minimum(a, b)
        + 10.0 * (dim - np.cos(2 * np.pi * z).sum(axis=-1))
        + 1e4 * _f_pen(X)
    )


# (name, function, number of rotations, extra-parameter recipe)
BASE_FUNCTIONS = {
    1: ("sphere", _sphere, 0, None),
    2: ("ellipsoid", _ellipsoid, 0, None),
    3: ("rastrigin", _rastrigin, 0, None),
    4: ("bueche_rastrigin", _bueche_rastrigin, 0, None),
    5: ("linear_slope", _linear_slope, 0, None),
    6: ("attractive_sector", _attractive_sector, 2, None),
    7: ("step_ellipsoid", _step_ellipsoid, 2, None),
    8: ("rosenbrock", _rosenbrock, 0, None),
    9: ("rosenbrock_rotated", _rosenbrock_rotated, 1, None),
    10: ("ellipsoid_rotated", _ellipsoid_rotated, 1, None),
    11: ("discus", _discus, 1, None),
    12: ("bent_cigar", _bent_cigar, 1, None),
    13: ("sharp_ridge", _sharp_ridge, 2, None),
    14: ("different_powers", _different_powers, 1, None),
    15: ("rastrigin_rotated", _rastrigin_rotated, 2, None),
    16: ("weierstrass", _weierstrass, 2, None),
    17: ("schaffers_f7", _schaffers_f7, 2, None),
    18: ("schaffers_f7_ill", _schaffers_f7_ill, 2, None),
    19: ("griewank_rosenbrock", _griewank_rosenbrock, 1, None),
    20: ("schwefel", _schwefel, 0, "signs"),
    21: ("gallagher_101", _gallagher, 1, ("gallagher", 101, 1000.0, 5.0)),
    22: ("gallagher_21", _gallagher, 1, ("gallagher", 21, 1000.0**2, 4.9)),
    23: ("katsuura", _katsuura, 2, None),
    24: ("lunacek", _lunacek, 2, "signs"),
}


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    class_id: int
    instance_id: int
    dim: int
    x_opt: np.ndarray
    f_opt: float
    rotations: tuple = ()
    scale_factor: float = 1.0
    base_id: str = ""
    params: dict = field(default_factory=dict)

    @property
    def key(self):
        return (self.class_id, self.instance_id)

    def base_value(self, X):
        """Unscaled, unshifted base function value g(x) >= 0."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X2 = np.atleast_2d(X)
        if X2.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {X2.shape[-1]}")
        g = BASE_FUNCTIONS[self.class_id][1](X2, self)
        return float(g[0]) if single else g

    def precision(self, X):
        """``f(x) - f_opt`` computed without cancellation against ``f_opt``."""
        return self.scale_factor * self.base_value(X)

    def evaluate(self, X):
        return self.precision(X) + self.f_opt

    __call__ = evaluate

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        if (self.class_id, self.instance_id, self.dim, self.base_id) != (
            other.class_id,
            other.instance_id,
            other.dim,
            other.base_id,
        ):
            return False
        if self.f_opt != other.f_opt or self.scale_factor != other.scale_factor:
            return False
        if not np.array_equal(self.x_opt, other.x_opt):
            return False
        if len(self.rotations) != len(other.rotations):
            return False
        if not all(np.array_equal(a, b) for a, b in zip(self.rotations, other.rotations)):
            return False
        if self.params.keys() != other.params.keys():
            return False
        return all(np.array_equal(self.params[k], other.params[k]) for k in self.params)

    __hash__ = object.__hash__

    def __repr__(self):
        return (
            f"ProblemInstance(class_id={self.class_id}, instance_id={self.instance_id}, "
            f"dim={self.dim}, base_id={self.base_id!r}, f_opt={self.f_opt:.4f}, "
            f"scale_factor={self.scale_factor:g})"
        )


def _random_rotation(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _gallagher_params(rng, dim, n_peaks, top_alpha, bound, x_opt):
    weights = np.empty(n_peaks)
    weights[0] = 10.0
    weights[1:] = 1.1 + 8.0 * np.arange(n_peaks - 1) / (n_peaks - 2)
    alphas = np.empty(n_peaks)
    alphas[0] = top_alpha
    alphas[1:] = rng.permutation(1000.0 ** (2.0 * np.arange(n_peaks - 1) / (n_peaks - 2)))
    cdiag = np.empty((n_peaks, dim))
    for i in range(n_peaks):
        cdiag[i] = rng.permutation(_lambda(alphas[i], dim)) / alphas[i] ** 0.25
    peaks = rng.uniform(-bound, bound, size=(n_peaks, dim))
    peaks[0] = x_opt
    return {"peaks": peaks, "cdiag": cdiag, "weights": weights}


def make_instance(class_id, instance_id, dim=5):
    """Build the deterministic instance ``instance_id`` of class ``class_id``."""
    if class_id not in BASE_FUNCTIONS:
        raise UnknownClassError(f"unknown problem class {class_id!r}; expected 1..{N_CLASSES}")
    check_positive_int(instance_id, "instance_id")
    check_positive_int(dim, "dim", minimum=2)
    name, _, n_rot, extra = BASE_FUNCTIONS[class_id]

    rng = np.random.default_rng(np.random.SeedSequence([_SUITE_TAG, class_id, instance_id, dim]))
    x_opt = rng.uniform(-4.0, 4.0, size=dim)
    f_opt = float(rng.uniform(-100.0, 100.0))
    R = _random_rotation(rng, dim)
    Q = _random_rotation(rng, dim)
    signs = np.where(rng.random(dim) < 0.5, -1.0, 1.0)

    params = {}
    if extra == "signs":
        params["signs"] = signs
    elif extra is not None:
        _, n_peaks, top_alpha, bound = extra
        params.update(_gallagher_params(rng, dim, n_peaks, top_alpha, bound, x_opt))

    for arr in (x_opt, R, Q, *params.values()):
        arr.setflags(write=False)
    return ProblemInstance(
        class_id=class_id,
        instance_id=instance_id,
        dim=dim,
        x_opt=x_opt,
        f_opt=f_opt,
        rotations=(R, Q)[:n_rot],
        base_id=name,
        params=params,
    )


def evaluate(instance, x):
    return instance.evaluate(x)


def rescale(instance, factor):
    """Copy of ``instance`` with its objective multiplied by ``factor``.

    Both the scale factor and the optimum value are multiplied, so the
    precision ``f(x) - f_opt`` of any point scales by exactly ``factor``
    while the ordering of points is untouched.
    """
    factor = check_positive_float(factor, "factor")
    return replace(
        instance,
        scale_factor=instance.scale_factor * factor,
        f_opt=instance.f_opt * factor,
    )


def list_suite(dim=5, instances_per_class=15):
    check_positive_int(instances_per_class, "instances_per_class")
    return [
        make_instance(c, i, dim)
        for c in range(1, N_CLASSES + 1)
        for i in range(1, instances_per_class + 1)
    ]
