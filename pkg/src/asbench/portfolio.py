"""The five-algorithm portfolio and a fixed-budget runner.

All algorithms are vectorised over repetitions: one call advances a whole
batch of independent runs of the same algorithm on the same instance.  Each
run owns its random streams (seeded from its own 64-bit seed) and every
random number it consumes is drawn up front in generation-major blocks, so a
run's trajectory does not depend on which other runs share its batch.

Selection is purely comparison based everywhere (tournaments, greedy
replacement, best-so-far updates, truncation, rank weights), which makes
every trajectory invariant to a positive rescaling of the objective.

The kernels are fed ``f(x) - f_opt`` rather than ``f(x)``.  That is an
order-preserving shift, so the search is unchanged, but it keeps the low
bits of converged runs that adding ``f_opt`` would round away (and round
away differently for every scale factor).
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ._validation import check_positive_int, derive_seed
from .suite import LOWER, UPPER, make_instance, rescale

ALGORITHMS = ("GA", "DE", "PSO", "ES", "CMAES")
_STREAMS = {"train": 1, "truth": 2, "audit": 3}


@dataclass(frozen=True)
class RunRecord:
    class_id: int
    instance_id: int
    algorithm: str
    repetition: int
    seed: int
    best_f: float
    evals_used: int
    scale_factor: float = 1.0
    precision: float = float("nan")

    @property
    def key(self):
        return (self.class_id, self.instance_id)


def _matvec(M, Z):
    # M: (B, D, D), Z: (B, n, D) -> (B, n, D); elementwise so per-run results are batch independent
    return (Z[:, :, None, :] * M[:, None, :, :]).sum(axis=-1)


class _Batch:
    """Evaluation bookkeeping shared by the algorithm kernels."""

    def __init__(self, instance, seeds):
        self.instance = instance
        self.dim = instance.dim
        self.size = len(seeds)
        self.rngs = [[np.random.default_rng(c) for c in np.random.SeedSequence(int(s)).spawn(3)] for s in seeds]
        self.best = np.full(self.size, np.inf)
        self.evals = 0
        self.history = []

    def uniform(self, which, shape):
        return np.stack([r[which].random(shape) for r in self.rngs])

    def normal(self, shape):
        return np.stack([r[2].standard_normal(shape) for r in self.rngs])

    def init_uniform(self, shape, low=LOWER, high=UPPER):
        return low + (high - low) * self.uniform(0, shape)

    def evaluate(self, P):
        B, n, D = P.shape
        f = np.asarray(self.instance.precision(P.reshape(B * n, D))).reshape(B, n)
        self.evals += n
        self.best = np.minimum(self.best, f.min(axis=1))
        self.history.append(self.best.copy())
        return f


def _stable_order(f):
    return np.argsort(f, axis=1, kind="stable")


def _take(P, idx):
    return np.take_along_axis(P, idx[..., None], axis=1)


# --------------------------------------------------------------------------
# GA: binary tournament, SBX, polynomial mutation, (mu + lambda) survival


def _ga(batch, n_gen, pop=100, eta_c=15.0, p_c=0.9, eta_m=20.0):
    B, D = batch.size, batch.dim
    half = pop // 2
    p_m = 1.0 / D
    X = batch.init_uniform((pop, D))
    F = batch.evaluate(X)
    G = n_gen - 1
    per_gen = 2 * pop + half + 2 * half * D + 2 * pop * D
    U = batch.uniform(1, (G, per_gen))
    rows = np.arange(B)[:, None]
    for g in range(G):
        u = U[:, g]
        o = 0
        tour = np.floor(u[:, o : o + 2 * pop] * pop).astype(np.int64).reshape(B, pop, 2)
        o += 2 * pop
        do_cx = u[:, o : o + half] < p_c
        o += half
        swap = u[:, o : o + half * D].reshape(B, half, D) < 0.5
        o += half * D
        uc = u[:, o : o + half * D].reshape(B, half, D)
        o += half * D
        mut = u[:, o : o + pop * D].reshape(B, pop, D) < p_m
        o += pop * D
        um = u[:, o : o + pop * D].reshape(B, pop, D)

        fa = np.take_along_axis(F, tour[..., 0], axis=1)
        fb = np.take_along_axis(F, tour[..., 1], axis=1)
        winners = np.where(fa <= fb, tour[..., 0], tour[..., 1])
        parents = X[rows, winners]
        p1, p2 = parents[:, :half], parents[:, half:]

        beta = np.where(
            uc <= 0.5,
            (2.0 * uc) ** (1.0 / (eta_c + 1.0)),
            (1.0 / (2.0 * (1.0 - uc))) ** (1.0 / (eta_c + 1.0)),
        )
        c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
        c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
        apply = do_cx[..., None] & swap
        c1, c2 = np.where(apply, c1, p1), np.where(apply, c2, p2)
        kids = np.concatenate([c1, c2], axis=1)

        delta = np.where(
            um < 0.5,
            (2.0 * um) ** (1.0 / (eta_m + 1.0)) - 1.0,
            1.0 - (2.0 * (1.0 - um)) ** (1.0 / (eta_m + 1.0)),
        )
        kids = np.where(mut, kids + delta * (UPPER - LOWER), kids)
        kids = np.clip(kids, LOWER, UPPER)
        Fk = batch.evaluate(kids)

        Xall = np.concatenate([X, kids], axis=1)
        Fall = np.concatenate([F, Fk], axis=1)
        keep = _stable_order(Fall)[:, :pop]
        X = _take(Xall, keep)
        F = np.take_along_axis(Fall, keep, axis=1)


# --------------------------------------------------------------------------
# DE/rand/1/bin with greedy replacement


def _distinct_indices(k1, k2, k3, pop):
    i = np.arange(pop)
    r1 = k1 + (k1 >= i)
    lo, hi = np.minimum(i, r1), np.maximum(i, r1)
    r2 = k2 + (k2 >= lo)
    r2 = r2 + (r2 >= hi)
    ex = np.sort(np.stack([i + 0 * r1, r1, r2]), axis=0)
    r3 = k3
    for e in ex:
        r3 = r3 + (r3 >= e)
    return r1, r2, r3


def _de(batch, n_gen, pop=100, F_w=0.5, CR=0.3):
    B, D = batch.size, batch.dim
    X = batch.init_uniform((pop, D))
    Fx = batch.evaluate(X)
    G = n_gen - 1
    U = batch.uniform(1, (G, 3 * pop + pop * D + pop))
    rows = np.arange(B)[:, None]
    for g in range(G):
        u = U[:, g]
        k1 = np.floor(u[:, :pop] * (pop - 1)).astype(np.int64)
        k2 = np.floor(u[:, pop : 2 * pop] * (pop - 2)).astype(np.int64)
        k3 = np.floor(u[:, 2 * pop : 3 * pop] * (pop - 3)).astype(np.int64)
        cr = u[:, 3 * pop : 3 * pop + pop * D].reshape(B, pop, D) < CR
        jrand = np.floor(u[:, 3 * pop + pop * D :] * D).astype(np.int64)
        r1, r2, r3 = _distinct_indices(k1, k2, k3, pop)
        mutant = X[rows, r1] + F_w * (X[rows, r2] - X[rows, r3])
        cross = cr | (np.arange(D)[None, None, :] == jrand[..., None])
        trial = np.clip(np.where(cross, mutant, X), LOWER, UPPER)
        Ft = batch.evaluate(trial)
        better = Ft <= Fx
        X = np.where(better[..., None], trial, X)
        Fx = np.where(better, Ft, Fx)


# --------------------------------------------------------------------------
# PSO: global best topology, linearly decreasing inertia, velocity clamp


def _pso(batch, n_gen, swarm=25, w0=0.9, w1=0.4, c1=2.0, c2=2.0):
    B, D = batch.size, batch.dim
    vmax = 0.2 * (UPPER - LOWER)
    init = batch.uniform(0, (2, swarm, D))
    X = LOWER + (UPPER - LOWER) * init[:, 0]
    V = vmax * (2.0 * init[:, 1] - 1.0)
    Fx = batch.evaluate(X)
    P, Fp = X.copy(), Fx.copy()
    G = n_gen - 1
    U = batch.uniform(1, (G, 2, swarm, D))
    for g in range(G):
        w = w0 - (w0 - w1) * g / max(G - 1, 1)
        gbest = P[np.arange(B), np.argmin(Fp, axis=1)][:, None, :]
        V = w * V + c1 * U[:, g, 0] * (P - X) + c2 * U[:, g, 1] * (gbest - X)
        V = np.clip(V, -vmax, vmax)
        X = np.clip(X + V, LOWER, UPPER)
        Fx = batch.evaluate(X)
        improved = Fx < Fp
        P = np.where(improved[..., None], X, P)
        Fp = np.where(improved, Fx, Fp)


# --------------------------------------------------------------------------
# (mu, lambda)-ES with one self-adaptive step size per individual


def _es(batch, n_gen, mu=20, lam=140, sigma0=1.0):
    B, D = batch.size, batch.dim
    tau = 1.0 / math.sqrt(2.0 * D)
    X = batch.init_uniform((lam, D))
    F = batch.evaluate(X)
    keep = _stable_order(F)[:, :mu]
    X = _take(X, keep)
    S = np.full((B, mu), sigma0)
    G = n_gen - 1
    U = batch.uniform(1, (G, lam))
    N = batch.normal((G, lam, D + 1))
    rows = np.arange(B)[:, None]
    for g in range(G):
        parent = np.floor(U[:, g] * mu).astype(np.int64)
        sig = S[rows, parent] * np.exp(tau * N[:, g, :, 0])
        kids = np.clip(X[rows, parent] + sig[..., None] * N[:, g, :, 1:], LOWER, UPPER)
        Fk = batch.evaluate(kids)
        keep = _stable_order(Fk)[:, :mu]
        X = _take(kids, keep)
        S = np.take_along_axis(sig, keep, axis=1)


# --------------------------------------------------------------------------
# CMA-ES (rank-mu and rank-one updates, cumulative step-size adaptation)


def _cmaes(batch, n_gen, sigma0=2.0):
    B, D = batch.size, batch.dim
    lam = 4 + int(3 * math.log(D))
    mu = lam // 2
    w = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    w = w / w.sum()
    mueff = 1.0 / (w**2).sum()
    cc = (4 + mueff / D) / (D + 4 + 2 * mueff / D)
    cs = (mueff + 2) / (D + mueff + 5)
    c1 = 2 / ((D + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((D + 2) ** 2 + mueff))
    damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (D + 1)) - 1) + cs
    chin = math.sqrt(D) * (1 - 1 / (4 * D) + 1 / (21 * D**2))

    m = batch.init_uniform((D,), -4.0, 4.0)
    sigma = np.full(B, sigma0)
    C = np.broadcast_to(np.eye(D), (B, D, D)).copy()
    Bm = C.copy()
    d = np.ones((B, D))
    ps = np.zeros((B, D))
    pc = np.zeros((B, D))
    Z = batch.normal((n_gen, lam, D))
    for g in range(n_gen):
        y = _matvec(Bm, d[:, None, :] * Z[:, g])
        x = np.clip(m[:, None, :] + sigma[:, None, None] * y, LOWER, UPPER)
        f = batch.evaluate(x)
        y = (x - m[:, None, :]) / sigma[:, None, None]
        sel = _take(y, _stable_order(f)[:, :mu])
        yw = (w[None, :, None] * sel).sum(axis=1)
        m = m + sigma[:, None] * yw

        # C^{-1/2} yw = B diag(1/d) B^T yw
        bt_yw = (Bm * yw[:, :, None]).sum(axis=1)
        inv_sqrt = _matvec(Bm, (bt_yw / d)[:, None, :])[:, 0]
        ps = (1 - cs) * ps + math.sqrt(cs * (2 - cs) * mueff) * inv_sqrt
        ps_norm = np.sqrt((ps * ps).sum(axis=1))
        hsig = ps_norm / math.sqrt(1 - (1 - cs) ** (2 * (g + 1))) / chin < 1.4 + 2 / (D + 1)
        pc = (1 - cc) * pc + hsig[:, None] * math.sqrt(cc * (2 - cc) * mueff) * yw
        rank_mu = (w[None, :, None, None] * sel[:, :, :, None] * sel[:, :, None, :]).sum(axis=1)
        decay = 1 - c1 - cmu + (1 - hsig) * c1 * cc * (2 - cc)
        C = decay[:, None, None] * C + c1 * pc[:, :, None] * pc[:, None, :] + cmu * rank_mu
        C = 0.5 * (C + np.swapaxes(C, 1, 2))
        sigma = sigma * np.exp(np.minimum((cs / damps) * (ps_norm / chin - 1), 1.0))

        evals, Bm = np.linalg.eigh(C)
        d = np.sqrt(np.maximum(evals, 1e-300))


_KERNELS = {"GA": (_ga, 100), "DE": (_de, 100), "PSO": (_pso, 25), "ES": (_es, 140), "CMAES": (_cmaes, None)}


def population_size(algorithm, dim):
    try:
        _, size = _KERNELS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}") from None
    return size if size is not None else 4 + int(3 * math.log(dim))


def run_batch(algorithm, instance, budget, seeds, return_history=False):
    """Run ``len(seeds)`` independent repetitions.

    Returns the best precision ``f(x_best) - f_opt`` of every run and the
    number of evaluations each run used (plus the best-so-far history per
    generation when ``return_history`` is set).
    """
    popsize = population_size(algorithm, instance.dim)
    check_positive_int(budget, "budget")
    if budget < popsize:
        raise ValueError(f"budget {budget} is smaller than the {algorithm} population size {popsize}")
    kernel = _KERNELS[algorithm][0]
    batch = _Batch(instance, seeds)
    kernel(batch, budget // popsize)
    assert batch.evals <= budget
    if return_history:
        return batch.best.copy(), batch.evals, np.array(batch.history).T
    return batch.best.copy(), batch.evals


def run(algorithm, instance, budget, seed, repetition=0):
    best, evals = run_batch(algorithm, instance, budget, [seed])
    return _record(instance, algorithm, repetition, seed, best[0], evals)


def _record(instance, algorithm, repetition, seed, precision, evals):
    return RunRecord(
        class_id=instance.class_id,
        instance_id=instance.instance_id,
        algorithm=algorithm,
        repetition=repetition,
        seed=int(seed),
        best_f=float(precision + instance.f_opt),
        evals_used=int(evals),
        scale_factor=float(instance.scale_factor),
        precision=float(precision),
    )


def run_seed(master_seed, class_id, instance_id, algorithm, repetition, stream="train"):
    """Per-run seed; independent of execution order and of the instance's scale."""
    return derive_seed(
        master_seed, _STREAMS[stream], class_id, instance_id, ALGORITHMS.index(algorithm), repetition
    )


# --------------------------------------------------------------------------
# run tables


class RunTable:
    """All runs of a portfolio on a suite, indexed by (class_id, instance_id, algorithm)."""

    columns = (
        "class_id", "instance_id", "algorithm", "repetition", "seed",
        "best_f", "evals_used", "scale_factor", "precision",
    )

    def __init__(self, records):
        self.records = sorted(
            records,
            key=lambda r: (r.class_id, r.instance_id, ALGORITHMS.index(r.algorithm), r.repetition),
        )
        self._index = {}
        for r in self.records:
            self._index.setdefault((r.class_id, r.instance_id, r.algorithm), []).append(r)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __eq__(self, other):
        return isinstance(other, RunTable) and self.records == other.records

    def lookup(self, class_id, instance_id, algorithm):
        return list(self._index.get((class_id, instance_id, algorithm), []))

    def instance_keys(self):
        return sorted({r.key for r in self.records})

    def algorithms(self):
        present = {r.algorithm for r in self.records}
        return tuple(a for a in ALGORITHMS if a in present)

    def matrix(self, key, field="best_f", algorithms=ALGORITHMS):
        """(repetitions, algorithms) matrix of ``field``, repetitions paired by index."""
        cols = []
        for a in algorithms:
            recs = self._index.get((*key, a))
            if not recs:
                raise KeyError(f"no runs for instance {key} and algorithm {a}")
            cols.append([getattr(r, field) for r in recs])
        lengths = {len(c) for c in cols}
        if len(lengths) != 1:
            raise ValueError(f"instance {key} has unequal repetition counts {sorted(lengths)}")
        return np.array(cols, dtype=float).T

    def best_f_matrix(self, key, algorithms=ALGORITHMS):
        return self.matrix(key, "best_f", algorithms)

    def check_complete(self, repetitions=None, algorithms=ALGORITHMS):
        """Every (instance, algorithm) pair must hold repetitions 0..n-1 for one common n."""
        if repetitions is None and self.records:
            repetitions = len(self._index[self.records[0].key + (self.records[0].algorithm,)])
        for key in self.instance_keys():
            for a in algorithms:
                reps = sorted(r.repetition for r in self._index.get((*key, a), []))
                if reps != list(range(repetitions)):
                    raise ValueError(f"incomplete run table for instance {key}, algorithm {a}")

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for r in self.records:
                row = asdict(r)
                row["best_f"] = repr(r.best_f)
                row["scale_factor"] = repr(r.scale_factor)
                row["precision"] = repr(r.precision)
                writer.writerow([row[c] for c in self.columns])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.DictReader(line for line in fh if not line.startswith("#"))
            missing = set(cls.columns[:-1]) - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"{path}: missing columns {sorted(missing)}")
            records = [
                RunRecord(
                    class_id=int(row["class_id"]),
                    instance_id=int(row["instance_id"]),
                    algorithm=row["algorithm"],
                    repetition=int(row["repetition"]),
                    seed=int(row["seed"]),
                    best_f=float(row["best_f"]),
                    evals_used=int(row["evals_used"]),
                    scale_factor=float(row["scale_factor"]),
                    precision=float(row.get("precision") or "nan"),
                )
                for row in reader
            ]
        return cls(records)


def _run_unit(args):
    algorithm, instance, budget, seeds = args
    best, evals = run_batch(algorithm, instance, budget, seeds)
    return best, evals


def run_streams(suite, budget, repetitions, master_seed, n_jobs=1, algorithms=ALGORITHMS, progress=None):
    """Run several seed streams at once; ``repetitions`` maps stream name to count.

    Streams of one (instance, algorithm) pair share a batch, which is faster
    than separate calls and gives bit-identical results.
    """
    for reps in repetitions.values():
        check_positive_int(reps, "repetitions")
    units, labels = [], []
    for inst in suite:
        for a in algorithms:
            seeds, lab = [], []
            for stream, reps in repetitions.items():
                for r in range(reps):
                    seeds.append(run_seed(master_seed, inst.class_id, inst.instance_id, a, r, stream))
                    lab.append((stream, r))
            units.append((a, inst, budget, seeds))
            labels.append(lab)

    if n_jobs == 1:
        outputs = []
        for i, res in enumerate(map(_run_unit, units)):
            outputs.append(res)
            if progress:
                progress(i + 1, len(units))
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outputs = list(pool.map(_run_unit, units, chunksize=4))

    records = {stream: [] for stream in repetitions}
    for (a, inst, _, seeds), lab, (best, evals) in zip(units, labels, outputs):
        for (stream, r), s, b in zip(lab, seeds, best):
            records[stream].append(_record(inst, a, r, s, b, evals))
    return {stream: RunTable(recs) for stream, recs in records.items()}


def run_portfolio(
    suite, budget, repetitions, master_seed, stream="train", n_jobs=1, algorithms=ALGORITHMS, progress=None
):
    """Run every algorithm ``repetitions`` times on every instance of ``suite``."""
    tables = run_streams(suite, budget, {stream: repetitions}, master_seed, n_jobs, algorithms, progress)
    return tables[stream]


def instance_for(record, dim=5):
    """Rebuild the (possibly rescaled) instance a record was produced on."""
    inst = make_instance(record.class_id, record.instance_id, dim)
    return inst if record.scale_factor == 1.0 else rescale(inst, record.scale_factor)
