"""Non-informative fitness statistics of the form ``agg(tr(sc * y))``.

The features only look at the (min-max scaled) fitness values, never at
where the points were sampled, so they can identify a problem class but
carry nothing that explains why an optimizer does well on it.
"""

from dataclasses import dataclass

import numpy as np

from .._validation import check_positive_int

SCALARS = (0.2, 0.3, 0.5, 0.7, 1.0, 2.0, 3.0, 5.0, 7.0, 9.0)

TRANSFORMS = {
    "sin": np.sin,
    "cos": np.cos,
    "root6": lambda v: np.power(v, 1.0 / 6.0),
    "root3": np.cbrt,
    "sqrt": np.sqrt,
    "square": np.square,
    "log1p": np.log1p,
}

AGGREGATES = {
    "mean": np.mean,
    "median": np.median,
    "std": np.std,
    "q05": lambda v: np.quantile(v, 0.05),
    "q25": lambda v: np.quantile(v, 0.25),
    "q75": lambda v: np.quantile(v, 0.75),
    "q95": lambda v: np.quantile(v, 0.95),
}


@dataclass(frozen=True)
class GeneratorSpec:
    triples: tuple
    seed: int

    def __len__(self):
        return len(self.triples)

    def names(self):
        return [f"noninf_{j:02d}_{agg}_{tr}_{sc:g}" for j, (sc, tr, agg) in enumerate(self.triples)]


def noninf_spec(m, seed):
    """Draw ``m`` (scalar, transformation, aggregate) recipes."""
    check_positive_int(m, "m")
    rng = np.random.default_rng(seed)
    tr_names, agg_names = list(TRANSFORMS), list(AGGREGATES)
    triples = tuple(
        (
            SCALARS[rng.integers(len(SCALARS))],
            tr_names[rng.integers(len(tr_names))],
            agg_names[rng.integers(len(agg_names))],
        )
        for _ in range(m)
    )
    return GeneratorSpec(triples=triples, seed=int(seed))


def noninf_values(y_scaled, spec):
    y = np.asarray(y_scaled, dtype=float)
    return np.array([AGGREGATES[agg](TRANSFORMS[tr](sc * y)) for sc, tr, agg in spec.triples])
