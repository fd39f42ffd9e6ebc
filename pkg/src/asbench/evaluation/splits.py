"""Leave-instance-out and leave-problem-out train/test plans."""

import math
from dataclasses import dataclass

import numpy as np

from .._validation import check_positive_int, derive_seed


@dataclass(frozen=True)
class SplitPlan:
    kind: str
    fold_id: int
    train: tuple
    test: tuple

    def __post_init__(self):
        if set(self.train) & set(self.test):
            raise ValueError(f"{self.kind} fold {self.fold_id}: train and test overlap")


def _keys(suite):
    return sorted({tuple(getattr(s, "key", s))[:2] for s in suite})


def _by_class(keys):
    groups = {}
    for k in keys:
        groups.setdefault(k[0], []).append(k)
    return groups


def lio_splits(suite, test_fraction=1 / 3, n_repeats=10, seed=0):
    """Per repeat, send a seeded ``ceil(m * test_fraction)`` of every class to test."""
    check_positive_int(n_repeats, "n_repeats")
    if not 0 < test_fraction < 1:
        raise ValueError(f"test_fraction must lie strictly between 0 and 1, got {test_fraction}")
    groups = _by_class(_keys(suite))
    for c, members in groups.items():
        n_test = math.ceil(len(members) * test_fraction - 1e-9)
        if not 1 <= n_test < len(members):
            raise ValueError(
                f"class {c} has {len(members)} instances; test_fraction {test_fraction} leaves a side empty"
            )
    plans = []
    for r in range(n_repeats):
        train, test = [], []
        for c, members in sorted(groups.items()):
            n_test = math.ceil(len(members) * test_fraction - 1e-9)
            perm = np.random.default_rng(derive_seed(seed, 20, r, c)).permutation(len(members))
            test += [members[i] for i in perm[len(members) - n_test :]]
            train += [members[i] for i in perm[: len(members) - n_test]]
        plans.append(SplitPlan("LIO", r, tuple(sorted(train)), tuple(sorted(test))))
    return plans


def lpo_splits(suite):
    """One fold per class: that class is the test set, all others train."""
    keys = _keys(suite)
    groups = _by_class(keys)
    if len(groups) < 2:
        raise ValueError("leave-problem-out needs at least two classes")
    return [
        SplitPlan("LPO", c, tuple(k for k in keys if k[0] != c), tuple(groups[c]))
        for c in sorted(groups)
    ]
