"""Meta-model targets: per-instance mean ranks and mean target precision."""

import csv

import numpy as np
from scipy.stats import rankdata

from .portfolio import ALGORITHMS

TARGET_KINDS = ("rank", "precision")


class IntegrityError(ValueError):
    """A run record contradicts the instance it claims to belong to."""


def rank_with_ties(values):
    """Ascending ranks, ties share the average position; works row-wise on 2-D input."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot rank an empty vector")
    if np.isnan(values).any():
        raise ValueError("cannot rank NaN values")
    return rankdata(values, method="average", axis=-1)


def _precision_matrix(table, key, algorithms):
    P = table.matrix(key, field="precision", algorithms=algorithms)
    if np.isnan(P).any():
        # tables written without a precision column
        from .suite import make_instance

        inst = make_instance(*key)
        scale = table.matrix(key, field="scale_factor", algorithms=algorithms)
        P = table.matrix(key, field="best_f", algorithms=algorithms) - inst.f_opt * scale
    if (P < 0).any():
        raise IntegrityError(f"negative precision for instance {key}")
    return P


def mean_ranks(table, key, algorithms=ALGORITHMS):
    """Rank the algorithms within each repetition, then average over repetitions."""
    return rank_with_ties(_precision_matrix(table, key, algorithms)).mean(axis=0)


def target_precision(record, instance):
    if record.key[:2] != instance.key:
        raise ValueError(f"record {record.key} does not belong to instance {instance.key}")
    value = record.precision if np.isfinite(record.precision) else record.best_f - instance.f_opt
    if value < 0:
        raise IntegrityError(f"precision {value!r} < 0 for {record.key}")
    return float(value)


class TargetTable:
    """One row per instance, one column per algorithm."""

    def __init__(self, kind, keys, values, algorithms=ALGORITHMS):
        if kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {kind!r}")
        self.kind = kind
        self.keys = [tuple(int(v) for v in k) for k in keys]
        self.algorithms = tuple(algorithms)
        self.values = np.asarray(values, dtype=float).reshape(len(self.keys), len(self.algorithms))
        self._row = {k: i for i, k in enumerate(self.keys)}
        if kind == "precision" and (self.values < 0).any():
            raise IntegrityError("precision targets must be non-negative")

    def __len__(self):
        return len(self.keys)

    def __eq__(self, other):
        return (
            isinstance(other, TargetTable)
            and self.kind == other.kind
            and self.keys == other.keys
            and self.algorithms == other.algorithms
            and np.array_equal(self.values, other.values)
        )

    def rows(self, keys):
        return self.values[[self._row[tuple(k)] for k in keys]]

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write(f"# kind={self.kind}\n")
            writer = csv.writer(fh)
            writer.writerow(["class_id", "instance_id", *self.algorithms])
            for k, row in zip(self.keys, self.values):
                writer.writerow([*k, *(repr(float(v)) for v in row)])

    @classmethod
    def from_csv(cls, path):
        kind = None
        lines = []
        with open(path, newline="") as fh:
            for line in fh:
                if line.startswith("# kind="):
                    kind = line.strip()[len("# kind=") :]
                elif not line.startswith("#"):
                    lines.append(line)
        rows = list(csv.reader(lines))
        header, body = rows[0], rows[1:]
        if kind is None or header[:2] != ["class_id", "instance_id"]:
            raise ValueError(f"{path}: not a target table")
        keys = [(int(r[0]), int(r[1])) for r in body]
        return cls(kind, keys, [[float(v) for v in r[2:]] for r in body], header[2:])


def build_targets(table, kind, algorithms=ALGORITHMS):
    if kind not in TARGET_KINDS:
        raise ValueError(f"unknown target kind {kind!r}; choose from {TARGET_KINDS}")
    table.check_complete(algorithms=algorithms)
    keys = table.instance_keys()
    rows = []
    for key in keys:
        if kind == "rank":
            rows.append(mean_ranks(table, key, algorithms))
        else:
            rows.append(_precision_matrix(table, key, algorithms).mean(axis=0))
    return TargetTable(kind, keys, np.vstack(rows), algorithms)
