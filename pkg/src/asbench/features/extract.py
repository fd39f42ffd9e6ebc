"""Feature vectors, per-suite extraction and the feature table CSV format."""

import csv
from dataclasses import dataclass

import numpy as np

from .._validation import derive_seed
from .ela import FEATURE_NAMES as ELA_NAMES
from .ela import ela_values
from .noninf import noninf_spec, noninf_values
from .sampling import DesignSample, lhs_sample

FEATURE_SETS = ("ela", "noninf", "class", "scale")
N_ELA = len(ELA_NAMES)
SAMPLES_PER_DIM = 250


@dataclass(frozen=True)
class FeatureVector:
    values: dict
    tag: str

    def __post_init__(self):
        if self.tag not in FEATURE_SETS:
            raise ValueError(f"unknown feature set {self.tag!r}")
        bad = [k for k, v in self.values.items() if not np.isfinite(v)]
        if bad:
            raise ValueError(f"non-finite feature values: {bad}")

    @property
    def names(self):
        return list(self.values)

    def to_array(self):
        return np.array(list(self.values.values()), dtype=float)


def _y_scaled(sample):
    return sample.Y_scaled if isinstance(sample, DesignSample) else np.asarray(sample, dtype=float)


def ela_features(sample, seed=0):
    values, _ = ela_values(sample.X, sample.Y_scaled, seed=seed)
    return FeatureVector(dict(zip(ELA_NAMES, values.tolist())), "ela")


def noninf_features(sample, spec):
    """``agg(tr(sc * y))`` per recipe; ``sample`` may be a DesignSample or a y vector."""
    values = noninf_values(_y_scaled(sample), spec)
    return FeatureVector(dict(zip(spec.names(), values.tolist())), "noninf")


def class_feature(instance):
    return FeatureVector({"class": float(instance.class_id)}, "class")


def scale_feature(sample):
    y = sample.Y_raw
    return FeatureVector({"f_scale": float(y.max() - y.min())}, "scale")


def sample_seed(master_seed, class_id, instance_id):
    return derive_seed(master_seed, 10, class_id, instance_id)


class FeatureTable:
    """Rows keyed by (class_id, instance_id), one column per feature."""

    def __init__(self, keys, names, values, tag):
        self.keys = [tuple(int(v) for v in k) for k in keys]
        self.names = list(names)
        self.values = np.asarray(values, dtype=float).reshape(len(self.keys), len(self.names))
        self.tag = tag
        self._row = {k: i for i, k in enumerate(self.keys)}
        if len(self._row) != len(self.keys):
            raise ValueError("duplicate instance keys in feature table")

    def __len__(self):
        return len(self.keys)

    def __eq__(self, other):
        return (
            isinstance(other, FeatureTable)
            and self.keys == other.keys
            and self.names == other.names
            and self.tag == other.tag
            and np.array_equal(self.values, other.values)
        )

    def rows(self, keys):
        return self.values[[self._row[tuple(k)] for k in keys]]

    def to_csv(self, path, header_comment=None):
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write(f"# set={self.tag}\n")
            writer = csv.writer(fh)
            writer.writerow(["class_id", "instance_id", *self.names])
            for k, row in zip(self.keys, self.values):
                writer.writerow([*k, *(repr(float(v)) for v in row)])

    @classmethod
    def from_csv(cls, path):
        tag = None
        with open(path, newline="") as fh:
            lines = []
            for line in fh:
                if line.startswith("# set="):
                    tag = line.strip()[len("# set=") :]
                elif not line.startswith("#"):
                    lines.append(line)
        rows = list(csv.reader(lines))
        header, body = rows[0], rows[1:]
        if header[:2] != ["class_id", "instance_id"]:
            raise ValueError(f"{path}: not a feature table")
        keys = [(int(r[0]), int(r[1])) for r in body]
        values = [[float(v) for v in r[2:]] for r in body]
        return cls(keys, header[2:], values, tag or "ela")


def extract_features(suite, feature_set, seed, samples_per_dim=SAMPLES_PER_DIM, spec=None, ela_seed=0):
    """Compute one feature set for every instance of ``suite``.

    Every set draws the same LHS sample per instance, so the sets differ only
    in what they compute from it.
    """
    if feature_set not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {feature_set!r}; choose from {FEATURE_SETS}")
    if feature_set == "noninf" and spec is None:
        spec = noninf_spec(N_ELA, seed)
    keys, rows, names = [], [], None
    for inst in suite:
        if feature_set == "class":
            fv = class_feature(inst)
        else:
            sample = lhs_sample(inst, samples_per_dim * inst.dim, sample_seed(seed, inst.class_id, inst.instance_id))
            if feature_set == "ela":
                fv = ela_features(sample, seed=ela_seed)
            elif feature_set == "noninf":
                fv = noninf_features(sample, spec)
            else:
                fv = scale_feature(sample)
        keys.append(inst.key[:2])
        rows.append(fv.to_array())
        names = fv.names
    return FeatureTable(keys, names, np.vstack(rows), feature_set)

