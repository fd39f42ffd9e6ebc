"""Benchmark configuration: INI file in, frozen dataclass plus stable digests out."""

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace

from ._validation import check_positive_int
from .portfolio import ALGORITHMS

FEATURE_SET_NAMES = ("ela", "noninf", "class", "scale")


@dataclass(frozen=True)
class BenchConfig:
    # suite
    dim: int = 5
    instances_per_class: int = 15
    # portfolio
    budget_per_dim: int = 1000
    train_repetitions: int = 30
    truth_repetitions: int = 100
    algorithms: tuple = ALGORITHMS
    # features
    samples_per_dim: int = 250
    feature_sets: tuple = FEATURE_SET_NAMES
    noninf_count: int = 0  # 0 means "as many as the ELA set"
    # forest
    n_estimators: int = 100
    max_depth: int = 0  # 0 means unlimited
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    max_features: float = 1.0
    bootstrap: bool = True
    # splits
    lio_test_fraction: float = 1 / 3
    lio_repeats: int = 10
    # audits
    leakage_audit: bool = True
    scale_audit: bool = True
    audit_repetitions: int = 30
    # run
    master_seed: int = 2024
    n_jobs: int = 1
    output_dir: str = field(default="results", compare=False)

    def __post_init__(self):
        for name in (
            "dim", "instances_per_class", "budget_per_dim", "train_repetitions", "truth_repetitions",
            "samples_per_dim", "n_estimators", "min_samples_leaf", "lio_repeats", "audit_repetitions", "n_jobs",
        ):
            check_positive_int(getattr(self, name), name)
        check_positive_int(self.min_samples_split, "min_samples_split", minimum=2)
        if self.noninf_count < 0 or self.max_depth < 0:
            raise ValueError("noninf_count and max_depth must be >= 0")
        if not 0 < self.max_features <= 1:
            raise ValueError("max_features must lie in (0, 1]")
        if not 0 < self.lio_test_fraction < 1:
            raise ValueError("lio_test_fraction must lie in (0, 1)")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}")
        unknown = set(self.feature_sets) - set(FEATURE_SET_NAMES)
        if unknown:
            raise ValueError(f"unknown feature sets {sorted(unknown)}")

    @property
    def budget(self):
        return self.budget_per_dim * self.dim

    def forest_params(self):
        return {
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth or None,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
        }

    def canonical(self):
        d = asdict(self)
        d.pop("output_dir")
        d.pop("n_jobs")  # parallelism never changes outputs
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    def digest(self):
        return _sha(self.canonical())

    def stage_digest(self, stage):
        """Digest of the config keys (and upstream stages) a pipeline stage depends on."""
        c = self.canonical()
        suite = {k: c[k] for k in ("dim", "instances_per_class")}
        if stage in ("runs-train", "runs-truth"):
            reps = c["train_repetitions" if stage == "runs-train" else "truth_repetitions"]
            keys = {"budget_per_dim": c["budget_per_dim"], "algorithms": c["algorithms"],
                    "master_seed": c["master_seed"], "repetitions": reps}
            return _sha({"stage": stage, **suite, **keys})
        if stage.startswith("features-"):
            keys = {"samples_per_dim": c["samples_per_dim"], "master_seed": c["master_seed"]}
            if stage == "features-noninf":
                keys["noninf_count"] = c["noninf_count"]
            return _sha({"stage": stage, **suite, **keys})
        if stage.startswith("targets-"):
            which, kind = stage.split("-")[1:]
            return _sha({"stage": stage, "kind": kind, "runs": self.stage_digest(f"runs-{which}")})
        if stage == "report":
            return self.digest()
        raise ValueError(f"unknown stage {stage!r}")


def _sha(obj):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def _parse_value(f, raw):
    if f.type in (bool, "bool"):
        low = raw.strip().lower()
        if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
            raise ValueError(f"{f.name}: not a boolean: {raw!r}")
        return low in ("1", "true", "yes", "on")
    if f.type in (int, "int"):
        return int(raw)
    if f.type in (float, "float"):
        if "/" in raw:
            num, den = raw.split("/")
            return float(num) / float(den)
        return float(raw)
    if f.type in (tuple, "tuple"):
        return tuple(p.strip() for p in raw.split(",") if p.strip())
    return raw.strip()


def load_config(path=None, overrides=None):
    """Read an INI file (section names are ignored, keys are unique) and apply overrides."""
    by_name = {f.name: f for f in fields(BenchConfig)}
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path) as fh:
            parser.read_file(fh)
        for section in parser.sections():
            for key, raw in parser.items(section):
                if key not in by_name:
                    raise ValueError(f"{path}: unknown key {key!r} in section [{section}]")
                values[key] = _parse_value(by_name[key], raw)
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in by_name:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = _parse_value(by_name[key], val) if isinstance(val, str) else val
    return replace(BenchConfig(), **values)


def write_config(config, path):
    sections = {
        "suite": ("dim", "instances_per_class"),
        "portfolio": ("budget_per_dim", "train_repetitions", "truth_repetitions", "algorithms"),
        "features": ("samples_per_dim", "feature_sets", "noninf_count"),
        "forest": ("n_estimators", "max_depth", "min_samples_split", "min_samples_leaf", "max_features",
                   "bootstrap"),
        "splits": ("lio_test_fraction", "lio_repeats"),
        "audit": ("leakage_audit", "scale_audit", "audit_repetitions"),
        "run": ("master_seed", "n_jobs", "output_dir"),
    }
    parser = configparser.ConfigParser()
    for sec, keys in sections.items():
        parser[sec] = {}
        for k in keys:
            v = getattr(config, k)
            parser[sec][k] = ",".join(v) if isinstance(v, tuple) else repr(v) if isinstance(v, float) else str(v)
    with open(path, "w") as fh:
        parser.write(fh)
