"""Cached end-to-end pipeline: suite -> runs -> features -> targets -> audits.

Every CSV artifact starts with a ``# digest=<hex>`` line holding the digest
of the config keys its stage depends on.  A stage whose file exists with a
matching digest is loaded instead of recomputed; a recomputed stage forces
every downstream stage to recompute too.
"""

import csv
import json
import logging
import math
import os
import time

from . import __version__
from .config import BenchConfig
from .evaluation import AuditData, leakage_audit, lio_splits, lpo_splits, scale_audit
from .features import FeatureTable, N_ELA, extract_features, noninf_spec
from .portfolio import RunTable, run_streams
from .suite import N_CLASSES, list_suite
from .targets import TargetTable, build_targets

logger = logging.getLogger(__name__)

RUN_FILES = {"train": "runs.csv", "truth": "runs-truth.csv"}


class StaleCacheError(RuntimeError):
    """A cached artifact does not match the current config and recomputation is disabled."""


def read_digest(path):
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("# digest="):
        return first.split()[1][len("digest=") :]
    if path.endswith(".json"):
        try:
            with open(path) as fh:
                return json.load(fh).get("config_digest")
        except ValueError:
            return None
    return None


class Pipeline:
    def __init__(self, config, no_recompute=False, progress=True):
        self.config = config
        self.out = config.output_dir
        self.no_recompute = no_recompute
        self.progress = progress
        self.recomputed = []

    def path(self, name):
        return os.path.join(self.out, name)

    def _fresh(self, name, stage, upstream_dirty=False):
        """True when the cached file can be reused."""
        digest = self.config.stage_digest(stage)
        found = read_digest(self.path(name))
        if found == digest and not upstream_dirty:
            return True
        if self.no_recompute:
            why = "missing" if found is None else "stale" if found != digest else "older than its inputs"
            raise StaleCacheError(f"{self.path(name)} is {why} and --no-recompute is set")
        return False

    def _header(self, stage):
        return f"digest={self.config.stage_digest(stage)} version={__version__}"

    def suite(self):
        return list_suite(self.config.dim, self.config.instances_per_class)

    # stages ---------------------------------------------------------------

    def runs(self):
        c = self.config
        need = {s: (c.train_repetitions if s == "train" else c.truth_repetitions)
                for s, f in RUN_FILES.items() if not self._fresh(f, f"runs-{s}")}
        tables = {}
        if need:
            logger.info("running portfolio: %s", ", ".join(f"{s} x{r}" for s, r in need.items()))
            t0 = time.time()

            def report(i, total):
                if self.progress and (i % 50 == 0 or i == total):
                    logger.info("  portfolio %d/%d units (%.0fs)", i, total, time.time() - t0)

            tables = run_streams(self.suite(), c.budget, need, c.master_seed, c.n_jobs, c.algorithms, report)
            for s, table in tables.items():
                table.to_csv(self.path(RUN_FILES[s]), self._header(f"runs-{s}"))
                self.recomputed.append(RUN_FILES[s])
        for s, f in RUN_FILES.items():
            if s not in tables:
                tables[s] = RunTable.from_csv(self.path(f))
        self._runs_dirty = set(need)
        return tables

    def features(self):
        c = self.config
        tables = {}
        for fs in c.feature_sets:
            name = f"features-{fs}.csv"
            if self._fresh(name, f"features-{fs}"):
                tables[fs] = FeatureTable.from_csv(self.path(name))
                continue
            logger.info("extracting %s features", fs)
            spec = noninf_spec(c.noninf_count or N_ELA, c.master_seed) if fs == "noninf" else None
            table = extract_features(self.suite(), fs, c.master_seed, c.samples_per_dim, spec=spec)
            table.to_csv(self.path(name), self._header(f"features-{fs}"))
            self.recomputed.append(name)
            tables[fs] = table
        return tables

    def targets(self, runs):
        out = {}
        for which in ("train", "truth"):
            for kind in ("rank", "precision"):
                name = f"targets-{which}-{kind}.csv"
                stage = f"targets-{which}-{kind}"
                if self._fresh(name, stage, upstream_dirty=which in self._runs_dirty):
                    out[(which, kind)] = TargetTable.from_csv(self.path(name))
                    continue
                table = build_targets(runs[which], kind, self.config.algorithms)
                table.to_csv(self.path(name), self._header(stage))
                self.recomputed.append(name)
                out[(which, kind)] = table
        return out

    def audits(self, features, targets):
        c = self.config
        data = AuditData(
            features=features,
            train={k: targets[("train", k)] for k in ("rank", "precision")},
            truth={k: targets[("truth", k)] for k in ("rank", "precision")},
        )
        suite_keys = [i.key for i in self.suite()]
        lio = lio_splits(suite_keys, c.lio_test_fraction, c.lio_repeats, seed=c.master_seed)
        lpo = lpo_splits(suite_keys)
        fp = c.forest_params()

        def report(protocol, fold):
            if self.progress:
                logger.info("  %s fold %s done", protocol, fold)

        result = {}
        if c.leakage_audit:
            logger.info("leakage audit")
            result["leakage"] = leakage_audit(data, lio, lpo, seed=c.master_seed, forest_params=fp,
                                              n_jobs=c.n_jobs, progress=report)
        if c.scale_audit:
            logger.info("scale audit")
            result["scale"] = scale_audit(
                data, lpo, c.budget, c.audit_repetitions, c.master_seed, seed=c.master_seed, forest_params=fp,
                n_jobs=c.n_jobs, samples_per_dim=c.samples_per_dim, feature_seed=c.master_seed, dim=c.dim,
                progress=report,
            )
        return result

    # orchestration --------------------------------------------------------

    def run(self):
        os.makedirs(self.out, exist_ok=True)
        runs = self.runs()
        features = self.features()
        targets = self.targets(runs)
        report_path = self.path("report.json")
        if self.recomputed or not self._fresh("report.json", "report"):
            audits = self.audits(features, targets)
            report = build_report(self.config, audits, runs)
            write_json(report_path, report)
            write_plot_data(self.out, report)
            self.recomputed.append("report.json")
        else:
            with open(report_path) as fh:
                report = json.load(fh)
        write_manifest(self.path("MANIFEST"), self.config, runs)
        return report


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_clean(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_report(config, audits, runs):
    from .acceptance import evaluate_report

    report = {
        "tool": "asbench",
        "version": __version__,
        "config_digest": config.digest(),
        "config": config.canonical(),
        "runs": {s: len(t) for s, t in runs.items()},
        **audits,
    }
    report["acceptance"] = [r._asdict() for r in evaluate_report(_clean(report))]
    return _clean(report)


def write_plot_data(out, report):
    digest = report["config_digest"]
    if "leakage" in report:
        with open(os.path.join(out, "plotdata-fig1.csv"), "w", newline="") as fh:
            fh.write(f"# digest={digest}\n")
            w = csv.writer(fh)
            w.writerow(["protocol", "fold", "model", "pre"])
            for protocol, block in report["leakage"].items():
                for model, values in block["pre"].items():
                    for fold, v in zip(block["folds"], values):
                        w.writerow([protocol, fold, model, repr(v)])
    if "scale" in report:
        sc = report["scale"]
        with open(os.path.join(out, "plotdata-fig2.csv"), "w", newline="") as fh:
            fh.write(f"# digest={digest}\n")
            w = csv.writer(fh)
            cols = ["class_id", "instance_id", "factor", "algorithm", "f_scale", "precision", "rank"]
            w.writerow(cols)
            for row in sc["rescaling"]["rows"]:
                w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
        with open(os.path.join(out, "plotdata-fig3.csv"), "w", newline="") as fh:
            fh.write(f"# digest={digest}\n")
            w = csv.writer(fh)
            w.writerow(["fold", "model", "metric", "value"])
            for metric in ("mse", "pre"):
                for model, values in sc[metric].items():
                    for fold, v in zip(sc["folds"], values):
                        w.writerow([fold, model, metric, repr(v)])
    with open(os.path.join(out, "report-folds.csv"), "w", newline="") as fh:
        fh.write(f"# digest={digest}\n")
        w = csv.writer(fh)
        w.writerow(["protocol", "fold", "model", "metric", "value"])
        for protocol, block in report.get("leakage", {}).items():
            for model, values in block["pre"].items():
                for fold, v in zip(block["folds"], values):
                    w.writerow([protocol, fold, model, "pre", repr(v)])
        if "scale" in report:
            sc = report["scale"]
            for metric in ("mse", "pre"):
                for model, values in sc[metric].items():
                    for fold, v in zip(sc["folds"], values):
                        w.writerow(["LPO", fold, model, metric, repr(v)])


def write_manifest(path, config, runs):
    stages = ["runs-train", "runs-truth"] + [f"features-{fs}" for fs in config.feature_sets] + [
        f"targets-{w}-{k}" for w in ("train", "truth") for k in ("rank", "precision")
    ]
    manifest = {
        "tool": "asbench",
        "version": __version__,
        "config_digest": config.digest(),
        "master_seed": config.master_seed,
        "seed_streams": {"train": 1, "truth": 2, "audit": 3},
        "training_runs": len(runs["train"]),
        "truth_runs": len(runs["truth"]),
        "stage_digests": {s: config.stage_digest(s) for s in stages},
    }
    write_json(path, manifest)


def planned_runs(config):
    """(training runs, ground-truth runs) the config asks for."""
    per_rep = N_CLASSES * config.instances_per_class * len(config.algorithms)
    return per_rep * config.train_repetitions, per_rep * config.truth_repetitions


def run_pipeline(config=None, no_recompute=False, progress=True):
    return Pipeline(config or BenchConfig(), no_recompute=no_recompute, progress=progress).run()
