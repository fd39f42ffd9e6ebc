"""Command-line entry point ``asbench``.

Exit codes: 0 success, 1 runtime or usage error, 2 acceptance check failed.
"""

import argparse
import csv
import json
import logging
import sys

import numpy as np

from . import __version__
from .acceptance import evaluate_report, format_line, property_criteria
from .config import load_config
from .features import FEATURE_SETS, FeatureTable, N_ELA, extract_features, lhs_sample, noninf_spec
from .pipeline import StaleCacheError, run_pipeline
from .portfolio import ALGORITHMS, RunTable, run_portfolio
from .suite import list_suite
from .targets import TARGET_KINDS, build_targets

EXIT_OK, EXIT_ERROR, EXIT_CHECK_FAILED = 0, 1, 2

log = logging.getLogger("asbench")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _suite(args):
    suite = list_suite(args.dim, args.instances)
    if getattr(args, "classes", None):
        wanted = {int(c) for c in args.classes.split(",")}
        suite = [i for i in suite if i.class_id in wanted]
    return suite


def cmd_suite_list(args):
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["class_id", "instance_id", "dim", "f_opt", "f_range_estimate"])
        for inst in _suite(args):
            y = lhs_sample(inst, 250 * inst.dim, args.seed).Y_raw
            w.writerow([inst.class_id, inst.instance_id, inst.dim, repr(inst.f_opt), repr(float(y.max() - y.min()))])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_portfolio_run(args):
    suite = _suite(args)
    algorithms = tuple(args.algorithms.split(",")) if args.algorithms else ALGORITHMS
    table = run_portfolio(suite, args.budget_per_dim * args.dim, args.reps, args.seed, stream=args.stream,
                          n_jobs=args.jobs, algorithms=algorithms)
    table.to_csv(args.out, f"seed={args.seed} stream={args.stream} version={__version__}")
    log.info("wrote %d runs to %s", len(table), args.out)
    return EXIT_OK


def cmd_features_extract(args):
    spec = noninf_spec(args.noninf_count or N_ELA, args.seed) if args.set == "noninf" else None
    table = extract_features(_suite(args), args.set, args.seed, args.samples_per_dim, spec=spec)
    table.to_csv(args.out, f"seed={args.seed} version={__version__}")
    log.info("wrote %s features for %d instances to %s", args.set, len(table), args.out)
    return EXIT_OK


def cmd_targets_build(args):
    table = build_targets(RunTable.from_csv(args.runs), args.kind)
    table.to_csv(args.out, f"runs={args.runs} version={__version__}")
    log.info("wrote %s targets for %d instances to %s", args.kind, len(table), args.out)
    return EXIT_OK


def _config(args, **extra):
    overrides = {"output_dir": getattr(args, "out_dir", None), "master_seed": getattr(args, "seed", None),
                 "n_jobs": getattr(args, "jobs", None), **extra}
    for item in getattr(args, "set_values", None) or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v
    return load_config(args.config, overrides)


def cmd_audit(args):
    which = args.which
    config = _config(args, leakage_audit=which == "leakage", scale_audit=which == "scale")
    report = run_pipeline(config, no_recompute=args.no_recompute)
    print_report(report, sys.stdout)
    return EXIT_OK


def cmd_run(args):
    report = run_pipeline(_config(args), no_recompute=args.no_recompute)
    print_report(report, sys.stdout)
    return EXIT_OK


def load_report(path):
    with open(path) as fh:
        text = fh.read()
    try:
        report = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed report at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(report, dict) or "config_digest" not in report:
        raise ValueError(f"{path}: not an asbench report (no config_digest at top level)")
    return report


def _table(rows, header, out):
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    for r in [header, *rows]:
        out.write("  ".join(str(v).ljust(w) for v, w in zip(r, widths)) + "\n")


def print_report(report, out):
    out.write(f"report version {report.get('version')} config {report['config_digest'][:12]}\n")
    if "leakage" in report:
        out.write("\nleakage audit: median PRE\n")
        lk = report["leakage"]
        models = list(lk["LIO"]["median_pre"])
        rows = [[m] + [f"{lk[p]['median_pre'][m]:.4f}" for p in ("LIO", "LPO")] for m in models]
        _table(rows, ["model", "LIO", "LPO"], out)
        for p in ("LIO", "LPO"):
            for name, t in lk[p]["wilcoxon"].items():
                out.write(f"  {p} Wilcoxon {name}: W={t['statistic']:g} p={t['p_value']:.4g}\n")
    if "scale" in report:
        sc = report["scale"]
        out.write("\nscale audit (LPO): median MSE\n")
        _table([[m, f"{v:.4g}"] for m, v in sc["median_mse"].items()], ["model", "MSE"], out)
        out.write("\nscale audit (LPO): median PRE\n")
        _table([[m, f"{v:.4f}"] for m, v in sc["median_pre"].items()], ["model", "PRE"], out)
        w, f = sc["wilcoxon_mse"], sc["friedman_pre"]
        out.write(f"  Wilcoxon MSE rf-precision vs mean-precision: W={w['statistic']:g} p={w['p_value']:.4g}\n")
        out.write(f"  Friedman PRE over 4 models: chi2={f['statistic']:.4g} p={f['p_value']:.4g}\n")
        out.write(f"  rescaling checks: {sc['rescaling']['checks']}\n")
    if "acceptance" in report:
        out.write("\nacceptance (from report)\n")
        for c in report["acceptance"]:
            out.write(f"  {c['number']:2d} {'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['detail']}\n")


def cmd_report(args):
    report = load_report(args.report)
    print_report(report, sys.stdout)
    if not args.check:
        return EXIT_OK
    results = evaluate_report(report) + property_criteria()
    print()
    for c in results:
        print(format_line(c))
    return EXIT_OK if all(c.passed for c in results) else EXIT_CHECK_FAILED


def build_parser():
    p = _Parser(prog="asbench", description="Algorithm-selection benchmark with leakage and scale audits.")
    p.add_argument("--version", action="version", version=f"asbench {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def suite_args(sp, with_classes=True):
        sp.add_argument("--dim", type=int, default=5)
        sp.add_argument("--instances", type=int, default=15, help="instances per class")
        if with_classes:
            sp.add_argument("--classes", help="comma-separated class ids (default: all 24)")

    s = sub.add_parser("suite").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = s.add_parser("list", help="list suite instances as CSV")
    suite_args(sp)
    sp.add_argument("--seed", type=int, default=0, help="seed of the sample used for the f-range estimate")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_suite_list)

    s = sub.add_parser("portfolio").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = s.add_parser("run", help="run the portfolio and write a run table")
    suite_args(sp)
    sp.add_argument("--budget-per-dim", type=int, default=1000)
    sp.add_argument("--reps", type=int, default=30)
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--stream", choices=("train", "truth", "audit"), default="train")
    sp.add_argument("--algorithms", help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_portfolio_run)

    s = sub.add_parser("features").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = s.add_parser("extract", help="extract one feature set for every instance")
    suite_args(sp)
    sp.add_argument("--set", choices=FEATURE_SETS, required=True)
    sp.add_argument("--samples-per-dim", type=int, default=250)
    sp.add_argument("--noninf-count", type=int, default=0, help="0 means as many as the ELA set")
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_features_extract)

    s = sub.add_parser("targets").add_subparsers(dest="action", required=True, parser_class=_Parser)
    sp = s.add_parser("build", help="turn a run table into mean-rank or precision targets")
    sp.add_argument("--kind", choices=TARGET_KINDS, required=True)
    sp.add_argument("--runs", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_targets_build)

    def pipeline_args(sp):
        sp.add_argument("--config", help="INI config file (defaults reproduce the full experiment)")
        sp.add_argument("--out-dir")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--set", dest="set_values", action="append", metavar="KEY=VALUE",
                        help="override any config key")
        sp.add_argument("--no-recompute", action="store_true", help="fail instead of recomputing stale stages")

    s = sub.add_parser("audit").add_subparsers(dest="which", required=True, parser_class=_Parser)
    for which in ("leakage", "scale"):
        sp = s.add_parser(which, help=f"run the pipeline up to the {which} audit")
        pipeline_args(sp)
        sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("run", help="run the whole pipeline with caching")
    pipeline_args(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("report", help="summarise a report.json")
    sp.add_argument("report", nargs="?", default="results/report.json")
    sp.add_argument("--check", action="store_true", help="exit 2 unless every acceptance criterion passes")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s",
                        stream=sys.stderr)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except (StaleCacheError, ValueError, KeyError, OSError) as exc:
        log.error("error: %s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
