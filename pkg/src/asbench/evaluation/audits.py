"""The leakage audit (LIO vs LPO) and the scale audit (MSE vs PRE, rescaling)."""

from dataclasses import dataclass, field

import numpy as np

from .._validation import derive_seed
from ..features.extract import sample_seed, scale_feature
from ..features.sampling import lhs_sample
from ..metamodels import META_KINDS, fit_meta, predict_ranks, predict_values
from ..portfolio import ALGORITHMS, run_batch, run_seed
from ..suite import make_instance, rescale
from ..targets import rank_with_ties
from .metrics import mse, pre
from .stats import friedman, wilcoxon_signed_rank

LEAKAGE_MODELS = ("random", "mean", "ela", "non-inf", "class")
PRECISION_MODELS = ("mean-precision", "rf-precision")
SCALE_MODELS = ("mean-precision", "mean-rank", "rf-precision", "rf-rank")
AUDIT_CLASSES = (4, 13, 24)
AUDIT_FACTORS = (1e-2, 1e-1, 1.0, 1e1, 1e2)


@dataclass
class AuditData:
    """Feature tables plus training and ground-truth targets."""

    features: dict
    train: dict
    truth: dict
    extra: dict = field(default_factory=dict)


def _model_seed(seed, protocol, fold_id, kind):
    return derive_seed(seed, 30, 0 if protocol == "LIO" else 1, fold_id, list(META_KINDS).index(kind))


def _fit_predict(kind, data, plan, seed, forest_params, n_jobs):
    target_kind = META_KINDS[kind][1]
    model = fit_meta(
        kind,
        data.train[target_kind],
        data.features,
        keys=plan.train,
        forest_params=forest_params,
        seed=_model_seed(seed, plan.kind, plan.fold_id, kind),
        n_jobs=n_jobs,
    )
    return model, predict_values(model, plan.test, data.features)


def fold_pre(kind, data, plan, seed=0, forest_params=None, n_jobs=1):
    _, values = _fit_predict(kind, data, plan, seed, forest_params, n_jobs)
    truth = data.truth["rank"].rows(plan.test)
    return float(np.mean(pre(rank_with_ties(values), truth)))


def _summary(per_fold):
    return {m: float(np.median(v)) for m, v in per_fold.items()}


def leakage_audit(data, lio_plans, lpo_plans, models=LEAKAGE_MODELS, seed=0, forest_params=None, n_jobs=1,
                  progress=None):
    """Per-fold test PRE of every rank model under both protocols."""
    report = {}
    for protocol, plans in (("LIO", lio_plans), ("LPO", lpo_plans)):
        per_fold = {m: [] for m in models}
        for plan in plans:
            for m in models:
                per_fold[m].append(fold_pre(m, data, plan, seed, forest_params, n_jobs))
            if progress:
                progress(protocol, plan.fold_id)
        tests = {}
        for m in models:
            if m == "mean":
                continue
            res = wilcoxon_signed_rank(per_fold[m], per_fold["mean"], min_pairs=1)
            tests[f"{m}_vs_mean"] = {"statistic": res.statistic, "p_value": res.p_value, "n": res.n}
        report[protocol] = {
            "folds": [p.fold_id for p in plans],
            "pre": per_fold,
            "median_pre": _summary(per_fold),
            "wilcoxon": tests,
        }
    return report


def scale_comparison(data, lpo_plans, seed=0, forest_params=None, n_jobs=1, progress=None):
    """LPO MSE of the precision models and PRE of all four scale-audit models."""
    mse_fold = {m: [] for m in PRECISION_MODELS}
    pre_fold = {m: [] for m in SCALE_MODELS}
    for plan in lpo_plans:
        truth_rank = data.truth["rank"].rows(plan.test)
        truth_prec = data.truth["precision"].rows(plan.test)
        for m in SCALE_MODELS:
            _, values = _fit_predict(m, data, plan, seed, forest_params, n_jobs)
            pre_fold[m].append(float(np.mean(pre(rank_with_ties(values), truth_rank))))
            if m in mse_fold:
                mse_fold[m].append(mse(values, truth_prec))
        if progress:
            progress("LPO", plan.fold_id)
    w = wilcoxon_signed_rank(mse_fold["rf-precision"], mse_fold["mean-precision"])
    f = friedman(np.column_stack([pre_fold[m] for m in SCALE_MODELS]))
    rf, mean = np.array(mse_fold["rf-precision"]), np.array(mse_fold["mean-precision"])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rf > 0, mean / rf, np.inf)
    return {
        "folds": [p.fold_id for p in lpo_plans],
        "mse": mse_fold,
        "pre": pre_fold,
        "median_mse": _summary(mse_fold),
        "median_pre": _summary(pre_fold),
        "rf_wins": int((rf < mean).sum()),
        "median_mse_ratio": float(np.median(ratio)),
        "wilcoxon_mse": {"statistic": w.statistic, "p_value": w.p_value, "n": w.n},
        "friedman_pre": {"statistic": f.statistic, "p_value": f.p_value, "n": f.n},
    }


def rescaling_table(
    budget,
    repetitions,
    master_seed,
    classes=AUDIT_CLASSES,
    factors=AUDIT_FACTORS,
    instance_id=1,
    dim=5,
    samples_per_dim=250,
    feature_seed=0,
    algorithms=ALGORITHMS,
):
    """Per (class, factor, algorithm): f_scale, mean precision and mean rank, paired seeds."""
    rows = []
    for c in classes:
        base = make_instance(c, instance_id, dim)
        s_seed = sample_seed(feature_seed, c, instance_id)
        for factor in factors:
            inst = rescale(base, factor)
            f_scale = scale_feature(lhs_sample(inst, samples_per_dim * dim, s_seed)).values["f_scale"]
            P = np.column_stack(
                [
                    run_batch(
                        a, inst, budget,
                        [run_seed(master_seed, c, instance_id, a, r, "audit") for r in range(repetitions)],
                    )[0]
                    for a in algorithms
                ]
            )
            ranks = rank_with_ties(P).mean(axis=0)
            for j, a in enumerate(algorithms):
                rows.append(
                    {
                        "class_id": c,
                        "instance_id": instance_id,
                        "factor": factor,
                        "algorithm": a,
                        "f_scale": f_scale,
                        "precision": float(P[:, j].mean()),
                        "rank": float(ranks[j]),
                    }
                )
    return rows


def check_rescaling(rows, rtol=1e-6):
    """Ranks identical across factors; precision and f_scale proportional to the factor."""
    groups = {}
    for r in rows:
        groups.setdefault((r["class_id"], r["algorithm"]), []).append(r)
    ranks_equal, prec_ok, scale_ok = True, True, True
    for grp in groups.values():
        ref = next((r for r in grp if r["factor"] == 1.0), grp[0])
        for r in grp:
            k = r["factor"] / ref["factor"]
            ranks_equal &= r["rank"] == ref["rank"]
            prec_ok &= bool(np.isclose(r["precision"], k * ref["precision"], rtol=rtol, atol=0.0))
            scale_ok &= bool(np.isclose(r["f_scale"], k * ref["f_scale"], rtol=rtol, atol=0.0))
    return {"ranks_identical": bool(ranks_equal), "precision_proportional": bool(prec_ok),
            "f_scale_proportional": bool(scale_ok)}


def scale_audit(data, lpo_plans, budget, repetitions, master_seed, seed=0, forest_params=None, n_jobs=1,
                samples_per_dim=250, feature_seed=0, dim=5, progress=None):
    report = scale_comparison(data, lpo_plans, seed, forest_params, n_jobs, progress)
    rows = rescaling_table(budget, repetitions, master_seed, dim=dim, samples_per_dim=samples_per_dim,
                           feature_seed=feature_seed)
    report["rescaling"] = {"rows": rows, "checks": check_rescaling(rows)}
    return report
