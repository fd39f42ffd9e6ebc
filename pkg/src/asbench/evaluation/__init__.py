from .audits import (
    AUDIT_CLASSES,
    AUDIT_FACTORS,
    LEAKAGE_MODELS,
    SCALE_MODELS,
    AuditData,
    check_rescaling,
    leakage_audit,
    rescaling_table,
    scale_audit,
    scale_comparison,
)
from .metrics import mse, pre
from .splits import SplitPlan, lio_splits, lpo_splits
from .stats import TestResult, friedman, wilcoxon_signed_rank

__all__ = [
    "AUDIT_CLASSES",
    "AUDIT_FACTORS",
    "AuditData",
    "LEAKAGE_MODELS",
    "SCALE_MODELS",
    "SplitPlan",
    "TestResult",
    "check_rescaling",
    "friedman",
    "leakage_audit",
    "lio_splits",
    "lpo_splits",
    "mse",
    "pre",
    "rescaling_table",
    "scale_audit",
    "scale_comparison",
    "wilcoxon_signed_rank",
]
