import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from asbench.config import load_config
from asbench.pipeline import run_pipeline

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

MINI = {
    "instances_per_class": 2,
    "budget_per_dim": 100,
    "train_repetitions": 2,
    "truth_repetitions": 3,
    "samples_per_dim": 20,
    "n_estimators": 5,
    "lio_repeats": 2,
    "audit_repetitions": 2,
}


def mini_config(out_dir, **extra):
    return load_config(None, {**MINI, "output_dir": str(out_dir), **extra})


@pytest.fixture(scope="session")
def mini_run(tmp_path_factory):
    """A tiny end-to-end pipeline run shared by the pipeline and CLI tests."""
    out = tmp_path_factory.mktemp("mini")
    config = mini_config(out)
    np.seterr(all="ignore")
    report = run_pipeline(config, progress=False)
    return config, report


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
