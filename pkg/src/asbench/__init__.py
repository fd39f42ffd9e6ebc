"""Algorithm-selection benchmark with leakage and scale audits."""

__version__ = "0.1.0"

from .suite import evaluate, list_suite, make_instance, rescale  # noqa: E402

__all__ = ["__version__", "evaluate", "list_suite", "make_instance", "rescale"]
