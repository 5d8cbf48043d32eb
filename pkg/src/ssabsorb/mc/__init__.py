"""Monte Carlo oracle for the absorption time, exit problems and stable maxima."""

from .backend import backend, compiled_available
from .oracle import (
    MCConfig,
    MCEstimate,
    SigmaSample,
    affine_recomposition,
    estimate_exit,
    estimate_hitting_laplace,
    estimate_survival,
    sample_sigma,
    simulate_sigma,
    simulate_stable_max,
    thread_count,
)

__all__ = [
    "MCConfig",
    "MCEstimate",
    "SigmaSample",
    "affine_recomposition",
    "backend",
    "compiled_available",
    "estimate_exit",
    "estimate_hitting_laplace",
    "estimate_survival",
    "sample_sigma",
    "simulate_sigma",
    "simulate_stable_max",
    "thread_count",
]
