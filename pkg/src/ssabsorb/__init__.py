"""Absorption-time laws of positive self-similar Markov processes."""

from .levy_model import (
    BoundedVariation,
    ExpMixture,
    ExponentHandle,
    LevyModel,
    NoJumps,
    TabulatedDensity,
    UnboundedVariation,
    bessel_model,
    sawtooth_model,
)

__version__ = "0.1.0"
