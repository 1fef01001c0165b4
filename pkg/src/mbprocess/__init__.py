"""Discrete and continuous Muttalib-Borodin processes: samplers, kernels, LPP."""

from .core_types import (
    DomainError,
    InterlacingSequence,
    ModelParams,
    Partition,
    RealVector,
    TimeIndex,
    interlaces_continuous,
    interlaces_discrete,
    slice_length_bound,
    to_particle_positions,
)
from .special_functions import ConvergenceError, PoleError, RNGStream

__version__ = "0.1.0"
