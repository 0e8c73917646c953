"""Pressure and Lyapunov entropy spectra of one-step matrix cocycles
over mixing subshifts of finite type."""

from .cocycle import OneStepCocycle
from .sft import TransitionMatrix, full_shift, validate

__version__ = "0.1.0"

__all__ = [
    "OneStepCocycle",
    "TransitionMatrix",
    "full_shift",
    "validate",
    "__version__",
]
