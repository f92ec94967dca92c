"""Exact series expansions for the zeros of the deformed exponential function.

The core objects are the integer polynomial tables P_n(k), their companions
P-hat_n(k) and the denominators Q_n(k); on top of them sit positivity
certificates, real-root isolation on (1, inf) and multiprecision checks of
the resulting expansions.
"""

from .errors import (
    IntegralityViolation,
    NoConvergence,
    NonPositiveLeading,
    NotDivisible,
    PrecisionExhausted,
    StabilizationFailure,
)
from .exactnum import IntPoly
from .expansion import PolyTable, compute_P, compute_Phat, compute_tables
from .numtheory import QTable, build_qtable

__version__ = "0.1.0"

__all__ = [
    "IntPoly",
    "IntegralityViolation",
    "NoConvergence",
    "NonPositiveLeading",
    "NotDivisible",
    "PolyTable",
    "PrecisionExhausted",
    "QTable",
    "StabilizationFailure",
    "build_qtable",
    "compute_P",
    "compute_Phat",
    "compute_tables",
]
