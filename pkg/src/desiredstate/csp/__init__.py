"""Finite-domain solver over 0/1 variables and linear constraints."""

from .model import (
    Capture,
    CspVariable,
    EnumerationResult,
    LinearConstraint,
    Model,
    Propagation,
    Search,
    SolveLimits,
    warm_up,
)

__all__ = [
    "Capture",
    "CspVariable",
    "EnumerationResult",
    "LinearConstraint",
    "Model",
    "Propagation",
    "Search",
    "SolveLimits",
    "warm_up",
]
