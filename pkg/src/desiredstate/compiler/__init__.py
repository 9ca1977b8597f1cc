"""Compile a resolved description into a solver model and back."""

from .decode import compile_dsd, count_configurations, decode, explain, iter_configurations
from .generate import PotentialConnection, PotentialInstance, SpecializedCsp, generate_model
from .lower import CompileError, lower_constraints, mentions_dynamic

__all__ = [
    "CompileError",
    "PotentialConnection",
    "PotentialInstance",
    "SpecializedCsp",
    "compile_dsd",
    "count_configurations",
    "decode",
    "explain",
    "generate_model",
    "iter_configurations",
    "lower_constraints",
    "mentions_dynamic",
]
