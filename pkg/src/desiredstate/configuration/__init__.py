"""Configuration descriptions, compliance checking, and deployment deltas."""

from .cdd import CddFormatError, ConfigurationDescription, Connection, Instance, parse_cdd, serialize_cdd
from .delta import (
    DeploymentDelta,
    NoConfiguration,
    PickerPolicy,
    PickResult,
    Weights,
    apply_delta,
    delta,
    pick,
)
from .evaluate import evaluate_conjunct, objective_value, rank_by_objective
from .validate import ComplianceReport, Record, UnknownReference, validate

__all__ = [
    "CddFormatError",
    "ComplianceReport",
    "ConfigurationDescription",
    "Connection",
    "DeploymentDelta",
    "Instance",
    "NoConfiguration",
    "PickResult",
    "PickerPolicy",
    "Record",
    "UnknownReference",
    "Weights",
    "apply_delta",
    "delta",
    "evaluate_conjunct",
    "objective_value",
    "pick",
    "parse_cdd",
    "rank_by_objective",
    "serialize_cdd",
    "validate",
]
