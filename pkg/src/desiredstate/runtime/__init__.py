"""Deterministic simulation of enactment, life-cycle management and reconciliation."""

from .behaviors import (
    AdditionBehavior,
    Behavior,
    BehaviorRegistry,
    CallFailed,
    MathsBehavior,
    MultiplicationBehavior,
    default_registry,
)
from .bundle import Bundle, package, parse_bundle, serialize_bundle
from .faults import Fault, FaultScriptError, component_crash, host_crash, parse_fault_script, property_set
from .log import Event, EventLog
from .manager import Call, ComponentManager, IllegalTransition, ManagerState, SimHost, SmartProxy
from .realm import Realm, TickReport, UnknownTarget, evolve_dsd, simulate

__all__ = [
    "AdditionBehavior",
    "Behavior",
    "BehaviorRegistry",
    "Bundle",
    "Call",
    "CallFailed",
    "ComponentManager",
    "Event",
    "EventLog",
    "Fault",
    "FaultScriptError",
    "IllegalTransition",
    "ManagerState",
    "MathsBehavior",
    "MultiplicationBehavior",
    "Realm",
    "SimHost",
    "SmartProxy",
    "TickReport",
    "UnknownTarget",
    "component_crash",
    "default_registry",
    "evolve_dsd",
    "host_crash",
    "package",
    "parse_bundle",
    "parse_fault_script",
    "property_set",
    "serialize_bundle",
    "simulate",
]
