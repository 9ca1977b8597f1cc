"""Resolved desired-state descriptions.

Everything here is immutable and compares structurally; source positions
and the description's name are carried along but ignored by ``==``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

from . import expr as ex
from .ast import Bind, Instantiate, MethodRef, Satisfy  # noqa: F401  (re-exported)


@dataclass(frozen=True)
class Interface:
    name: str
    impl_type: str
    specification: str
    implementation: str


@dataclass(frozen=True)
class Port:
    name: str
    interface: str


@dataclass(frozen=True)
class Property:
    name: str
    kind: str  # "constant" | "dynamic"
    value_type: str  # "int" | "string"
    value: Union[int, str, None] = None
    provider: Optional[MethodRef] = None

    @property
    def is_dynamic(self) -> bool:
        return self.kind == "dynamic"


@dataclass(frozen=True)
class Template:
    name: str
    provides: tuple = ()
    requires: tuple = ()
    properties: tuple = ()

    def property(self, name: str) -> Optional[Property]:
        return next((p for p in self.properties if p.name == name), None)


@dataclass(frozen=True)
class ComponentType:
    name: str
    extends: Optional[str]
    provides: tuple
    requires: tuple
    implementation: str
    instantiate: Instantiate
    satisfy: tuple = ()
    bind: tuple = ()
    initialise: tuple = ()
    destroy: tuple = ()
    properties: tuple = ()

    def port(self, name: str) -> Optional[Port]:
        return next((p for p in self.requires if p.name == name), None)

    def property(self, name: str) -> Optional[Property]:
        return next((p for p in self.properties if p.name == name), None)

    def setter(self, port: str) -> Optional[Bind]:
        return next((b for b in self.bind if b.port == port), None)


@dataclass(frozen=True)
class HostTemplate:
    name: str
    properties: tuple = ()


@dataclass(frozen=True)
class Host:
    name: str
    extends: Optional[str] = None
    properties: tuple = ()  # merged (name, literal) pairs

    def get(self, prop: str, default=None):
        for key, value in self.properties:
            if key == prop:
                return value
        return default

    def has(self, prop: str) -> bool:
        return any(key == prop for key, _ in self.properties)


@dataclass(frozen=True)
class ConstraintSet:
    name: str
    expr: object = None


@dataclass(frozen=True)
class Optimisation:
    direction: str  # "minimize" | "maximize"
    term: object


@dataclass(frozen=True)
class Conjunct:
    """One top-level conjunct of a constraint set, the unit of compliance reporting."""

    set_name: str
    index: int
    expr: object

    @property
    def label(self) -> str:
        return f"{self.set_name}[{self.index}]"

    @property
    def text(self) -> str:
        return " ".join(ex.format_expr(self.expr).split())


@dataclass(frozen=True)
class DesiredStateDescription:
    interfaces: tuple = ()
    templates: tuple = ()
    component_types: tuple = ()
    host_templates: tuple = ()
    hosts: tuple = ()
    constraint_sets: tuple = ()
    optimisation: Optional[Optimisation] = None
    max_instances_per_host: int = 1
    name: str = field(default="dsd", compare=False)

    @cached_property
    def _types(self) -> dict:
        return {t.name: t for t in self.component_types}

    @cached_property
    def _templates(self) -> dict:
        return {t.name: t for t in self.templates}

    @cached_property
    def _hosts(self) -> dict:
        return {h.name: h for h in self.hosts}

    @cached_property
    def _interfaces(self) -> dict:
        return {i.name: i for i in self.interfaces}

    def component_type(self, name: str) -> ComponentType:
        return self._types[name]

    def template(self, name: str) -> Template:
        return self._templates[name]

    def host(self, name: str) -> Host:
        return self._hosts[name]

    def interface(self, name: str) -> Interface:
        return self._interfaces[name]

    def has_type(self, name: str) -> bool:
        return name in self._types

    def has_host(self, name: str) -> bool:
        return name in self._hosts

    @property
    def host_names(self) -> list[str]:
        return [h.name for h in self.hosts]

    @property
    def type_names(self) -> list[str]:
        return [t.name for t in self.component_types]

    def concrete_types(self, name: str) -> list[str]:
        """Concrete component types denoted by a type or template name."""
        if name in self._types:
            return [name]
        return [t.name for t in self.component_types if t.extends == name]

    def conjuncts(self) -> list[Conjunct]:
        out = []
        for cs in self.constraint_sets:
            for i, item in enumerate(ex.conjuncts(cs.expr)):
                out.append(Conjunct(cs.name, i, item))
        return out

    def is_dynamic_property(self, type_name: str, prop: str) -> bool:
        """True if ``prop`` is dynamic on any concrete type ``type_name`` denotes."""
        for t in self.concrete_types(type_name):
            p = self.component_type(t).property(prop)
            if p is not None and p.is_dynamic:
                return True
        if type_name in self._templates:
            p = self._templates[type_name].property(prop)
            if p is not None and p.is_dynamic:
                return True
        return False

    def canonical(self) -> str:
        from .printer import pretty_print

        return pretty_print(self)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()
