"""Unresolved declarations as written in the source, in source order."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import NOWHERE, Position


def _pos():
    return field(default=NOWHERE, compare=False, repr=False)


@dataclass(frozen=True)
class InterfaceDecl:
    name: str
    impl_type: str
    specification: str
    implementation: str
    position: Position = _pos()


@dataclass(frozen=True)
class PortDecl:
    interface: str
    name: str
    position: Position = _pos()


@dataclass(frozen=True)
class MethodRef:
    ref: str
    method: str
    position: Position = _pos()


@dataclass(frozen=True)
class PropertyDecl:
    """A property declaration or binding.

    ``kind``/``value_type`` may be ``None`` when the source leaves them to be
    inferred (a component binding such as ``accuracy = 2``).
    """

    name: str
    kind: Optional[str] = None
    value_type: Optional[str] = None
    value: Union[int, str, None] = None
    provider: Optional[MethodRef] = None
    position: Position = _pos()


@dataclass(frozen=True)
class TemplateDecl:
    name: str
    provides: tuple = ()
    requires: tuple = ()
    properties: tuple = ()
    position: Position = _pos()


@dataclass(frozen=True)
class Instantiate:
    ref: str
    class_name: str
    args: tuple = ()
    position: Position = _pos()


@dataclass(frozen=True)
class Satisfy:
    interface: str
    ref: str
    position: Position = _pos()


@dataclass(frozen=True)
class Bind:
    port: str
    ref: str
    method: str
    position: Position = _pos()


@dataclass(frozen=True)
class ComponentTypeDecl:
    name: str
    extends: Optional[str] = None
    provides: tuple = ()
    requires: tuple = ()
    implementation: Optional[str] = None
    instantiate: Optional[Instantiate] = None
    satisfy: tuple = ()
    bind: tuple = ()
    initialise: tuple = ()
    destroy: tuple = ()
    properties: tuple = ()
    position: Position = _pos()


@dataclass(frozen=True)
class HostTemplateDecl:
    name: str
    properties: tuple = ()  # of (name, literal)
    position: Position = _pos()


@dataclass(frozen=True)
class HostDecl:
    name: str
    extends: Optional[str] = None
    properties: tuple = ()
    position: Position = _pos()


@dataclass(frozen=True)
class ConstraintSetDecl:
    name: str
    expr: object = None
    position: Position = _pos()


@dataclass(frozen=True)
class DeploymentDecl:
    settings: tuple = ()  # of (name, literal, position)
    position: Position = _pos()


@dataclass(frozen=True)
class OptimiseDecl:
    direction: str
    term: object
    position: Position = _pos()


@dataclass(frozen=True)
class Module:
    declarations: tuple = ()

    def of_type(self, cls) -> list:
        return [d for d in self.declarations if isinstance(d, cls)]
