"""Constraint expression trees.

The parser produces these nodes with bare :class:`Name` references; the
resolver rewrites names into :class:`VarRef` (a quantified component
variable), :class:`HostVar` (a quantified host variable) or
:class:`HostRef` (a declared host).  Positions never take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import NOWHERE, Position

RELATIONS = ("<=", ">=", "=", "<", ">")

NEGATED = {"<=": ">", ">=": "<", "<": ">=", ">": "<=", "=": None}


def _pos():
    return field(default=NOWHERE, compare=False, repr=False)


# -- references ---------------------------------------------------------------


@dataclass(frozen=True)
class Name:
    ident: str
    position: Position = _pos()


@dataclass(frozen=True)
class VarRef:
    name: str
    position: Position = _pos()


@dataclass(frozen=True)
class HostVar:
    name: str
    position: Position = _pos()


@dataclass(frozen=True)
class HostRef:
    name: str
    position: Position = _pos()


@dataclass(frozen=True)
class HostOf:
    """``getHost(v)``: the host a component variable is placed on."""

    var: Union[Name, VarRef]
    position: Position = _pos()


# -- integer terms -------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    position: Position = _pos()


@dataclass(frozen=True)
class PropertyOf:
    target: object
    prop: str
    position: Position = _pos()


@dataclass(frozen=True)
class Connections:
    var: Union[Name, VarRef]
    interface: str
    position: Position = _pos()


@dataclass(frozen=True)
class ComponentsOn:
    host: object
    position: Position = _pos()


@dataclass(frozen=True)
class InstancesOf:
    type_name: str
    position: Position = _pos()


@dataclass(frozen=True)
class Card:
    of: Union[Connections, ComponentsOn, InstancesOf]
    position: Position = _pos()


# -- formulas -------------------------------------------------------------------


@dataclass(frozen=True)
class Compare:
    op: str
    left: object
    right: object
    position: Position = _pos()


@dataclass(frozen=True)
class And:
    items: tuple
    position: Position = _pos()


@dataclass(frozen=True)
class Or:
    items: tuple
    position: Position = _pos()


@dataclass(frozen=True)
class Not:
    item: object
    position: Position = _pos()


@dataclass(frozen=True)
class ForallHosts:
    var: str
    body: object
    position: Position = _pos()


@dataclass(frozen=True)
class ForallComponents:
    type_name: str
    var: str
    body: object
    position: Position = _pos()


def conjuncts(expr) -> list:
    """Flatten top-level conjunctions; ``None`` (an empty set) yields nothing."""
    if expr is None:
        return []
    if isinstance(expr, And):
        out = []
        for item in expr.items:
            out.extend(conjuncts(item))
        return out
    return [expr]


def walk(node):
    """Yield ``node`` and every node below it, depth first."""
    yield node
    if isinstance(node, (And, Or)):
        for item in node.items:
            yield from walk(item)
    elif isinstance(node, Not):
        yield from walk(node.item)
    elif isinstance(node, (ForallHosts, ForallComponents)):
        yield from walk(node.body)
    elif isinstance(node, Compare):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Card):
        yield from walk(node.of)
    elif isinstance(node, PropertyOf):
        yield from walk(node.target)
    elif isinstance(node, (Connections, HostOf)):
        yield from walk(node.var)
    elif isinstance(node, ComponentsOn):
        yield from walk(node.host)


def format_expr(node, indent: int = 0) -> str:
    """Render an expression back into source syntax."""
    pad = "  " * indent
    if isinstance(node, And):
        parts = [pad + _paren(i) if isinstance(i, Or) else format_expr(i, indent) for i in node.items]
        return f"\n{pad}and\n".join(parts)
    if isinstance(node, Or):
        return " or ".join(_paren(i) for i in node.items)
    if isinstance(node, Not):
        return f"not {_paren(node.item)}"
    if isinstance(node, ForallHosts):
        return f"{pad}forall host {node.var} in deployment ({format_expr(node.body).strip()})"
    if isinstance(node, ForallComponents):
        body = format_expr(node.body).strip()
        return f"{pad}forall {node.type_name} {node.var} in deployment ({body})"
    if isinstance(node, Compare):
        return f"{pad}{format_term(node.left)} {node.op} {format_term(node.right)}"
    return pad + format_term(node)


def _paren(node) -> str:
    text = format_expr(node).strip().replace("\n", " ")
    if isinstance(node, (And, Or)):
        return f"({text})"
    return text


def format_term(node) -> str:
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, (Name,)):
        return node.ident
    if isinstance(node, (VarRef, HostVar, HostRef)):
        return node.name
    if isinstance(node, HostOf):
        return f"getHost({format_term(node.var)})"
    if isinstance(node, PropertyOf):
        return f"{format_term(node.target)}.{node.prop}"
    if isinstance(node, Card):
        return f"card({format_term(node.of)})"
    if isinstance(node, Connections):
        return f"connections({format_term(node.var)}.{node.interface})"
    if isinstance(node, ComponentsOn):
        return f"getComponents({format_term(node.host)})"
    if isinstance(node, InstancesOf):
        return f"instancesOf({node.type_name} in deployment)"
    if isinstance(node, Compare):
        return format_expr(node).strip()
    raise TypeError(f"not a term: {node!r}")
